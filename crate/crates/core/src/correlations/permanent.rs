//! Matrix permanents.
//!
//! The coherent sum over all ways `m` distinct emitters can feed `m`
//! detectors is the permanent of the corresponding `m x m` block of the
//! phase matrix. [`permanent`] uses Ryser's inclusion-exclusion formula with
//! a Gray-code walk over column subsets (`O(2^m m)`); [`permanent_naive`]
//! enumerates all `m!` permutations and is kept as an oracle.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest order accepted by the Ryser kernel.
pub const MAX_RYSER_ORDER: usize = 30;
/// Largest order accepted by the permutation enumeration.
pub const MAX_NAIVE_ORDER: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PermanentMethod {
    #[default]
    Ryser,
    /// Direct sum over permutations. Only for `m <= 9`.
    Naive,
}

impl PermanentMethod {
    pub fn max_order(self) -> usize {
        match self {
            PermanentMethod::Ryser => MAX_RYSER_ORDER,
            PermanentMethod::Naive => MAX_NAIVE_ORDER,
        }
    }
}

fn check_square(matrix: &Array2<Complex64>, method: PermanentMethod) -> Result<usize> {
    let (rows, cols) = matrix.dim();
    if rows != cols {
        return Err(Error::invalid(format!(
            "permanent needs a square matrix, got {rows}x{cols}"
        )));
    }
    if rows == 0 || rows > method.max_order() {
        return Err(Error::invalid(format!(
            "permanent order {rows} outside 1..={} for {method:?}",
            method.max_order()
        )));
    }
    Ok(rows)
}

/// Permanent by Ryser's formula.
pub fn permanent(matrix: &Array2<Complex64>) -> Result<Complex64> {
    permanent_with(matrix, PermanentMethod::Ryser)
}

/// Permanent by explicit permutation enumeration.
pub fn permanent_naive(matrix: &Array2<Complex64>) -> Result<Complex64> {
    permanent_with(matrix, PermanentMethod::Naive)
}

pub fn permanent_with(matrix: &Array2<Complex64>, method: PermanentMethod) -> Result<Complex64> {
    let m = check_square(matrix, method)?;
    let entry = |i: usize, j: usize| matrix[[i, j]];
    Ok(match method {
        PermanentMethod::Ryser => ryser(m, entry, &mut vec![Complex64::default(); m]),
        PermanentMethod::Naive => naive(m, entry),
    })
}

/// Ryser's formula
/// `perm(A) = (-1)^m sum_{S != {}} (-1)^{|S|} prod_i sum_{j in S} a_ij`,
/// walking the column subsets `S` in Gray-code order so each step adds or
/// removes one column from the running row sums.
///
/// `row_sums` is scratch space of length `m`.
pub(crate) fn ryser<F>(m: usize, entry: F, row_sums: &mut [Complex64]) -> Complex64
where
    F: Fn(usize, usize) -> Complex64,
{
    debug_assert!((1..=MAX_RYSER_ORDER).contains(&m));
    debug_assert_eq!(row_sums.len(), m);
    row_sums.fill(Complex64::default());
    let mut total = Complex64::default();
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << m) {
        let col = k.trailing_zeros() as usize;
        let bit = 1u64 << col;
        gray ^= bit;
        if gray & bit != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += entry(i, col);
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= entry(i, col);
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones().is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if m % 2 == 1 {
        -total
    } else {
        total
    }
}

/// `sum_sigma prod_j a[sigma(j)][j]` by depth-first expansion over columns.
pub(crate) fn naive<F>(m: usize, entry: F) -> Complex64
where
    F: Fn(usize, usize) -> Complex64,
{
    fn expand<F: Fn(usize, usize) -> Complex64>(
        m: usize,
        col: usize,
        used: u32,
        acc: Complex64,
        entry: &F,
    ) -> Complex64 {
        if col == m {
            return acc;
        }
        (0..m)
            .filter(|row| used & (1 << row) == 0)
            .map(|row| expand(m, col + 1, used | (1 << row), acc * entry(row, col), entry))
            .sum()
    }
    expand(m, 0, 0, Complex64::new(1.0, 0.0), &entry)
}
