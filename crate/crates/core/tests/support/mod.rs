//! Test-only oracles, written without any of the library's kernels.

#![allow(dead_code)]

use std::collections::HashMap;

use num_complex::Complex64;

/// `G^(m)` by enumerating every ordered assignment of distinct emitters to
/// detectors, summing amplitudes per final set of lowered atoms and adding
/// the squared moduli.
pub fn brute_force_g(n: usize, kd: f64, angles: &[f64]) -> f64 {
    fn walk(n: usize, kd: f64, angles: &[f64], used: u64, amp: Complex64, acc: &mut HashMap<u64, Complex64>) {
        let j = used.count_ones() as usize;
        if j == angles.len() {
            *acc.entry(used).or_default() += amp;
            return;
        }
        for l in 1..=n {
            if used & (1 << (l - 1)) == 0 {
                // exp(-i phi) with phi = -l kd sin(theta)
                let u = Complex64::from_polar(1.0, l as f64 * kd * angles[j].sin());
                walk(n, kd, angles, used | (1 << (l - 1)), amp * u, acc);
            }
        }
    }
    if angles.len() > n {
        return 0.0;
    }
    let mut acc = HashMap::new();
    walk(n, kd, angles, 0, Complex64::new(1.0, 0.0), &mut acc);
    acc.values().map(|a| a.norm_sqr()).sum()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Relative difference, absolute below `1e-12`.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-12 {
        (a - b).abs()
    } else {
        (a - b).abs() / scale
    }
}

/// Small deterministic generator (SplitMix64) so the oracles share no RNG
/// code with the library.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }
}
