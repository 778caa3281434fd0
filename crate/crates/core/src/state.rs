//! Pure states of an `N`-atom register of two-level emitters.
//!
//! Basis states are labelled by the set of atoms in the ground level, stored
//! as a bitmask (bit `l - 1` set means atom `l` is in `|g>`). Starting from
//! the fully excited state, `k` applications of the far-field operator only
//! populate the `C(N, k)` sets of cardinality `k`, so a sparse map stays small
//! where a dense `2^N` vector would not.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::EmitterChain;

/// Largest register representable with a `u64` ground-set mask.
pub const MAX_ATOMS: usize = 64;

/// Amplitudes below this modulus are dropped after each operator application.
const PRUNE_BELOW: f64 = 1e-15;

/// Tolerance on `norm_sq == 1` for a state to count as normalized.
pub const NORMALIZED_TOL: f64 = 1e-10;

/// Set of atoms in the ground level, as a bitmask over atom indices `1..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundSet(u64);

impl GroundSet {
    pub const EMPTY: GroundSet = GroundSet(0);

    pub fn from_mask(mask: u64) -> Self {
        GroundSet(mask)
    }

    /// Builds the set from 1-based atom indices.
    pub fn from_atoms(atoms: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &l in atoms {
            if l == 0 || l > MAX_ATOMS {
                return Err(Error::invalid(format!("atom index {l} out of range 1..={MAX_ATOMS}")));
            }
            mask |= 1 << (l - 1);
        }
        Ok(GroundSet(mask))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, atom: usize) -> bool {
        (1..=MAX_ATOMS).contains(&atom) && self.0 & (1 << (atom - 1)) != 0
    }

    /// 1-based atom indices in increasing order.
    pub fn atoms(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..MAX_ATOMS).filter(move |b| mask & (1 << b) != 0).map(|b| b + 1)
    }
}

impl fmt::Display for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.atoms().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

/// Pure state of `n_atoms` two-level atoms as a sparse amplitude map.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_atoms: usize,
    amplitudes: BTreeMap<GroundSet, Complex64>,
}

fn check_atoms(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ATOMS {
        return Err(Error::invalid(format!(
            "register size {n} out of range 1..={MAX_ATOMS}"
        )));
    }
    Ok(())
}

impl PureState {
    /// Builds a state from explicit amplitudes. Every ground set must only
    /// reference atoms `1..=n_atoms`.
    pub fn from_amplitudes(
        n_atoms: usize,
        amplitudes: impl IntoIterator<Item = (GroundSet, Complex64)>,
    ) -> Result<Self> {
        check_atoms(n_atoms)?;
        let full = full_mask(n_atoms);
        let mut map = BTreeMap::new();
        for (set, amp) in amplitudes {
            if set.mask() & !full != 0 {
                return Err(Error::invalid(format!("ground set {set} not within 1..={n_atoms}")));
            }
            *map.entry(set).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        Ok(PureState {
            n_atoms,
            amplitudes: map,
        })
    }

    /// `|e_1 e_2 ... e_N>`.
    pub fn fully_excited(n: usize) -> Result<Self> {
        check_atoms(n)?;
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(GroundSet::EMPTY, Complex64::new(1.0, 0.0));
        Ok(PureState { n_atoms: n, amplitudes })
    }

    /// Symmetric single-excitation state: exactly one atom excited, uniform
    /// real amplitudes `1/sqrt(n)`.
    pub fn w_state(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("W state needs at least two atoms"));
        }
        check_atoms(n)?;
        let full = full_mask(n);
        let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        let amplitudes = (0..n).map(|r| (GroundSet(full & !(1 << r)), amp)).collect();
        Ok(PureState { n_atoms: n, amplitudes })
    }

    /// Single-excitation state left behind by `N - 1` detections at `theta1`.
    ///
    /// Every detection ordering contributes the same product of phase
    /// factors, so up to a global phase the atom `r` that is still excited
    /// carries amplitude `exp(+i phi_r(theta1)) / sqrt(N)`. At `theta1 = 0`
    /// this is [`PureState::w_state`].
    pub fn heralded_w_state(chain: &EmitterChain, theta1: f64) -> Result<Self> {
        let n = chain.n_emitters();
        if n < 2 {
            return Err(Error::invalid("W state needs at least two atoms"));
        }
        check_atoms(n)?;
        let full = full_mask(n);
        let norm = 1.0 / (n as f64).sqrt();
        let mut amplitudes = BTreeMap::new();
        for r in 1..=n {
            let phi = chain.phase(r, theta1)?;
            amplitudes.insert(GroundSet(full & !(1 << (r - 1))), Complex64::from_polar(norm, phi));
        }
        Ok(PureState { n_atoms: n, amplitudes })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn amplitudes(&self) -> &BTreeMap<GroundSet, Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, set: GroundSet) -> Complex64 {
        self.amplitudes.get(&set).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sq() - 1.0).abs() <= NORMALIZED_TOL
    }

    pub fn normalize(&self) -> Result<Self> {
        let ns = self.norm_sq();
        if ns <= 0.0 || !ns.is_finite() {
            return Err(Error::DegenerateState(
                "cannot normalize a zero state: the detection sequence has vanishing probability".into(),
            ));
        }
        let scale = ns.sqrt().recip();
        Ok(PureState {
            n_atoms: self.n_atoms,
            amplitudes: self.amplitudes.iter().map(|(k, a)| (*k, a * scale)).collect(),
        })
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &PureState) -> Result<Complex64> {
        if self.n_atoms != other.n_atoms {
            return Err(Error::invalid(format!(
                "register sizes differ: {} vs {}",
                self.n_atoms, other.n_atoms
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .filter_map(|(k, a)| other.amplitudes.get(k).map(|b| a.conj() * b))
            .sum())
    }

    /// Applies `sum_l exp(-i phi_l(theta)) s_l^-` for a detector at `theta`.
    /// The result is generally unnormalized.
    pub fn apply_field(&self, theta: f64, chain: &EmitterChain) -> Result<Self> {
        if chain.n_emitters() != self.n_atoms {
            return Err(Error::invalid(format!(
                "chain has {} emitters but state has {} atoms",
                chain.n_emitters(),
                self.n_atoms
            )));
        }
        let factors = chain.phase_factors(theta)?;
        Ok(self.lower_with(&factors))
    }

    /// `sum_l factors[l - 1] * s_l^-`; lowering an atom already in `|g>`
    /// gives nothing.
    pub(crate) fn lower_with(&self, factors: &[Complex64]) -> Self {
        debug_assert_eq!(factors.len(), self.n_atoms);
        let mut out: BTreeMap<GroundSet, Complex64> = BTreeMap::new();
        for (set, amp) in &self.amplitudes {
            for (bit, u) in factors.iter().enumerate() {
                let b = 1u64 << bit;
                if set.0 & b == 0 {
                    *out.entry(GroundSet(set.0 | b)).or_default() += amp * u;
                }
            }
        }
        out.retain(|_, a| a.norm() >= PRUNE_BELOW);
        PureState {
            n_atoms: self.n_atoms,
            amplitudes: out,
        }
    }

    /// Register state after photons were recorded at `detection_angles`
    /// (in order), starting from the fully excited chain. Normalized.
    pub fn conditional_state(chain: &EmitterChain, detection_angles: &[f64]) -> Result<Self> {
        let n = chain.n_emitters();
        if detection_angles.len() >= n {
            return Err(Error::invalid(format!(
                "{} detections on {n} atoms leave nothing to measure; need fewer than N",
                detection_angles.len()
            )));
        }
        let mut state = PureState::fully_excited(n)?;
        for &theta in detection_angles {
            state = state.apply_field(theta, chain)?;
        }
        state.normalize()
    }
}

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Amplitude map keyed by the ground set (`"{1,3}"`), values `[re, im]`.
struct AmplitudeMap<'a>(&'a BTreeMap<GroundSet, Complex64>);

impl Serialize for AmplitudeMap<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (set, amp) in self.0 {
            map.serialize_entry(&set.to_string(), &[amp.re, amp.im])?;
        }
        map.end()
    }
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("PureState", 3)?;
        st.serialize_field("n_atoms", &self.n_atoms)?;
        st.serialize_field("norm_sq", &self.norm_sq())?;
        st.serialize_field("amplitudes", &AmplitudeMap(&self.amplitudes))?;
        st.end()
    }
}
