//! Emitter chain, detector placement and the optical phases between them.
//!
//! Emitter `l` (1-based) sits at `x = l * d` on the x-axis. A photon reaching
//! a far-field detector at polar angle `theta` in the x-z plane picks up the
//! phase `phi = -l * kd * sin(theta)` relative to one emitted at the origin.

use std::f64::consts::FRAC_PI_2;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Slack allowed on the `[-pi/2, pi/2]` angle bounds for grid endpoints
/// produced by floating-point arithmetic.
const ANGLE_SLACK: f64 = 1e-12;

pub(crate) fn check_angle(theta: f64) -> Result<()> {
    if !theta.is_finite() || theta.abs() > FRAC_PI_2 + ANGLE_SLACK {
        return Err(Error::invalid(format!("detector angle {theta} outside [-pi/2, pi/2]")));
    }
    Ok(())
}

pub(crate) fn check_kd(kd: f64) -> Result<()> {
    if !kd.is_finite() || kd <= 0.0 {
        return Err(Error::invalid(format!("kd must be positive and finite, got {kd}")));
    }
    Ok(())
}

/// Optical phase of emitter `l` seen from angle `theta`: `-l * kd * sin(theta)`.
pub fn phase(l: usize, theta: f64, kd: f64) -> Result<f64> {
    if l == 0 {
        return Err(Error::invalid("emitter index is 1-based"));
    }
    check_angle(theta)?;
    check_kd(kd)?;
    Ok(raw_phase(l as f64, theta.sin(), kd))
}

#[inline]
fn raw_phase(l: f64, sin_theta: f64, kd: f64) -> f64 {
    -l * kd * sin_theta
}

/// `N` identical emitters, equally spaced along the x-axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterChain {
    n_emitters: usize,
    kd: f64,
}

impl EmitterChain {
    /// Builds a chain of `n_emitters` with dimensionless spacing `kd`.
    ///
    /// `kd <= 1` is accepted with a warning: the interference algebra is
    /// unchanged, but dipole-dipole coupling would no longer be negligible
    /// for a physical chain that dense.
    pub fn new(n_emitters: usize, kd: f64) -> Result<Self> {
        if n_emitters == 0 {
            return Err(Error::invalid("a chain needs at least one emitter"));
        }
        check_kd(kd)?;
        if kd <= 1.0 {
            log::warn!("kd = {kd} <= 1: dipole-dipole coupling is not negligible for such a chain");
        }
        Ok(EmitterChain { n_emitters, kd })
    }

    pub fn n_emitters(&self) -> usize {
        self.n_emitters
    }

    pub fn kd(&self) -> f64 {
        self.kd
    }

    /// Phase of emitter `l` (1..=N) at angle `theta`.
    pub fn phase(&self, l: usize, theta: f64) -> Result<f64> {
        if l > self.n_emitters {
            return Err(Error::invalid(format!(
                "emitter index {l} exceeds chain length {}",
                self.n_emitters
            )));
        }
        phase(l, theta, self.kd)
    }

    /// Per-emitter factors `exp(-i phi_l(theta))` for `l = 1..=N`.
    pub fn phase_factors(&self, theta: f64) -> Result<Vec<Complex64>> {
        check_angle(theta)?;
        let s = theta.sin();
        Ok((1..=self.n_emitters)
            .map(|l| Complex64::from_polar(1.0, -raw_phase(l as f64, s, self.kd)))
            .collect())
    }
}

/// Ordered detector angles `theta_1..theta_m` (radians).
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionConfig {
    angles: Vec<f64>,
}

impl DetectionConfig {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::invalid("at least one detector is required"));
        }
        for &a in &angles {
            check_angle(a)?;
        }
        Ok(DetectionConfig { angles })
    }

    /// `m - 1` detectors at `theta1` and the last one at `theta2`.
    pub fn heralded(m: usize, theta1: f64, theta2: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("at least one detector is required"));
        }
        let mut angles = vec![theta1; m - 1];
        angles.push(theta2);
        Self::new(angles)
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// `N x m` matrix of path phase factors `u_lj = exp(-i phi_lj)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMatrix {
    phases: Array2<f64>,
    entries: Array2<Complex64>,
}

impl PhaseMatrix {
    pub fn new(chain: &EmitterChain, detectors: &DetectionConfig) -> Self {
        Self::with_index_offset(chain, detectors, 0)
    }

    /// Same as [`PhaseMatrix::new`] with every emitter index shifted to
    /// `l + offset`. Observables do not depend on the offset.
    pub fn with_index_offset(chain: &EmitterChain, detectors: &DetectionConfig, offset: i64) -> Self {
        let sines: Vec<f64> = detectors.angles().iter().map(|t| t.sin()).collect();
        Self::build(chain.n_emitters(), chain.kd(), &sines, offset)
    }

    /// Builds the matrix directly from `sin(theta_j)` values, which need not
    /// lie in `[-1, 1]`. Used to probe the `2 pi / kd` periodicity in sine
    /// space beyond what physical angles can reach.
    pub fn from_sines(n_emitters: usize, kd: f64, sines: &[f64]) -> Result<Self> {
        if n_emitters == 0 || sines.is_empty() {
            return Err(Error::invalid("phase matrix needs N >= 1 and m >= 1"));
        }
        check_kd(kd)?;
        if sines.iter().any(|s| !s.is_finite()) {
            return Err(Error::invalid("non-finite sine value"));
        }
        Ok(Self::build(n_emitters, kd, sines, 0))
    }

    fn build(n: usize, kd: f64, sines: &[f64], offset: i64) -> Self {
        let phases = Array2::from_shape_fn((n, sines.len()), |(row, col)| {
            raw_phase((row as i64 + 1 + offset) as f64, sines[col], kd)
        });
        let entries = phases.mapv(|phi| Complex64::from_polar(1.0, -phi));
        PhaseMatrix { phases, entries }
    }

    /// Number of emitters (rows).
    pub fn n_emitters(&self) -> usize {
        self.entries.nrows()
    }

    /// Number of detectors (columns).
    pub fn n_detectors(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn phases(&self) -> &Array2<f64> {
        &self.phases
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_6, PI};

    #[test]
    fn phase_examples() {
        assert_eq!(phase(3, 0.0, PI).unwrap(), 0.0);
        assert_abs_diff_eq!(phase(1, FRAC_PI_2, PI).unwrap(), -PI, epsilon = 1e-15);
        assert_abs_diff_eq!(phase(2, FRAC_PI_6, PI).unwrap(), -PI, epsilon = 1e-15);
    }

    #[test]
    fn phase_rejects_bad_domain() {
        assert!(phase(0, 0.0, PI).is_err());
        assert!(phase(1, 1.6, PI).is_err());
        assert!(phase(1, f64::NAN, PI).is_err());
        let chain = EmitterChain::new(3, PI).unwrap();
        assert!(chain.phase(4, 0.0).is_err());
        assert!(chain.phase(3, 0.0).is_ok());
    }

    #[test]
    fn chain_and_detector_validation() {
        assert!(EmitterChain::new(0, PI).is_err());
        assert!(EmitterChain::new(2, 0.0).is_err());
        assert!(EmitterChain::new(2, -1.0).is_err());
        // kd <= 1 only warns
        assert!(EmitterChain::new(2, 0.5).is_ok());
        assert!(DetectionConfig::new(vec![]).is_err());
        assert!(DetectionConfig::new(vec![0.0, 2.0]).is_err());
        assert_eq!(
            DetectionConfig::heralded(3, 0.1, 0.2).unwrap().angles(),
            &[0.1, 0.1, 0.2]
        );
    }

    #[test]
    fn phase_matrix_examples() {
        let chain = EmitterChain::new(2, PI).unwrap();
        let pm = PhaseMatrix::new(&chain, &DetectionConfig::new(vec![0.0]).unwrap());
        assert_eq!(pm.entries().dim(), (2, 1));
        assert!(pm.entries().iter().all(|u| *u == Complex64::new(1.0, 0.0)));

        let chain = EmitterChain::new(1, PI).unwrap();
        let pm = PhaseMatrix::new(&chain, &DetectionConfig::new(vec![FRAC_PI_2]).unwrap());
        let u = pm.entries()[[0, 0]];
        assert_abs_diff_eq!(u.re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(u.im, 0.0, epsilon = 1e-15);

        let chain = EmitterChain::new(2, PI).unwrap();
        let pm = PhaseMatrix::new(&chain, &DetectionConfig::new(vec![0.0, 0.0]).unwrap());
        assert_eq!(pm.entries().dim(), (2, 2));
        assert!(pm.entries().iter().all(|u| *u == Complex64::new(1.0, 0.0)));
    }

    proptest! {
        #[test]
        fn entries_have_unit_modulus(
            n in 1usize..12,
            kd in 0.1f64..10.0,
            angles in prop::collection::vec(-FRAC_PI_2..FRAC_PI_2, 1..6),
        ) {
            let chain = EmitterChain::new(n, kd).unwrap();
            let pm = PhaseMatrix::new(&chain, &DetectionConfig::new(angles.clone()).unwrap());
            for u in pm.entries() {
                prop_assert!((u.norm() - 1.0).abs() < 1e-12);
            }
            for ((l, j), phi) in pm.phases().indexed_iter() {
                prop_assert_eq!(*phi, phase(l + 1, angles[j], kd).unwrap());
            }
        }

        #[test]
        fn phase_is_odd_in_theta(l in 1usize..50, theta in -FRAC_PI_2..FRAC_PI_2, kd in 0.1f64..10.0) {
            prop_assert_eq!(phase(l, -theta, kd).unwrap(), -phase(l, theta, kd).unwrap());
        }
    }
}
