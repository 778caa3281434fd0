//! Angle sweeps of `G^(m)(theta1, ..., theta1, theta2)`, peak-width and
//! visibility estimators, and a seeded cross-check of all routes.

use std::f64::consts::{FRAC_PI_2, PI};

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::{
    g_m_closed_form, g_m_operator, g_m_paths, g_m_paths_with, permanent, permanent_naive, PermanentMethod, Route,
};
use crate::error::{Error, Result};
use crate::geometry::{check_angle, DetectionConfig, EmitterChain};

/// Default number of grid points over `[-pi/2, pi/2]`.
pub const DEFAULT_POINTS: usize = 2001;

/// Relative agreement required between correlation routes.
pub const ROUTE_TOLERANCE: f64 = 1e-8;
/// Relative agreement required between Ryser and permutation enumeration.
pub const PERMANENT_TOLERANCE: f64 = 1e-10;
/// Below this magnitude both values are compared absolutely.
pub const ABSOLUTE_FLOOR: f64 = 1e-12;

/// Largest chain the route verifier accepts.
pub const VERIFY_MAX_N: usize = 8;

/// Sorted, duplicate-free detector angles for a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid {
    angles: Vec<f64>,
}

impl AngleGrid {
    /// `points` equally spaced angles from `lo` to `hi` inclusive.
    pub fn uniform(lo: f64, hi: f64, points: usize) -> Result<Self> {
        check_angle(lo)?;
        check_angle(hi)?;
        if points == 0 {
            return Err(Error::invalid("grid needs at least one point"));
        }
        if points == 1 {
            return Self::from_angles(vec![lo]);
        }
        if hi <= lo {
            return Err(Error::invalid(format!("grid range [{lo}, {hi}] is empty")));
        }
        // Weighted endpoints keep a symmetric grid exactly symmetric, with
        // an exact 0.0 at the centre of an odd-sized one.
        let last = (points - 1) as f64;
        let angles = (0..points)
            .map(|i| lo * ((points - 1 - i) as f64 / last) + hi * (i as f64 / last))
            .collect();
        Ok(AngleGrid { angles })
    }

    /// Uniform grid over the full half circle `[-pi/2, pi/2]`.
    pub fn full(points: usize) -> Result<Self> {
        Self::uniform(-FRAC_PI_2, FRAC_PI_2, points)
    }

    pub fn from_angles(mut angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::invalid("grid needs at least one point"));
        }
        for &a in &angles {
            check_angle(a)?;
        }
        angles.sort_by(f64::total_cmp);
        angles.dedup();
        Ok(AngleGrid { angles })
    }

    /// Adds extra angles (for instance exact pattern zeros) to the grid.
    pub fn with_angles(self, extra: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut angles = self.angles;
        angles.extend(extra);
        Self::from_angles(angles)
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

/// Angles `theta2` where the fringe term of the closed form vanishes:
/// `kd (sin theta2 - sin theta1) = 2 pi q / N` with `q` not a multiple of `N`.
pub fn pattern_zeros(n: usize, kd: f64, theta1: f64) -> Vec<f64> {
    if n < 2 {
        return Vec::new();
    }
    let s1 = theta1.sin();
    let step = 2.0 * PI / (n as f64 * kd);
    let q_max = ((2.0 / step).ceil() as i64) + 1;
    (-q_max..=q_max)
        .filter(|q| q.rem_euclid(n as i64) != 0)
        .map(|q| s1 + step * q as f64)
        .filter(|s| s.abs() <= 1.0)
        .map(f64::asin)
        .collect()
}

/// Which correlation route a sweep evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RouteChoice {
    /// Closed form whenever it applies (`N >= 2`), otherwise paths.
    #[default]
    Auto,
    Paths,
    Operator,
    ClosedForm,
}

impl RouteChoice {
    pub fn resolve(self, n: usize) -> Route {
        match self {
            RouteChoice::Auto if n >= 2 => Route::ClosedForm,
            RouteChoice::Auto => Route::Paths,
            RouteChoice::Paths => Route::Paths,
            RouteChoice::Operator => Route::Operator,
            RouteChoice::ClosedForm => Route::ClosedForm,
        }
    }
}

impl std::str::FromStr for RouteChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(RouteChoice::Auto),
            "paths" => Ok(RouteChoice::Paths),
            "operator" => Ok(RouteChoice::Operator),
            "closed_form" | "closed-form" => Ok(RouteChoice::ClosedForm),
            other => Err(Error::invalid(format!("unknown route '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMeta {
    pub n: usize,
    pub m: usize,
    pub theta1: f64,
    pub kd: f64,
    pub route: Route,
}

/// Sampled `G^(m)` over a grid of `theta2`, raw and normalized to the maximum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub angles: Vec<f64>,
    pub values: Vec<f64>,
    pub normalized: Vec<f64>,
    pub meta: SweepMeta,
}

impl SweepResult {
    /// Wraps externally produced samples; angles must be strictly increasing.
    pub fn from_samples(angles: Vec<f64>, values: Vec<f64>, meta: SweepMeta) -> Result<Self> {
        if angles.is_empty() || angles.len() != values.len() {
            return Err(Error::invalid(
                "sweep needs equally many angles and values, at least one",
            ));
        }
        if angles.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sweep angles must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("sweep values must be finite and non-negative"));
        }
        let max = values.iter().copied().fold(0.0, f64::max);
        let normalized = if max > 0.0 {
            values.iter().map(|v| v / max).collect()
        } else {
            vec![0.0; values.len()]
        };
        Ok(SweepResult {
            angles,
            values,
            normalized,
            meta,
        })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// Evaluates `G^(m)(theta1, ..., theta1, theta2)` for every `theta2` in the
/// grid. Points are computed in parallel and assembled in grid order.
pub fn sweep(chain: &EmitterChain, m: usize, theta1: f64, grid: &AngleGrid, route: RouteChoice) -> Result<SweepResult> {
    let n = chain.n_emitters();
    if m == 0 || m > n {
        return Err(Error::invalid(format!("order m = {m} outside 1..={n}")));
    }
    check_angle(theta1)?;
    let route = route.resolve(n);
    let values = grid
        .angles()
        .par_iter()
        .map(|&theta2| {
            let value = match route {
                Route::ClosedForm => g_m_closed_form(n, m, theta1, theta2, chain.kd())?,
                Route::Paths => g_m_paths(chain, &DetectionConfig::heralded(m, theta1, theta2)?)?,
                Route::Operator => g_m_operator(chain, &DetectionConfig::heralded(m, theta1, theta2)?)?,
            };
            Ok(value.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    SweepResult::from_samples(
        grid.angles().to_vec(),
        values,
        SweepMeta {
            n,
            m,
            theta1,
            kd: chain.kd(),
            route,
        },
    )
}

/// Full width at half maximum of the peak nearest `theta1`.
///
/// Starting from the grid point closest to `theta1` the estimator climbs to
/// the local maximum, which must be the global one and lie strictly inside
/// the grid. The half-maximum crossings on either side are located by linear
/// interpolation between the bracketing samples.
pub fn estimate_fwhm(sweep: &SweepResult) -> Result<f64> {
    let a = &sweep.angles;
    let v = &sweep.values;
    if a.len() < 3 {
        return Err(Error::Estimation("need at least three samples".into()));
    }
    let target = sweep.meta.theta1;
    let mut peak = a
        .iter()
        .enumerate()
        .min_by(|(_, x), (_, y)| (*x - target).abs().total_cmp(&(*y - target).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    loop {
        if peak > 0 && v[peak - 1] > v[peak] {
            peak -= 1;
        } else if peak + 1 < v.len() && v[peak + 1] > v[peak] {
            peak += 1;
        } else {
            break;
        }
    }
    if peak == 0 || peak + 1 == v.len() {
        return Err(Error::Estimation(format!("peak at grid edge (theta = {})", a[peak])));
    }
    if sweep.normalized[peak] < 1.0 - 1e-9 {
        return Err(Error::Estimation(format!(
            "peak near theta1 reaches only {} of the global maximum",
            sweep.normalized[peak]
        )));
    }
    let half = 0.5 * v[peak];
    let crossing = |lo: usize, hi: usize| {
        // v[lo] and v[hi] bracket `half`; interpolate linearly.
        let t = (half - v[lo]) / (v[hi] - v[lo]);
        a[lo] + t * (a[hi] - a[lo])
    };
    let left = (0..peak)
        .rev()
        .find(|&j| v[j] <= half)
        .map(|j| crossing(j, j + 1))
        .ok_or_else(|| Error::Estimation("half maximum not reached left of the peak".into()))?;
    let right = (peak + 1..v.len())
        .find(|&j| v[j] <= half)
        .map(|j| crossing(j, j - 1))
        .ok_or_else(|| Error::Estimation("half maximum not reached right of the peak".into()))?;
    Ok(right - left)
}

/// `(max - min) / (max + min)` over the sampled values.
pub fn estimate_visibility(sweep: &SweepResult) -> Result<f64> {
    let max = sweep.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = sweep.values.iter().copied().fold(f64::INFINITY, f64::min);
    if max.is_nan() || max <= 0.0 {
        return Err(Error::Estimation("visibility undefined for an all-zero sweep".into()));
    }
    Ok((max - min) / (max + min))
}

/// Relative difference with an absolute floor near zero.
pub fn discrepancy(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < ABSOLUTE_FLOOR {
        (a - b).abs()
    } else {
        (a - b).abs() / scale
    }
}

fn complex_discrepancy(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale < ABSOLUTE_FLOOR {
        (a - b).norm()
    } else {
        (a - b).norm() / scale
    }
}

/// The single worst comparison seen by [`verify_routes`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstCase {
    pub trial: usize,
    pub comparison: String,
    pub n: usize,
    pub m: usize,
    pub kd: f64,
    pub angles: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub n_max: usize,
    pub trials: usize,
    pub comparisons: usize,
    pub closed_form_comparisons: usize,
    pub route_tolerance: f64,
    pub permanent_tolerance: f64,
    pub max_route_discrepancy: f64,
    pub max_permanent_discrepancy: f64,
    pub worst: Option<WorstCase>,
    pub passed: bool,
}

/// Draws `trials` seeded random configurations (`N <= n_max`, `m <= N`,
/// `kd` in `[1, 2 pi]`) and compares every applicable pair of routes:
/// paths (Ryser) against the operator route, against paths with the
/// enumerated permanent, and against the closed form whenever the detectors
/// form the `(theta1, ..., theta1, theta2)` pattern. Each trial also checks
/// Ryser against enumeration on a random complex `m x m` matrix.
pub fn verify_routes(n_max: usize, trials: usize, seed: u64) -> Result<VerificationReport> {
    if n_max == 0 || n_max > VERIFY_MAX_N {
        return Err(Error::invalid(format!(
            "n_max must be in 1..={VERIFY_MAX_N}, got {n_max}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerificationReport {
        seed,
        n_max,
        trials,
        comparisons: 0,
        closed_form_comparisons: 0,
        route_tolerance: ROUTE_TOLERANCE,
        permanent_tolerance: PERMANENT_TOLERANCE,
        max_route_discrepancy: 0.0,
        max_permanent_discrepancy: 0.0,
        worst: None,
        passed: true,
    };
    let mut worst_ratio = 0.0;

    for trial in 0..trials {
        let n = rng.random_range(1..=n_max);
        let m = rng.random_range(1..=n);
        let kd = rng.random_range(1.0..=2.0 * PI);
        let heralded = n >= 2 && rng.random_bool(0.5);
        let angles: Vec<f64> = if heralded {
            let theta1 = rng.random_range(-FRAC_PI_2..=FRAC_PI_2);
            let theta2 = rng.random_range(-FRAC_PI_2..=FRAC_PI_2);
            let mut a = vec![theta1; m - 1];
            a.push(theta2);
            a
        } else {
            (0..m).map(|_| rng.random_range(-FRAC_PI_2..=FRAC_PI_2)).collect()
        };
        let chain = EmitterChain::new(n, kd)?;
        let detectors = DetectionConfig::new(angles.clone())?;

        let paths = g_m_paths(&chain, &detectors)?.value;
        let mut others = vec![
            ("paths vs operator", g_m_operator(&chain, &detectors)?.value),
            (
                "paths vs paths_naive",
                g_m_paths_with(&chain, &detectors, PermanentMethod::Naive)?.value,
            ),
        ];
        if heralded {
            let cf = g_m_closed_form(n, m, angles[0], angles[m - 1], kd)?.value;
            others.push(("paths vs closed_form", cf));
            report.closed_form_comparisons += 1;
        }
        for (label, other) in others {
            report.comparisons += 1;
            let d = discrepancy(paths, other);
            report.max_route_discrepancy = report.max_route_discrepancy.max(d);
            if d / ROUTE_TOLERANCE >= worst_ratio {
                worst_ratio = d / ROUTE_TOLERANCE;
                report.worst = Some(WorstCase {
                    trial,
                    comparison: label.into(),
                    n,
                    m,
                    kd,
                    angles: angles.clone(),
                    lhs: paths,
                    rhs: other,
                    discrepancy: d,
                });
            }
        }

        let size = m.max(2);
        let matrix = Array2::from_shape_simple_fn((size, size), || {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let (ryser, naive) = (permanent(&matrix)?, permanent_naive(&matrix)?);
        let d = complex_discrepancy(ryser, naive);
        report.comparisons += 1;
        report.max_permanent_discrepancy = report.max_permanent_discrepancy.max(d);
        if d / PERMANENT_TOLERANCE >= worst_ratio {
            worst_ratio = d / PERMANENT_TOLERANCE;
            report.worst = Some(WorstCase {
                trial,
                comparison: "ryser vs naive permanent".into(),
                n,
                m: size,
                kd,
                angles: Vec::new(),
                lhs: ryser.norm(),
                rhs: naive.norm(),
                discrepancy: d,
            });
        }
    }
    report.passed =
        report.max_route_discrepancy < ROUTE_TOLERANCE && report.max_permanent_discrepancy < PERMANENT_TOLERANCE;
    Ok(report)
}
