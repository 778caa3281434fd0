//! Equal-time m-th order correlation functions `G^(m)` of the fully excited
//! chain, plus the analytic visibility and peak-width laws.
//!
//! All values are dimensionless: the field operator is taken as
//! `sum_l exp(-i phi_l) s_l^-` with every constant prefactor dropped.

mod permanent;

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{self, DetectionConfig, EmitterChain, PhaseMatrix};
use crate::state::PureState;

pub use permanent::{permanent, permanent_naive, permanent_with, PermanentMethod, MAX_NAIVE_ORDER, MAX_RYSER_ORDER};

/// Values in `[-NEGATIVE_SLACK, 0)` are rounding noise and clamp to zero.
const NEGATIVE_SLACK: f64 = 1e-12;

/// Below this `|sin x|` the Dirichlet ratio takes its limit `N^2`.
const DIRICHLET_SINGULAR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Paths,
    Operator,
    ClosedForm,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::Paths => "paths",
            Route::Operator => "operator",
            Route::ClosedForm => "closed_form",
        }
    }
}

/// A `G^(m)` value with the inputs and route that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationResult {
    pub value: f64,
    pub route: Route,
    pub n: usize,
    pub m: usize,
    pub angles: Vec<f64>,
    pub kd: f64,
}

fn clamp_nonneg(value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::invalid(format!("correlation evaluated to non-finite {value}")));
    }
    if value < 0.0 {
        debug_assert!(value >= -NEGATIVE_SLACK, "negative correlation {value}");
        return Ok(0.0);
    }
    Ok(value)
}

/// `G^(m)` as the incoherent sum, over all `C(N, m)` sets of emitting atoms,
/// of the squared coherent sum over the `m!` ways those atoms can feed the
/// `m` detectors.
pub fn g_m_paths(chain: &EmitterChain, detectors: &DetectionConfig) -> Result<CorrelationResult> {
    g_m_paths_with(chain, detectors, PermanentMethod::Ryser)
}

/// [`g_m_paths`] with an explicit permanent kernel.
pub fn g_m_paths_with(
    chain: &EmitterChain,
    detectors: &DetectionConfig,
    method: PermanentMethod,
) -> Result<CorrelationResult> {
    let matrix = PhaseMatrix::new(chain, detectors);
    let value = g_m_from_matrix(&matrix, method)?;
    Ok(CorrelationResult {
        value,
        route: Route::Paths,
        n: chain.n_emitters(),
        m: detectors.len(),
        angles: detectors.angles().to_vec(),
        kd: chain.kd(),
    })
}

/// Path-sum `G^(m)` directly from a phase matrix (`N` rows, `m` columns).
pub fn g_m_from_matrix(matrix: &PhaseMatrix, method: PermanentMethod) -> Result<f64> {
    let n = matrix.n_emitters();
    let m = matrix.n_detectors();
    if m > n {
        return Err(Error::invalid(format!(
            "{m} detected photons exceed the {n} excited emitters"
        )));
    }
    if m == 0 || m > method.max_order() {
        return Err(Error::invalid(format!(
            "correlation order {m} outside 1..={} for {method:?}",
            method.max_order()
        )));
    }
    let u = matrix.entries();
    let mut scratch = vec![num_complex::Complex64::default(); m];
    let mut total = 0.0;
    for rows in ColexSubsets::new(n, m) {
        let entry = |i: usize, j: usize| u[[rows[i], j]];
        let amp = match method {
            PermanentMethod::Ryser => permanent::ryser(m, entry, &mut scratch),
            PermanentMethod::Naive => permanent::naive(m, entry),
        };
        total += amp.norm_sqr();
    }
    clamp_nonneg(total)
}

/// `m`-element subsets of `0..n` in colexicographic order.
struct ColexSubsets {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl ColexSubsets {
    fn new(n: usize, m: usize) -> Self {
        ColexSubsets {
            n,
            current: (0..m).collect(),
            done: m > n,
        }
    }
}

impl Iterator for ColexSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let m = self.current.len();
        // Bump the lowest element that has room, reset everything below it.
        let mut i = 0;
        loop {
            if i == m {
                self.done = true;
                break;
            }
            let limit = if i + 1 < m { self.current[i + 1] } else { self.n };
            if self.current[i] + 1 < limit {
                self.current[i] += 1;
                for (k, c) in self.current[..i].iter_mut().enumerate() {
                    *c = k;
                }
                break;
            }
            i += 1;
        }
        Some(out)
    }
}

/// `G^(m)` as `|| E+(theta_m) ... E+(theta_1) |S_N> ||^2`.
///
/// With more detectors than atoms the state is annihilated and the result
/// is exactly zero rather than an error.
pub fn g_m_operator(chain: &EmitterChain, detectors: &DetectionConfig) -> Result<CorrelationResult> {
    let mut state = PureState::fully_excited(chain.n_emitters())?;
    for &theta in detectors.angles() {
        if state.is_zero() {
            break;
        }
        state = state.apply_field(theta, chain)?;
    }
    Ok(CorrelationResult {
        value: clamp_nonneg(state.norm_sq())?,
        route: Route::Operator,
        n: chain.n_emitters(),
        m: detectors.len(),
        angles: detectors.angles().to_vec(),
        kd: chain.kd(),
    })
}

/// `sin^2(N x) / sin^2(x)`, with the removable singularities at
/// `x = k pi` filled by the limit `N^2`.
pub fn dirichlet_ratio(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    let folded = x - PI * (x / PI).round();
    let s = folded.sin();
    if s.abs() < DIRICHLET_SINGULAR {
        return nf * nf;
    }
    let r = (nf * folded).sin() / s;
    r * r
}

/// Product `N! (m-1)! / (N-m)!` as a float.
fn closed_form_prefactor(n: usize, m: usize) -> f64 {
    let falling: f64 = ((n - m + 1)..=n).map(|k| k as f64).product();
    let fact: f64 = (1..m).map(|k| k as f64).product();
    falling * fact
}

/// Closed-form `G^(m)(theta1, ..., theta1, theta2)` for `m - 1` detectors at
/// `theta1` and one at `theta2`:
///
/// `N!(m-1)!/(N-m)! * [ (N-m)/(N-1) + (m-1)/(N(N-1)) * D_N(delta/2) ]`
///
/// where `delta = kd (sin theta2 - sin theta1)` and `D_N` is
/// [`dirichlet_ratio`]. For `m = 1` the intensity is the constant `N`.
pub fn g_m_closed_form(n: usize, m: usize, theta1: f64, theta2: f64, kd: f64) -> Result<CorrelationResult> {
    if n < 2 {
        return Err(Error::invalid("closed form needs at least two emitters"));
    }
    if m == 0 || m > n {
        return Err(Error::invalid(format!("order m = {m} outside 1..={n}")));
    }
    geometry::check_angle(theta1)?;
    geometry::check_angle(theta2)?;
    geometry::check_kd(kd)?;

    let value = if m == 1 {
        n as f64
    } else {
        let nf = n as f64;
        let mf = m as f64;
        let delta = kd * (theta2.sin() - theta1.sin());
        let floor = (nf - mf) / (nf - 1.0);
        let fringe = (mf - 1.0) / (nf * (nf - 1.0)) * dirichlet_ratio(n, 0.5 * delta);
        closed_form_prefactor(n, m) * (floor + fringe)
    };
    let mut angles = vec![theta1; m - 1];
    angles.push(theta2);
    Ok(CorrelationResult {
        value: clamp_nonneg(value)?,
        route: Route::ClosedForm,
        n,
        m,
        angles,
        kd,
    })
}

/// Fringe visibility `(m-1) / (m + 1 - 2m/N)` of the closed-form pattern.
pub fn visibility_closed_form(n: usize, m: usize) -> Result<f64> {
    if n < 2 || m == 0 || m > n {
        return Err(Error::invalid(format!(
            "visibility needs n >= 2 and 1 <= m <= n, got n={n}, m={m}"
        )));
    }
    let nf = n as f64;
    let mf = m as f64;
    Ok((mf - 1.0) / (mf + 1.0 - 2.0 * mf / nf))
}

/// Predicted full width at half maximum of the central peak, `2 pi / (N kd)`.
pub fn fwhm_predicted(n: usize, kd: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("peak width needs at least two emitters"));
    }
    geometry::check_kd(kd)?;
    Ok(2.0 * PI / (n as f64 * kd))
}

/// Mean intensity at `theta2` emitted by a normalized register state.
pub fn g1_conditional(state: &PureState, theta2: f64, chain: &EmitterChain) -> Result<f64> {
    if !state.is_normalized() {
        return Err(Error::invalid(format!(
            "state must be normalized, norm^2 = {}",
            state.norm_sq()
        )));
    }
    clamp_nonneg(state.apply_field(theta2, chain)?.norm_sq())
}
