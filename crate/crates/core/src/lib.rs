//! Multi-photon correlation functions for chains of independent, initially
//! fully excited two-level emitters observed in the far field.
//!
//! The m-th order correlation `G^(m)` is available through three
//! independent routes that must agree:
//!
//! * [`correlations::g_m_paths`]: sum over atom subsets of squared
//!   permanents of the phase submatrix (coherent quantum paths).
//! * [`correlations::g_m_operator`]: squared norm of the register state
//!   after successive applications of the far-field lowering operator.
//! * [`correlations::g_m_closed_form`]: the grating-like closed form for
//!   `m - 1` detectors at one angle and the last detector elsewhere.
//!
//! [`analysis`] turns these into angle sweeps with peak-width and visibility
//! estimators, and [`cli`] exposes everything on the command line.

pub mod analysis;
pub mod cli;
pub mod correlations;
pub mod error;
pub mod geometry;
pub mod state;

pub use error::{Error, Result};
pub use geometry::{DetectionConfig, EmitterChain, PhaseMatrix};
pub use state::PureState;

pub use num_complex::Complex64;
