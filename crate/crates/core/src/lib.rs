//! Numerical laboratory for the rescaled lattice nonlinear-Schrödinger
//! ground-state equation on `[−Q, Q]`.
//!
//! * [`specfun`]: log-gamma, digamma, harmonic numbers, profile functions.
//! * [`quadrature`]: Gauss-Legendre rules.
//! * [`nystrom`]: density and Love-equation solves and their observables.
//! * [`spectral`]: eigenvalues of the truncated Lorentzian kernel.
//! * [`wienerhopf`]: the closed-form factorisation of `1 − e^{−|p|}`.
//! * [`asymptotics`]: constant extraction and expansion fits.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
mod linalg;
pub mod nystrom;
pub mod quadrature;
pub mod specfun;
pub mod spectral;
pub mod wienerhopf;

pub use num_complex;

pub use asymptotics::{FitResult, RichardsonResult, SweepRecord};
pub use error::{Error, Result};
pub use nystrom::{LoveOutput, PhysicalObservables, SolveOutput};
pub use quadrature::QuadratureRule;
pub use specfun::{ComplexValue, ProfileSample};
pub use spectral::SpectrumOutput;
pub use wienerhopf::WhFactorValue;
