//! Radial coordinate and radial momentum uncertainties for bound states in
//! central potentials (ħ = m = 1).
//!
//! * [`special_math`]: Laguerre polynomials, log-factorials, quadrature.
//! * [`hydrogen`]: exact rational moments and closed-form uncertainties.
//! * [`radial_numerics`]: grid expectation values and the Weyl scan.
//! * [`min_state`]: the Gaussian-over-r state that saturates the bound.
//! * [`central_solver`]: Numerov shooting for arbitrary central potentials.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod central_solver;
pub mod error;
pub mod hydrogen;
pub mod min_state;
pub mod radial_numerics;
pub mod special_math;

pub use central_solver::{BoundStateSolution, PotentialKind, PotentialSpec};
pub use error::{Error, Result};
pub use hydrogen::{MomentTable, QuantumNumbers, UncertaintyReport};
pub use min_state::GaussianRadialState;
pub use radial_numerics::{RadialGrid, SampledRadialFunction, WeylScanResult};
pub use special_math::QuadratureRule;

/// The uncertainty bound ħ²/4 in units with ħ = 1.
pub const HBAR_SQ_OVER_4: f64 = 0.25;

/// Crate version, recorded in machine-readable CLI output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
