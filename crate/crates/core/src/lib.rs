//! Radial simulator and analytic certificates for the porous-medium equation
//! with spatially inhomogeneous strong absorption
//!
//! ```text
//! ∂ₜu = Δuᵐ − |x|^σ u^q,   m ≥ 1, 0 < q < 1, σ ≥ 0
//! ```
//!
//! The crate is split along the objects it manipulates:
//!
//! - [`model`]: exponents, the critical weight power σ*, the power-law
//!   supersolution certificate and the explicit smallness constants.
//! - [`initial_data`]: radial initial profiles and the admissibility checks
//!   for the flat-at-the-origin extinction class.
//! - [`solver`]: finite-volume radial grid, exact absorption sub-step,
//!   explicit degenerate diffusion and the Strang-split time loop.
//! - [`diagnostics`]: per-snapshot observables (sup, mass, support, origin
//!   value, comparison margin) and extinction/shrinking reports.
//! - [`oracles`]: closed-form ODE comparison solutions, extinction-time upper
//!   bounds and a manufactured solution for convergence studies.
//! - [`output`]: snapshot, trajectory CSV and JSON writers.

// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod initial_data;
pub mod model;
pub mod oracles;
pub mod output;
pub mod solver;

pub use error::{Error, Result};
pub use model::{CriticalExponent, ProblemParams, Regime, SupersolutionSpec};
