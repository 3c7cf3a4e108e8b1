//! Exponential cubic B-spline collocation solver for the Gardner equation
//!
//! ```text
//! u_t + mu1*u*u_x + mu2*u^2*u_x + mu3*u_xxx = 0
//! ```
//!
//! The third-order equation is reduced to a first-order system with
//! `v = u_x`, both fields are expanded in an exponential cubic B-spline
//! basis with shape parameter `zeta`, and time stepping is linearized
//! Crank–Nicolson with a banded solve per step.  The crate provides
//!
//! - [`espline_basis`]: the basis functions, their nodal constants, and
//!   point evaluation that stays accurate down to vanishing `zeta*h`;
//! - [`problem_model`]: parameters, grid, and the three built-in benchmark
//!   problems (solitary pulse, kink, wave generation);
//! - [`solver_core`]: initial fit, step assembly, and the time loop;
//! - [`diagnostics`]: error norms, conserved quantities `M`/`E`/`H`,
//!   von Neumann amplification factors, and the shape-parameter scan;
//! - [`banded`]: the minimal banded LU the solver runs on.
//!
//! Everything is generic over the scalar type ([`scalar::Scalar`]); the
//! `*F64` aliases at the crate root fix `f64` for ordinary use.

pub mod banded;
pub mod diagnostics;
mod error;
pub mod espline_basis;
pub mod problem_model;
pub mod scalar;
pub mod solver_core;

pub use error::GardnerError;

/// Crate-wide result type.
pub type Result<T, E = GardnerError> = core::result::Result<T, E>;

pub type BasisConstantsF64 = espline_basis::BasisConstants<f64>;
pub type SplinePieceCoefficientsF64 = espline_basis::SplinePieceCoefficients<f64>;
pub type GardnerParametersF64 = problem_model::GardnerParameters<f64>;
pub type GridF64 = problem_model::Grid<f64>;
pub type ProblemSpecF64 = problem_model::ProblemSpec<f64>;
pub type SplineStateF64 = solver_core::SplineState<f64>;
pub type NodalValuesF64 = solver_core::NodalValues<f64>;
pub type BandedSystemF64 = solver_core::BandedSystem<f64>;
pub type ErrorReportF64 = diagnostics::ErrorReport<f64>;
pub type ConservationReportF64 = diagnostics::ConservationReport<f64>;
pub type AmplificationSampleF64 = diagnostics::AmplificationSample<f64>;
