use thiserror::Error;

/// Everything that can go wrong while building or running a solve.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GardnerError {
    /// The exponential spline needs `zeta > 0` and `h > 0`, both finite.
    #[error("basis parameters out of domain: zeta = {zeta}, h = {h} (both must be finite and > 0)")]
    InvalidBasisParameters { zeta: f64, h: f64 },

    /// `mu3 = 0` removes the dispersive term and with it the whole scheme.
    #[error("dispersion coefficient mu3 must be nonzero")]
    DegenerateDispersion,

    #[error("invalid grid: a = {a}, b = {b}, N = {n} (need a < b and N >= 4)")]
    InvalidGrid { a: f64, b: f64, n: usize },

    #[error("invalid time parameters: dt = {dt}, t_end = {t_end} (need dt > 0 and t_end >= 0)")]
    InvalidTimeParameters { dt: f64, t_end: f64 },

    /// Point evaluation requested outside the spatial domain.
    #[error("x = {x} lies outside the domain [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },

    /// An error norm was requested for a problem with no closed-form solution.
    #[error("problem has no analytical solution; error norms are unavailable")]
    MissingAnalyticalSolution,

    /// The banded factorization met a pivot below `1e-14` times its row scale.
    #[error("numerical breakdown at step {step}: pivot {pivot:e} in row {row} below threshold")]
    NumericalBreakdown { step: usize, row: usize, pivot: f64 },

    /// Defensive guard; cannot occur for alpha1 in (0, 1/2).
    #[error("initialization system singular at row {row}")]
    SingularInitialization { row: usize },

    #[error("zeta scan failed: every scan point failed")]
    EmptyScan,

    /// Size mismatch between a state and the structures derived from a spec.
    #[error("dimension mismatch: state holds {state_len} coefficients, grid wants {expected}")]
    DimensionMismatch { state_len: usize, expected: usize },
}
