//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operator is not Hermitian (max deviation {max_dev:.3e})")]
    NonHermitian { max_dev: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "ambiguous eigenvalue grouping: cluster diameter {diameter:.3e} exceeds \
         10 x grouping tolerance {tol:.3e}"
    )]
    AmbiguousGrouping { diameter: f64, tol: f64 },

    #[error(
        "ambiguous Bohr-frequency binning: cluster around {omega:.6e} has diameter \
         {diameter:.3e} (tolerance {tol:.3e}, noise floor {noise_floor:.3e})"
    )]
    AmbiguousBinning {
        omega: f64,
        diameter: f64,
        tol: f64,
        noise_floor: f64,
    },

    #[error("invalid stabilizer code: {0}")]
    InvalidCode(String),

    #[error("no logical operator defined for label {label}")]
    MissingLogical { label: String },

    #[error("malformed logical-operator map: {0}")]
    MalformedLogicals(String),

    #[error("coupling matrix is not positive semi-definite (min eigenvalue {min_eig:.3e})")]
    NotPositiveSemidefinite { min_eig: f64 },

    #[error(
        "principal-value quadrature did not converge at omega = {omega:.6e} \
         (last refinement changed the value by {last_change:.3e})"
    )]
    QuadratureNonConvergence { omega: f64, last_change: f64 },

    #[error("code fails to detect coupling terms: {summary}")]
    DetectionViolation { summary: String },

    #[error("initial state is not supported on the ground subspace (residual {residual:.3e})")]
    StateNotInGroundSubspace { residual: f64 },

    #[error("initial state is not a density operator: {0}")]
    InvalidState(String),

    #[error("integrator rejected the run: {0}")]
    IntegratorUnstable(String),

    #[error("ground-level rank changes inside the finite-difference stencil")]
    RankChangeInStencil,

    #[error("level {level} straddles the codespace (codespace overlap {overlap:.3e} of rank {rank})")]
    AmbiguousLevel {
        level: usize,
        overlap: f64,
        rank: usize,
    },

    #[error("encoded pure-state rates disagree: R = {r:.12e}, R' = {r_prime:.12e}")]
    RateEqualityViolation { r: f64, r_prime: f64 },

    #[error("sweep grid needs at least {min} points, got {got}")]
    GridTooSmall { min: usize, got: usize },

    #[error(
        "target rate {target:.6e} unreachable: |R| = {rate:.6e} at the maximum penalty {eta_max}"
    )]
    TargetUnreachable {
        target: f64,
        rate: f64,
        eta_max: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
