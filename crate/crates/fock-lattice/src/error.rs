//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("mode count must be at least 1 (got {0})")]
    InvalidModeCount(usize),

    #[error("mode index {j} out of range 1..={d}")]
    InvalidModeIndex { j: usize, d: usize },

    #[error("no sector below N=0 (operator would map out of the state space)")]
    NoLowerSector,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("basis mismatch: expected sector (d={expected_d}, N={expected_n}), got (d={got_d}, N={got_n})")]
    BasisMismatch {
        expected_d: usize,
        expected_n: u32,
        got_d: usize,
        got_n: u32,
    },

    #[error("operator is not Hermitian (max |A - A^dag| = {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("state norm {norm} deviates from 1 beyond tolerance")]
    NotNormalized { norm: f64 },

    #[error("(lambda1, lambda2) = ({l1}, {l2}) violates lambda1^2 + lambda2^2 = 1")]
    UnnormalizedPair { l1: f64, l2: f64 },

    #[error("density matrix trace {trace} deviates from 1 beyond tolerance")]
    BadTrace { trace: f64 },

    #[error("density matrix eigenvalue {min_eig:.3e} below -{tol:.0e}")]
    NotPositive { min_eig: f64, tol: f64 },

    #[error(
        "coherent-state truncation at N_max={n_max} discards weight {discarded:.3e} \
         (> {threshold:.0e}); N_max >= {required} needed"
    )]
    TruncationFailure {
        n_max: u32,
        discarded: f64,
        threshold: f64,
        required: u32,
    },

    #[error("operation requires d={required} modes (basis has d={got})")]
    WrongModeCount { required: usize, got: usize },

    #[error("modes must differ (got j=k={0})")]
    EqualModes(usize),

    #[error("drive frequency must be nonzero")]
    ZeroDriveFrequency,

    #[error("schedule is in {got} mode, operation requires {required}")]
    WrongScheduleMode {
        required: &'static str,
        got: &'static str,
    },

    #[error("invalid evolution spec: {0}")]
    InvalidEvolutionSpec(String),

    #[error("negative collapse rate {0}")]
    NegativeRate(f64),

    #[error("state norm drifted to {norm} at t={t} ns (tolerance {tol:.0e})")]
    NormDrift { norm: f64, t: f64, tol: f64 },

    #[error("trace drifted to {trace} at t={t} ns (tolerance {tol:.0e})")]
    TraceDrift { trace: f64, t: f64, tol: f64 },

    #[error("density matrix developed eigenvalue {min_eig:.3e} at t={t} ns")]
    PositivityLost { min_eig: f64, t: f64 },

    #[error("signal must be uniformly sampled (max grid deviation {0:.3e})")]
    NonUniformGrid(f64),

    #[error("signal too short: {got} samples, need at least {needed}")]
    SignalTooShort { got: usize, needed: usize },

    #[error("populations are not a distribution: {0}")]
    BadDistribution(String),

    #[error(
        "design matrix rank deficient: rank {rank} < {unknowns} unknowns \
         (condition estimate {condition:.3e}); refine the tau grid or displacement set"
    )]
    RankDeficient {
        rank: usize,
        unknowns: usize,
        condition: f64,
    },

    #[error("tomography plan too small: {points} displacements for max level {max_level}")]
    PlanTooSmall { points: usize, max_level: usize },

    #[error("phase readout ambiguous: {0}")]
    AmbiguousPhase(String),

    #[error("clustering ambiguous: {0}")]
    ClusterAmbiguity(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("unknown scenario id `{0}`")]
    UnknownScenario(String),

    #[error("linear algebra backend error: {0}")]
    Linalg(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
