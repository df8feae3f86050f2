use thiserror::Error;

/// Errors raised by parameter validation and solution evaluation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("level spacing must be positive and finite, got {0}")]
    InvalidSpacing(f64),

    #[error("parameter `{0}` must be finite")]
    NonFinite(&'static str),

    #[error("truncation half-width n_max must be at least 1")]
    EmptyBasis,

    #[error("rescaled time must be finite and non-negative, got {0}")]
    InvalidTime(f64),

    #[error("T = {t} activates {needed} kick terms but k_max = {k_max}")]
    KMaxTooSmall { t: f64, needed: usize, k_max: usize },

    #[error("initial state has total probability {0}, expected 1")]
    NotNormalized(f64),

    #[error("initial state has zero norm")]
    ZeroState,

    #[error("level {0} listed more than once in initial state")]
    DuplicateLevel(i64),

    #[error("level {n} lies outside the truncation window [{lo}, {hi}]")]
    LevelOutOfWindow { n: i64, lo: i64, hi: i64 },

    #[error("the zero-detuning formula needs delta_g = 0, got {0}")]
    NonzeroDetuning(f64),

    #[error("first-window formulas hold for 0 <= T <= 1, got {0}")]
    OutsideFirstWindow(f64),

    #[error("cannot condition on the quasi-continuum: survival probability is {0}")]
    DegenerateCollapse(f64),

    #[error("integrator step must be positive and finite, got {0}")]
    InvalidStep(f64),

    #[error("norm drift {drift:.3e} exceeds budget {budget:.3e}")]
    NormDrift { drift: f64, budget: f64 },

    #[error("time grid must be finite and strictly ascending")]
    InvalidGrid,
}

pub type Result<T> = std::result::Result<T, Error>;
