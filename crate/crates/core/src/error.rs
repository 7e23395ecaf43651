use num_complex::Complex64;
use thiserror::Error;

/// Errors raised across wave construction, stability analysis and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("cubic has a degenerate leading coefficient")]
    DegenerateLeadingCoefficient,

    #[error("characteristic root classification failed: {0}")]
    Classification(String),

    #[error("h(s) has a non-negligible imaginary part ({im:e}) at s = {s}")]
    NonRealResult { s: f64, im: f64 },

    #[error("h(s) has no root in (0, 1): no localized wave at c = {c}")]
    NoRoot { c: f64 },

    #[error("h(s) changes sign {count} times in (0, 1) at c = {c}")]
    MultipleRoots { c: f64, count: usize },

    #[error("threshold a = {0} is not positive")]
    NonPositiveThreshold(f64),

    #[error("threshold a = {given} is not on the speed curve (c gives a = {derived})")]
    ThresholdMismatch { given: f64, derived: f64 },

    #[error("fundamental matrix is singular (coalescent characteristic roots)")]
    SingularFundamentalMatrix,

    #[error("Heaviside ansatz violated: {0}")]
    HeavisideViolation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no speed on the grid admits a localized wave")]
    EmptyCurve,

    #[error("speed curve has no interior maximum")]
    MonotoneCurve,

    #[error("sign pattern Re(b3) > 0 > Re(b1), Re(b2) fails at lambda = {0}")]
    PatternBreakdown(Complex64),

    #[error("coalescent beta roots at lambda = {0}")]
    CoalescentBeta(Complex64),

    #[error("lambda branch jump of {jump:e} at k = {k}")]
    BranchJump { k: f64, jump: f64 },

    #[error("Evans function vanishes on the contour (min |E| = {min_abs:e})")]
    ZeroOnContour { min_abs: f64 },

    #[error("E({lambda}) has imaginary part {im:e} on the real axis")]
    NonRealOnRealAxis { lambda: f64, im: f64 },

    #[error("simulation domain too small: {0}")]
    DomainTooSmall(String),

    #[error("time step {dt:e} exceeds the stability limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("no threshold crossing found: wave lost")]
    WaveLost,

    #[error("config error for `{key}`: {msg}")]
    Parse { key: String, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
