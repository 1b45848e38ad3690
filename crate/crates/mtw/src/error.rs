//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in the library.
///
/// Validation failures name the violated invariant; numeric failures name the
/// kernel that gave up. The CLI maps validation errors to exit code 1 and
/// numeric errors to exit code 2.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    // ---- parameter validation -------------------------------------------
    #[error("K must be finite and nonnegative, got {0}")]
    InvalidK(f64),
    #[error("mu must be finite and positive, got {0}")]
    InvalidMu(f64),
    #[error("mean SNR must be finite and positive, got {0}")]
    InvalidMeanSnr(f64),
    #[error("delta[{index}] = {value} lies outside [0, 1]")]
    DeltaOutOfRange { index: usize, value: f64 },
    #[error("sum of delta exceeds 1 (sum = {0})")]
    DeltaSumExceedsOne(f64),
    #[error("invalid numeric policy: {0}")]
    InvalidPolicy(&'static str),

    // ---- numeric kernels --------------------------------------------------
    #[error("{func}: argument outside domain ({msg})")]
    Domain {
        func: &'static str,
        msg: &'static str,
    },
    #[error("{func}: iteration cap hit before convergence")]
    ConvergenceCap { func: &'static str },
    #[error("integral dimension {n} exceeds policy maximum {max}; use the series form")]
    DimensionTooHigh { n: usize, max: usize },
    #[error("s = {s} too close to the MGF pole at {pole}")]
    PoleProximity { s: f64, pole: f64 },
    #[error("combinatorial guard: r + M = {got} exceeds cap {cap}")]
    CombinatorialCap { got: usize, cap: usize },

    // ---- simulator ---------------------------------------------------------
    #[error("simulator requires integer mu >= number of two-specular clusters (mu = {mu}, N = {n})")]
    NonIntegerMu { mu: f64, n: usize },
    #[error("cannot split specular power for cluster {index}: negative discriminant")]
    InfeasibleSplit { index: usize },
    #[error("sample set is empty")]
    EmptySamples,

    // ---- fitting / io -------------------------------------------------------
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { got: usize, min: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("negative or non-finite sample at line {line}")]
    BadSample { line: usize },
    #[error("input contains no samples")]
    EmptyInput,
    #[error("csv column {0:?} not found")]
    MissingColumn(String),
    #[error("i/o error: {0}")]
    Io(String),

    // ---- composite model ----------------------------------------------------
    #[error("IG shape lambda must be an integer >= 2, got {0}")]
    InvalidLambda(f64),
    #[error("composite model requires unit mean SNR in the MTW parameters (got {0})")]
    CompositeMeanSnr(f64),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
