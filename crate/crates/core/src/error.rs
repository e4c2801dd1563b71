use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("pole of {name} at s = {s}")]
    Pole { name: String, s: Complex64 },

    #[error("accuracy {target:e} unreachable at s = {s} (best error estimate {achieved:e})")]
    DegradedAccuracy { s: Complex64, target: f64, achieved: f64 },

    #[error("{what} leaves the double-precision range at s = {s}")]
    Overflow { what: String, s: Complex64 },

    #[error("evaluation at s = {s} needs {needed} coefficients, only {available} available")]
    InsufficientCoefficients {
        s: Complex64,
        needed: usize,
        available: usize,
    },

    #[error("unsupported weight {0}; supported weights are 12, 18, 22, 26 (Eisenstein: 4, 6)")]
    UnsupportedWeight(u32),

    #[error("unknown instance `{0}`; known instances: zeta, zeta2, cusp12, cusp18, cusp22, cusp26")]
    UnknownInstance(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("xi vanishes at s = {0}")]
    ZeroOfXi(Complex64),

    #[error(
        "missed zeros: found {found} up to T = {height}, counting estimate {expected:.3}; \
         suspect interval [{suspect_lo:.6}, {suspect_hi:.6}]"
    )]
    MissedZeros {
        found: usize,
        expected: f64,
        height: f64,
        suspect_lo: f64,
        suspect_hi: f64,
    },

    #[error("central multiplicity indeterminate: scaled derivatives up to order {0} all below tolerance")]
    IndeterminateMultiplicity(usize),

    #[error("zero table line {line}: {msg}")]
    ZeroTable { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
