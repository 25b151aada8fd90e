use num_complex::Complex64;
use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix has determinant {0}, expected 1")]
    Determinant(i64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("sheet index {k} out of range 1..={max}")]
    IndexOutOfRange { k: u64, max: u64 },

    #[error("integer overflow while multiplying group elements")]
    Overflow,

    #[error("derivative pole at t = {0}")]
    DerivativePole(f64),

    #[error("pole without decay data at t = {0}")]
    PoleWithoutDecay(f64),

    #[error("sample point {point} outside domain {domain}")]
    OutsideDomain { point: f64, domain: String },

    #[error("mapped sample point outside the closed source interval (row {row}, col {col}, v = {v})")]
    TermCorrespondence { row: usize, col: usize, v: f64 },

    #[error("chart mismatch: {0}")]
    ChartMismatch(String),

    #[error("junction at {0} falls on a chart singularity")]
    JunctionSingular(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("assembly failed at s = {s}: {source}")]
    Assembly {
        s: Complex64,
        #[source]
        source: Box<Error>,
    },

    #[error("no interior minimum in bracket [{lo}, {hi}]")]
    NoInteriorMinimum { lo: f64, hi: f64 },

    #[error("no kernel detected: sigma_min = {sigma_min:e} exceeds threshold {threshold:e}")]
    NoKernel { sigma_min: f64, threshold: f64 },

    #[error("period function residual {residual:e} above threshold {threshold:e}")]
    ResidualTooLarge { residual: f64, threshold: f64 },

    #[error("path leaves the upper half-plane at {0}")]
    OutsideUpperHalfPlane(Complex64),

    #[error("model has no cuspidal decay but the path has a boundary endpoint")]
    NonDecaying,

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
