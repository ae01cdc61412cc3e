use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received parameters outside its domain.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("law is not full on R^{dim}: {reason}")]
    NotFull { dim: usize, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("law is not supported on the nonnegative orthant")]
    NotNonnegative,

    #[error("no closed form available for {0}")]
    NoClosedForm(String),

    /// Product truncation did not reach its tolerance; carries the partial value.
    #[error("product did not converge within {terms} terms (partial value {re} + {im}i, tail bound {bound})")]
    ProductNotConverged { terms: usize, re: f64, im: f64, bound: f64 },

    #[error("window [{n_min}, {n_max}] overflows: a^n_max exceeds 1e300")]
    WindowOverflow { n_min: i64, n_max: i64 },

    #[error("window too short: {0}")]
    WindowTooShort(String),

    #[error("type-A gauge construction failed: {0}")]
    GaugeConstruction(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { field: field.to_string(), reason: reason.into() }
}
