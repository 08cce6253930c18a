use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    #[error("invalid axis {axis} for a chart with {nvars} coordinates")]
    InvalidAxis { axis: usize, nvars: usize },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("chart mismatch: {0}")]
    ChartMismatch(String),

    #[error("degree underflow: cannot contract a degree-{form} form with a degree-{vector} polyvector")]
    DegreeUnderflow { form: usize, vector: usize },

    #[error("invalid multi-index: {0}")]
    InvalidIndex(String),

    #[error("form is not invariant under the Reeb flow: offending term {0}")]
    NotReebInvariant(String),

    #[error("contact condition violated: {0}")]
    ContactViolation(String),

    #[error("not a cs potential: {0}")]
    NotCsPotential(String),

    #[error("substitution is not cs-compatible: {0}")]
    NotCsCompatible(String),

    #[error("input is not primitive: {0}")]
    NotPrimitive(String),

    #[error("not a complex: composite of degrees {degree} -> {next} is nonzero")]
    NotAComplex { degree: usize, next: usize },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
