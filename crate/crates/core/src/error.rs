use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown variable `{name}` at {line}:{column}")]
    UnknownVariable {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("non-rational literal `{text}` at {line}:{column}")]
    NonRationalLiteral {
        text: String,
        line: usize,
        column: usize,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("formula contains an existential block; eliminate it first")]
    Quantified,
    #[error("atom polynomial `{0}` is not in the polynomial set")]
    AtomOutsidePolySet(String),
    #[error("thresholds must satisfy 0 < d < c (got c = {c}, d = {d})")]
    Thresholds { c: String, d: String },
    #[error("polynomial set has {count} members; the sign-condition enumeration cap is {cap}")]
    TooManyPolynomials { count: usize, cap: usize },
    #[error("atom mentions variable `{0}` outside the substituted block")]
    ForeignVariable(String),
    #[error("interval endpoints must satisfy a < b (got a = {a}, b = {b})")]
    EmptyRange { a: String, b: String },
    #[error("not a subcomplex: {0}")]
    NotSubcomplex(String),
    #[error("vertex map is not simplicial: {0}")]
    NotSimplicial(String),
    #[error("dimension {index} out of range 1..={max}")]
    DimensionOutOfRange { index: usize, max: usize },
    #[error("inconsistent zigzag module: {0}")]
    Shape(String),
    #[error("witness search failed: {0}")]
    Witness(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Format(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
