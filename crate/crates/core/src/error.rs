use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown representation `{name}` (known: {known})")]
    UnknownRepresentation { name: String, known: String },

    #[error("representation `{name}` is not admissible: {reason}")]
    InadmissibleRepresentation { name: String, reason: String },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid chirality sign {0}; expected +1 or -1")]
    InvalidSign(i32),

    #[error("chiral basis rejected: {0}")]
    InvalidBasis(String),

    #[error("Lorentz parameters rejected: {0}")]
    InvalidLorentzParameters(String),

    #[error("unknown field `{name}` (known: {known})")]
    UnknownField { name: String, known: String },

    #[error("field `{field}`: {reason}")]
    InvalidFieldParams { field: String, reason: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("insufficient margin on trim axis {axis}: extent {extent}, margin ({lo}, {hi})")]
    MarginExhausted {
        axis: usize,
        extent: usize,
        lo: usize,
        hi: usize,
    },

    #[error(
        "degenerate field for this xi: the bilinear xi-bar F xi^c vanishes on the whole grid \
         (the reduction requires it not to vanish identically)"
    )]
    DegenerateField,

    #[error("unmasked coverage {coverage:.4} is below the required {required:.2}")]
    CoverageShortfall { coverage: f64, required: f64 },

    #[error("invalid evolution problem: {0}")]
    InvalidProblem(String),

    #[error("singular Crank-Nicolson step matrix at step {step}")]
    SingularStep { step: usize },

    #[error("convergence study needs at least {needed} levels, got {got}")]
    TooFewLevels { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed grid dump: {0}")]
    MalformedDump(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
