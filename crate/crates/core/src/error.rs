use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("incomplete fan: {0}")]
    Incomplete(String),

    #[error("{0:?} is not a cone of the fan")]
    NotAFace(Vec<usize>),

    #[error("degenerate wall relation: {0}")]
    DegenerateRelation(String),

    #[error("minimal model reached: no K+B-negative extremal class")]
    MinimalModelReached,

    #[error("flip guard exceeded after {0} flips")]
    FlipGuard(usize),

    #[error("surgery produced an invalid fan: {0}")]
    Surgery(String),

    #[error("boundary coefficient conflict over base ray {base_ray}: {detail}")]
    BoundaryConflict { base_ray: usize, detail: String },

    #[error("unsupported transport: {0}")]
    UnsupportedTransport(String),

    #[error("window enumeration found {found} objects, expected K0 rank {expected}")]
    Cardinality { found: usize, expected: usize },

    #[error("window re-representation failed: {0}")]
    Window(String),

    #[error("{0}")]
    Precondition(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("at {step}: {source}")]
    AtStep {
        step: String,
        #[source]
        source: Box<Error>,
    },

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub fn at(self, step: impl Into<String>) -> Error {
        Error::AtStep {
            step: step.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping step annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            e => e,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
