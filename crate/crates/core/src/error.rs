use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// An iterative solver or quadrature did not reach its tolerance.
    #[error("{what} did not converge (residual {residual:e})")]
    NonConvergence { what: &'static str, residual: f64 },

    /// The region predicate still held at the rigorous outer radius.
    #[error("radial bracket failure: predicate holds at bounding radius {radius}")]
    BracketFailure { radius: f64 },

    #[error("class {representative:?} is not separable at fine tolerance (spread {spread:e})")]
    DegenerateClass {
        representative: (usize, usize),
        spread: f64,
    },

    #[error("{scenario}: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown reference table '{0}'")]
    UnknownTable(String),

    #[error("corrupted reference data: {0}")]
    CorruptTable(String),

    #[error("no result supplied for table row {0}")]
    MissingScenario(String),

    #[error("expression error: {0}")]
    Expression(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Wraps the error with the identity of the scenario that produced it.
    pub fn in_scenario(self, scenario: impl Into<String>) -> Self {
        Error::Scenario {
            scenario: scenario.into(),
            source: Box::new(self),
        }
    }

    /// True for failures of a numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NonConvergence { .. } | Error::BracketFailure { .. } | Error::DegenerateClass { .. } => true,
            Error::Scenario { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
