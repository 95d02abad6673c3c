use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A quantity used as a divisor fell below its guard threshold.
    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),

    /// Input without the spread an estimator needs (zero variance, etc).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("integration diverged at step {step}: {detail}")]
    Diverged { step: usize, detail: String },

    /// Wraps an error raised while processing a particular step or record.
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn with_context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping any context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self.root(),
            Error::Diverged { .. } | Error::DegenerateDenominator(_) | Error::DegenerateInput(_)
        )
    }
}
