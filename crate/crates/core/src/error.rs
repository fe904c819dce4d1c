use thiserror::Error;

/// A violated precondition on instance parameters.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("strings must have equal length, got |x|={x} and |y|={y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("parameter constraint violated: {0}")]
    Violated(String),
}

impl ParamError {
    pub(crate) fn violated(msg: impl Into<String>) -> Self {
        ParamError::Violated(msg.into())
    }
}

/// Failure of an end-to-end tester.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TesterError {
    #[error(transparent)]
    Params(#[from] ParamError),
    /// No recursion depth up to the configured cap admits the instance.
    #[error(
        "unsupported regime: no depth h <= {h_max} admits beta={beta} \
         (largest admissible beta is {max_beta:.3})"
    )]
    UnsupportedRegime {
        beta: usize,
        h_max: u32,
        max_beta: f64,
    },
}

/// Errors from instance generation, configuration and record I/O.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unsatisfiable instance spec: {0}")]
    Unsatisfiable(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}
