use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// Numerical failures carry enough context for the CLI to report the
/// module and the category on stderr.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of the Gamma function at x = {0}")]
    Pole(f64),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("precision loss: {0}")]
    PrecisionLoss(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("unbound variable `{0}`")]
    UnboundVariable(&'static str),

    #[error("unsupported derivative: {0}")]
    UnsupportedDerivative(String),

    #[error("order error: {0}")]
    Order(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("series truncation failed: tail {tail:e} exceeds tolerance at K = {k_max}")]
    Truncation { tail: f64, k_max: usize },

    #[error("monotonicity violated: {0}")]
    Monotonicity(String),

    #[error("solution blew up at step {step} (|x| = {value:e})")]
    BlowUp { step: usize, value: f64 },
}

impl Error {
    /// Short machine-readable category, used on the CLI diagnostic stream.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Pole(_) => "pole",
            Error::Overflow(_) => "overflow",
            Error::PrecisionLoss(_) => "precision-loss",
            Error::Syntax { .. } => "syntax",
            Error::UnknownIdentifier { .. } => "unknown-identifier",
            Error::UnboundVariable(_) => "unbound-variable",
            Error::UnsupportedDerivative(_) => "unsupported-derivative",
            Error::Order(_) => "order",
            Error::NonFinite(_) => "non-finite",
            Error::Singular(_) => "singular",
            Error::Truncation { .. } => "truncation",
            Error::Monotonicity(_) => "monotonicity",
            Error::BlowUp { .. } => "blow-up",
        }
    }

    /// Library module the error originates from.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Pole(_) | Error::Overflow(_) | Error::PrecisionLoss(_) => "specfun",
            Error::Syntax { .. }
            | Error::UnknownIdentifier { .. }
            | Error::UnboundVariable(_)
            | Error::UnsupportedDerivative(_) => "exprlang",
            Error::Truncation { .. } | Error::Monotonicity(_) => "gronwall",
            Error::BlowUp { .. } => "fde",
            Error::Domain(_) | Error::Order(_) | Error::NonFinite(_) | Error::Singular(_) => {
                "operators"
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
