//! Error taxonomy shared by every module.
//!
//! Each variant carries a stable machine-readable code (see [`Error::code`])
//! that the CLI reproduces verbatim in its JSON output.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input text does not conform to the expression grammar.
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    /// A function name was not applied to exactly one parenthesized argument.
    #[error("arity error at byte {pos}: {msg}")]
    Arity { pos: usize, msg: String },

    /// A `log` or `pow` argument is not eventually positive, so the term does
    /// not denote a germ.
    #[error("domain error: {0}")]
    Domain(String),

    /// The zero-equivalence / sign semi-decision exhausted its precision and
    /// rewrite budget.
    #[error("undecided: {0}")]
    Undecided(String),

    /// An operation that requires an eventually positive germ was handed one
    /// that is not.
    #[error("positivity error: {0}")]
    Positivity(String),

    /// A recursion guard tripped; either the input is adversarial or there is
    /// a bug in the engine.
    #[error("recursion depth exceeded: {0}")]
    DepthExceeded(String),

    /// The purely-infinite/bounded split (or grading) cannot be computed by
    /// rewriting within the fragment.
    #[error("undecomposable: {0}")]
    Undecomposable(String),

    /// Numeric evaluation overflowed or ran out of precision at the maximal
    /// configured precision.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// The given real domain is not a standard domain.
    #[error("not a standard domain")]
    NotStandardDomain,

    /// The given bound germ is not infinitely increasing.
    #[error("bound is not infinitely increasing")]
    NotInfinitelyIncreasing,

    /// An addition node passed through zero along the path; the lift to the
    /// Riemann surface of the logarithm is undefined there.
    #[error("branch collision: {0}")]
    BranchCollision(String),

    /// A `log` node was evaluated where its chart is invalid (argument with
    /// modulus at most 1).
    #[error("domain violation: {0}")]
    DomainViolation(String),

    /// The numeric level oracle found no iterated-exponential sandwich.
    #[error("no sandwich found")]
    NoSandwichFound,

    /// The value is the zero germ, for operations defined on nonzero germs.
    #[error("zero germ: {0}")]
    ZeroGerm(String),

    /// The computation leaves the implemented fragment (for example an
    /// expansion coefficient that is not exactly representable).
    #[error("unsupported in fragment: {0}")]
    Unsupported(String),
}

impl Error {
    /// Stable machine-readable code for CLI payloads.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::Arity { .. } => "arity",
            Error::Domain(_) => "domain",
            Error::Undecided(_) => "undecided",
            Error::Positivity(_) => "positivity",
            Error::DepthExceeded(_) => "depth-exceeded",
            Error::Undecomposable(_) => "undecomposable",
            Error::PrecisionExhausted(_) => "precision-exhausted",
            Error::NotStandardDomain => "not-standard-domain",
            Error::NotInfinitelyIncreasing => "not-infinitely-increasing",
            Error::BranchCollision(_) => "branch-collision",
            Error::DomainViolation(_) => "domain-violation",
            Error::NoSandwichFound => "no-sandwich-found",
            Error::ZeroGerm(_) => "zero-germ",
            Error::Unsupported(_) => "unsupported",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
