use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("zero polynomial rejected: {0}")]
    ZeroInput(String),

    #[error("inputs not coprime, common factor {0}")]
    NotCoprime(String),

    #[error("denominator {denominator} does not divide the annihilator {annihilator}")]
    DenominatorOutsideModule {
        denominator: String,
        annihilator: String,
    },

    #[error("unknown copy tag {0}")]
    UnknownCopy(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("diagram invalid: {0}")]
    Invalid(String),

    #[error("unknown relation name {0}")]
    UnknownRelation(String),

    #[error("{fractional} fractional edges exceed {copies} copies")]
    TooFewCopies { fractional: usize, copies: usize },

    #[error("unsupported module component: no block attains the component order {0}")]
    UnsupportedComponent(String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
