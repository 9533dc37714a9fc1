use thiserror::Error;

/// Which side of an identity an evaluator failure came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lhs,
    Rhs,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Lhs => f.write_str("left-hand side"),
            Side::Rhs => f.write_str("right-hand side"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QError {
    #[error("invalid base q = {0}: require 0 < q < 1")]
    InvalidBase(f64),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("overflow in {0}")]
    Overflow(&'static str),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("divergent series: |argument| = {0} >= 1 and no numerator parameter terminates it")]
    Divergent(f64),

    #[error("denominator parameter vanishes: (b;q)_{index} with b = {param} hits q^-{index}")]
    DenominatorPole { param: String, index: usize },

    #[error("accuracy {target:e} unreachable within {terms} terms")]
    AccuracyUnreachable { target: f64, terms: usize },

    #[error("no term-ratio bound below 1 found within {0} scanned indices")]
    NoRatioBound(usize),

    #[error("quadrature did not converge with {nodes} nodes (last delta {delta:e})")]
    QuadratureNotConverged { nodes: usize, delta: f64 },

    #[error("value expected to be real has imaginary part {im:e} (|value| = {abs:e})")]
    NotReal { im: f64, abs: f64 },

    #[error("internal cross-check failed in {what}: {a} vs {b}")]
    CrossCheck { what: &'static str, a: String, b: String },

    #[error("degree {0} exceeds the supported cap")]
    DegreeCap(usize),

    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),

    #[error("unknown reduction {0:?}")]
    UnknownReduction(String),

    #[error("parameter slot {0} is not set")]
    MissingSlot(&'static str),

    #[error("{side} evaluation failed: {source}")]
    Evaluator { side: Side, source: Box<QError> },

    #[error("could not sample an in-domain point for {0} after {1} attempts")]
    Sampling(String, usize),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, QError>;
