//! Error type shared across the crate.

use crate::rational::Rational;

/// Everything that can go wrong while evaluating or validating a game.
///
/// Evaluation closures (forecasting systems, capital processes) return this
/// error so that partial inputs — exhausted outcome streams, degenerate
/// forecast steps — surface as values rather than panics.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// An interval endpoint left `[0, 1]`, or the endpoints were out of order.
    #[error("invalid interval forecast [{lo}, {hi}]: endpoints must satisfy 0 <= lo <= hi <= 1")]
    InvalidInterval { lo: Rational, hi: Rational },

    /// A probability argument left `[0, 1]`.
    #[error("probability {p} lies outside [0, 1]")]
    ProbabilityOutOfRange { p: Rational },

    /// An epsilon parameter left the open interval `(0, 1)`.
    #[error("epsilon {eps} lies outside (0, 1)")]
    EpsilonOutOfRange { eps: Rational },

    /// A stream was asked for an element past its end.
    #[error("stream exhausted at index {index} (length {len})")]
    StreamExhausted { index: usize, len: usize },

    /// A capital operation hit a step whose point forecast excludes the
    /// recorded outcome, so betting odds against it are unbounded.
    #[error("degenerate step {step}: forecast {forecast} excludes outcome {outcome}")]
    DegenerateStep {
        step: usize,
        forecast: String,
        outcome: u8,
    },

    /// An operation that requires a nowhere-degenerate forecasting system was
    /// handed one that pins an outcome at some node.
    #[error("forecasting system is degenerate at node {node}: emits {forecast}")]
    DegenerateSystem { node: String, forecast: String },

    /// An operation that only makes sense for systems declared non-degenerate
    /// was handed one without that declaration.
    #[error("{op} requires a forecasting system declared non-degenerate")]
    NondegeneracyRequired { op: String },

    /// A starting capital or process value was negative where a non-negative
    /// one is required.
    #[error("negative capital {value} at {place}")]
    NegativeCapital { value: Rational, place: String },

    /// Mixture weights must be positive and sum to at most one.
    #[error("invalid mixture weights: {reason}")]
    InvalidWeights { reason: String },

    /// A validation or scan was asked to range over an empty alphabet.
    #[error("forecast alphabet is empty")]
    EmptyAlphabet,

    /// The greedy path builder met a node where every allowed continuation
    /// increases capital, i.e. the process is not a superfarthingale there.
    #[error("superfarthingale inequality fails at node {node}: child values {child0} / {child1} exceed parent value {parent}")]
    NotSuperfarthingaleAt {
        node: String,
        parent: Rational,
        child0: Rational,
        child1: Rational,
    },

    /// An adaptive approximation loop failed to reach its target accuracy
    /// within the iteration guard.
    #[error("precision exhausted in {place} after {iterations} refinement steps")]
    PrecisionExhausted { place: String, iterations: u32 },

    /// Logarithm bounds were requested for a non-positive argument.
    #[error("logarithm bounds require a positive argument, got {value}")]
    LogOfNonPositive { value: Rational },

    /// Textual input (rational, forecast file, table file, ...) failed to parse.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// Shorthand for a parse error with a 1-based line number.
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
