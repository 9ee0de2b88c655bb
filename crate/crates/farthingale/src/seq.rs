//! Outcomes, situations, prequential situations, and input streams.
//!
//! A *situation* is a finite string of binary outcomes — a node of the full
//! binary event tree. A *prequential situation* interleaves the forecasts
//! that were announced with the outcomes that followed, which is all a
//! forecast-only skeptic ever sees.

use std::fmt;
use std::sync::Arc;

use crate::error::Error;
use crate::forecast::IntervalForecast;

/// A single binary outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Zero,
    One,
}

impl Outcome {
    pub fn bit(self) -> u8 {
        match self {
            Outcome::Zero => 0,
            Outcome::One => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Result<Self, Error> {
        match bit {
            0 => Ok(Outcome::Zero),
            1 => Ok(Outcome::One),
            _ => Err(Error::parse(0, format!("outcome must be 0 or 1, got {bit}"))),
        }
    }

    pub fn flip(self) -> Outcome {
        match self {
            Outcome::Zero => Outcome::One,
            Outcome::One => Outcome::Zero,
        }
    }

    pub const BOTH: [Outcome; 2] = [Outcome::Zero, Outcome::One];
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

/// A node of the binary event tree: the outcomes observed so far.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Situation {
    bits: Vec<Outcome>,
}

impl Situation {
    pub fn empty() -> Self {
        Situation::default()
    }

    pub fn from_outcomes(bits: Vec<Outcome>) -> Self {
        Situation { bits }
    }

    /// Builds a situation from a `0`/`1` string; `"-"` denotes the root.
    pub fn parse(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s == "-" {
            return Ok(Situation::empty());
        }
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(Outcome::Zero),
                '1' => bits.push(Outcome::One),
                _ => {
                    return Err(Error::parse(
                        0,
                        format!("situation {s:?} contains {c:?}; expected only 0 and 1"),
                    ))
                }
            }
        }
        Ok(Situation { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.bits
    }

    /// The first `k` outcomes; `k` must not exceed the length.
    pub fn prefix(&self, k: usize) -> Situation {
        assert!(k <= self.bits.len(), "prefix length {k} exceeds {}", self.bits.len());
        Situation {
            bits: self.bits[..k].to_vec(),
        }
    }

    /// This situation extended by one outcome.
    pub fn child(&self, x: Outcome) -> Situation {
        let mut bits = Vec::with_capacity(self.bits.len() + 1);
        bits.extend_from_slice(&self.bits);
        bits.push(x);
        Situation { bits }
    }

    pub fn push(&mut self, x: Outcome) {
        self.bits.push(x);
    }

    pub fn pop(&mut self) -> Option<Outcome> {
        self.bits.pop()
    }

    /// Whether `self` is a (not necessarily strict) prefix of `other`.
    pub fn is_prefix_of(&self, other: &Situation) -> bool {
        other.bits.len() >= self.bits.len() && other.bits[..self.bits.len()] == self.bits[..]
    }
}

impl fmt::Display for Situation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return write!(f, "-");
        }
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// All situations of length at most `depth`, in level order (root first,
/// then within each level in lexicographic order with 0 before 1).
pub fn situations_to_depth(depth: u32) -> Vec<Situation> {
    let mut all = vec![Situation::empty()];
    let mut level = vec![Situation::empty()];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * 2);
        for w in &level {
            for x in Outcome::BOTH {
                next.push(w.child(x));
            }
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    all
}

/// One announced forecast together with the outcome that followed it.
pub type PreqStep = (IntervalForecast, Outcome);

/// A node of the prequential tree: the forecast/outcome pairs seen so far.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PrequentialSituation {
    steps: Vec<PreqStep>,
}

impl PrequentialSituation {
    pub fn empty() -> Self {
        PrequentialSituation::default()
    }

    pub fn from_steps(steps: Vec<PreqStep>) -> Self {
        PrequentialSituation { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[PreqStep] {
        &self.steps
    }

    pub fn prefix(&self, k: usize) -> PrequentialSituation {
        assert!(k <= self.steps.len(), "prefix length {k} exceeds {}", self.steps.len());
        PrequentialSituation {
            steps: self.steps[..k].to_vec(),
        }
    }

    /// This situation extended by an announced forecast and its outcome.
    pub fn child(&self, forecast: IntervalForecast, x: Outcome) -> PrequentialSituation {
        let mut steps = Vec::with_capacity(self.steps.len() + 1);
        steps.extend_from_slice(&self.steps);
        steps.push((forecast, x));
        PrequentialSituation { steps }
    }

    pub fn push(&mut self, forecast: IntervalForecast, x: Outcome) {
        self.steps.push((forecast, x));
    }

    pub fn pop(&mut self) -> Option<PreqStep> {
        self.steps.pop()
    }

    /// Drops the forecasts, keeping the plain outcome string.
    pub fn outcome_projection(&self) -> Situation {
        Situation::from_outcomes(self.steps.iter().map(|(_, x)| *x).collect())
    }

    /// Drops the outcomes, keeping the announced forecasts.
    pub fn forecast_projection(&self) -> Vec<IntervalForecast> {
        self.steps.iter().map(|(i, _)| i.clone()).collect()
    }

    /// Node label for reports: `lo:hi;x` per step joined by `|`, or `-` for
    /// the root. Contains no commas, so it embeds safely in CSV.
    pub fn label(&self) -> String {
        if self.steps.is_empty() {
            return "-".to_string();
        }
        self.steps
            .iter()
            .map(|(i, x)| format!("{};{}", i.label(), x))
            .collect::<Vec<_>>()
            .join("|")
    }
}

impl fmt::Display for PrequentialSituation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Whether announcing `forecast` and then seeing `x` leaves the forecaster
/// with a flatly contradicted point forecast (`{0}` before a `1`, or `{1}`
/// before a `0`). Betting odds against such a step are unbounded, so capital
/// processes treat it as a stopping error.
pub fn pair_is_degenerate(forecast: &IntervalForecast, x: Outcome) -> bool {
    match x {
        Outcome::One => forecast.is_point_zero(),
        Outcome::Zero => forecast.is_point_one(),
    }
}

/// Index (1-based) of the first degenerate step of `v`, if any.
pub fn degenerate_step(v: &PrequentialSituation) -> Option<usize> {
    v.steps()
        .iter()
        .position(|(i, x)| pair_is_degenerate(i, *x))
        .map(|k| k + 1)
}

/// Whether no step of `v` is degenerate.
pub fn is_nondegenerate(v: &PrequentialSituation) -> bool {
    degenerate_step(v).is_none()
}

/// A source of outcomes indexed from zero. Implementations may be finite
/// (exhaustion is an error) or unbounded.
pub trait OutcomeStream: Send + Sync {
    fn outcome_at(&self, index: usize) -> Result<Outcome, Error>;
}

impl OutcomeStream for Vec<Outcome> {
    fn outcome_at(&self, index: usize) -> Result<Outcome, Error> {
        self.get(index).copied().ok_or(Error::StreamExhausted {
            index,
            len: self.len(),
        })
    }
}

impl<S: OutcomeStream + ?Sized> OutcomeStream for Arc<S> {
    fn outcome_at(&self, index: usize) -> Result<Outcome, Error> {
        (**self).outcome_at(index)
    }
}

/// The first `len` outcomes of a stream as a situation.
pub fn stream_prefix(stream: &dyn OutcomeStream, len: usize) -> Result<Situation, Error> {
    let mut bits = Vec::with_capacity(len);
    for k in 0..len {
        bits.push(stream.outcome_at(k)?);
    }
    Ok(Situation::from_outcomes(bits))
}

/// A source of announced forecasts indexed from zero.
pub trait ForecastStream: Send + Sync {
    fn forecast_at(&self, index: usize) -> Result<IntervalForecast, Error>;
}

impl ForecastStream for Vec<IntervalForecast> {
    fn forecast_at(&self, index: usize) -> Result<IntervalForecast, Error> {
        self.get(index).cloned().ok_or(Error::StreamExhausted {
            index,
            len: self.len(),
        })
    }
}

impl<S: ForecastStream + ?Sized> ForecastStream for Arc<S> {
    fn forecast_at(&self, index: usize) -> Result<IntervalForecast, Error> {
        (**self).forecast_at(index)
    }
}

/// Announces the same forecast forever.
pub struct ConstantForecasts(pub IntervalForecast);

impl ForecastStream for ConstantForecasts {
    fn forecast_at(&self, _index: usize) -> Result<IntervalForecast, Error> {
        Ok(self.0.clone())
    }
}

/// Repeats a finite block of forecasts cyclically. The block must be
/// non-empty.
pub struct CycleForecasts(pub Vec<IntervalForecast>);

impl ForecastStream for CycleForecasts {
    fn forecast_at(&self, index: usize) -> Result<IntervalForecast, Error> {
        if self.0.is_empty() {
            return Err(Error::StreamExhausted { index, len: 0 });
        }
        Ok(self.0[index % self.0.len()].clone())
    }
}
