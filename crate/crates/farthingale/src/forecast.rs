//! Interval forecasts, gambles, and their upper/lower expectations.
//!
//! An interval forecast `[lo, hi]` is a closed set of probabilities for the
//! next outcome being `1`. A gamble pays `pay1` if the outcome is `1` and
//! `pay0` otherwise. The upper expectation of a gamble under an interval is
//! the worst case (for whoever offers it) over all probabilities in the
//! interval; because the expectation is affine in the probability, it is
//! attained at an endpoint.

use std::fmt;

use num_traits::Zero;

use crate::error::Error;
use crate::rational::{parse_rational, Rational};
use crate::seq::Outcome;

/// A closed subinterval of `[0, 1]`, read as the set of probabilities the
/// forecaster is willing to stand behind for the next outcome being `1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalForecast {
    lo: Rational,
    hi: Rational,
}

impl IntervalForecast {
    /// Builds `[lo, hi]`, requiring `0 <= lo <= hi <= 1`.
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, Error> {
        if lo < Rational::zero() || hi > crate::rational::int(1) || lo > hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(IntervalForecast { lo, hi })
    }

    /// The point forecast `{p}`.
    pub fn point(p: Rational) -> Result<Self, Error> {
        IntervalForecast::new(p.clone(), p)
    }

    /// The vacuous forecast `[0, 1]`.
    pub fn vacuous() -> Self {
        IntervalForecast {
            lo: Rational::zero(),
            hi: crate::rational::int(1),
        }
    }

    /// The interval `[0, 1/2]`.
    pub fn lower_half() -> Self {
        IntervalForecast {
            lo: Rational::zero(),
            hi: crate::rational::rat(1, 2),
        }
    }

    /// The interval `[1/2, 1]`.
    pub fn upper_half() -> Self {
        IntervalForecast {
            lo: crate::rational::rat(1, 2),
            hi: crate::rational::int(1),
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    /// Whether the interval is a single probability.
    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Whether this is the point forecast `{0}`.
    pub fn is_point_zero(&self) -> bool {
        self.hi.is_zero()
    }

    /// Whether this is the point forecast `{1}`.
    pub fn is_point_one(&self) -> bool {
        self.lo == crate::rational::int(1)
    }

    /// Whether `other` is a subset of `self`.
    pub fn contains(&self, other: &IntervalForecast) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Whether the probability `p` lies in the interval.
    pub fn contains_prob(&self, p: &Rational) -> bool {
        &self.lo <= p && p <= &self.hi
    }

    /// Parses `"a/b c/d"` (lo, hi separated by whitespace).
    pub fn parse(s: &str) -> Result<Self, Error> {
        let mut parts = s.split_whitespace();
        let lo = parts
            .next()
            .ok_or_else(|| Error::parse(0, "empty forecast, expected \"lo hi\""))?;
        let hi = parts
            .next()
            .ok_or_else(|| Error::parse(0, format!("forecast {s:?} is missing its upper endpoint")))?;
        if parts.next().is_some() {
            return Err(Error::parse(0, format!("forecast {s:?} has trailing fields")));
        }
        IntervalForecast::new(parse_rational(lo)?, parse_rational(hi)?)
    }

    /// Compact `lo:hi` label used inside node identifiers.
    pub fn label(&self) -> String {
        format!("{}:{}", self.lo, self.hi)
    }
}

impl fmt::Display for IntervalForecast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A payoff vector on the binary outcome space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gamble {
    pub pay0: Rational,
    pub pay1: Rational,
}

impl Gamble {
    pub fn new(pay0: Rational, pay1: Rational) -> Self {
        Gamble { pay0, pay1 }
    }

    pub fn constant(c: Rational) -> Self {
        Gamble {
            pay0: c.clone(),
            pay1: c,
        }
    }

    pub fn pay(&self, x: Outcome) -> &Rational {
        match x {
            Outcome::Zero => &self.pay0,
            Outcome::One => &self.pay1,
        }
    }

    pub fn negated(&self) -> Gamble {
        Gamble {
            pay0: -self.pay0.clone(),
            pay1: -self.pay1.clone(),
        }
    }
}

/// Expected payoff `p * pay1 + (1 - p) * pay0`; errors unless `0 <= p <= 1`.
pub fn eval_linear(p: &Rational, f: &Gamble) -> Result<Rational, Error> {
    if p < &Rational::zero() || p > &crate::rational::int(1) {
        return Err(Error::ProbabilityOutOfRange { p: p.clone() });
    }
    Ok(eval_linear_unchecked(p, f))
}

fn eval_linear_unchecked(p: &Rational, f: &Gamble) -> Rational {
    p * &f.pay1 + (crate::rational::int(1) - p) * &f.pay0
}

/// Upper expectation of `f` under the interval `i`: the maximum expected
/// payoff over probabilities in `i`, attained at an endpoint by affinity.
pub fn upper_expectation(i: &IntervalForecast, f: &Gamble) -> Rational {
    let at_lo = eval_linear_unchecked(i.lo(), f);
    let at_hi = eval_linear_unchecked(i.hi(), f);
    at_lo.max(at_hi)
}

/// Lower expectation of `f` under `i`, conjugate to the upper one.
pub fn lower_expectation(i: &IntervalForecast, f: &Gamble) -> Rational {
    -upper_expectation(i, &f.negated())
}

/// How a gamble looks to the bettor under a given interval forecast.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GambleClass {
    /// Upper expectation below zero: offering `f` can only lose.
    Giveaway,
    /// Lower expectation above zero: accepting `f` can only gain.
    Acceptable,
    /// Sign is genuinely undecided: lower < 0 < upper.
    Indeterminate,
    /// Upper and lower expectations are both exactly zero.
    BoundaryBoth,
}

/// Classifies `f` under `i` by the signs of its upper and lower expectations.
pub fn classify_gamble(i: &IntervalForecast, f: &Gamble) -> GambleClass {
    let upper = upper_expectation(i, f);
    let lower = lower_expectation(i, f);
    let zero = Rational::zero();
    match (upper <= zero, lower >= zero) {
        (true, true) => GambleClass::BoundaryBoth,
        (true, false) => GambleClass::Giveaway,
        (false, true) => GambleClass::Acceptable,
        (false, false) => GambleClass::Indeterminate,
    }
}
