//! Capital processes on the outcome tree: supermartingale validation,
//! betting strategies, capital trajectories, and inflation smoothing.
//!
//! A process `M` is a supermartingale for a forecasting system `phi` when at
//! every node the upper expectation of its two child values, under the
//! forecast announced there, does not exceed the value at the node. A *test*
//! supermartingale additionally starts at 1 and stays non-negative.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::Error;
use crate::forecast::{upper_expectation, Gamble};
use crate::rational::{decimal_string, int, pow2, pow2_inv, Rational};
use crate::seq::{Outcome, OutcomeStream, Situation};
use crate::system::ForecastingSystem;

type ProcessFn = dyn Fn(&Situation) -> Result<Rational, Error> + Send + Sync;

/// A capital process indexed by situations.
#[derive(Clone)]
pub struct NodeProcess {
    eval: Arc<ProcessFn>,
}

impl std::fmt::Debug for NodeProcess {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("NodeProcess")
    }
}

impl NodeProcess {
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(&Situation) -> Result<Rational, Error> + Send + Sync + 'static,
    {
        NodeProcess { eval: Arc::new(f) }
    }

    pub fn constant(c: Rational) -> Self {
        NodeProcess::from_fn(move |_| Ok(c.clone()))
    }

    /// Table-backed process. A situation missing from the table takes the
    /// value of its longest listed prefix (capital frozen from there on);
    /// the table must contain the root.
    pub fn from_table(table: HashMap<Situation, Rational>) -> Self {
        NodeProcess::from_fn(move |w| {
            let mut u = w.clone();
            loop {
                if let Some(v) = table.get(&u) {
                    return Ok(v.clone());
                }
                if u.pop().is_none() {
                    return Err(Error::Parse {
                        line: 0,
                        message: "process table has no value at the root".to_string(),
                    });
                }
            }
        })
    }

    pub fn value(&self, w: &Situation) -> Result<Rational, Error> {
        (self.eval)(w)
    }
}

type StrategyFn = dyn Fn(&Situation) -> Gamble + Send + Sync;

/// A betting strategy: the gamble the bettor takes on the next outcome at
/// each situation. The resulting capital increment at `wx` is the gamble's
/// payoff at `x`.
#[derive(Clone)]
pub struct GambleStrategy {
    choose: Arc<StrategyFn>,
}

impl GambleStrategy {
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(&Situation) -> Gamble + Send + Sync + 'static,
    {
        GambleStrategy { choose: Arc::new(f) }
    }

    /// Never bets.
    pub fn zero() -> Self {
        GambleStrategy::from_fn(|_| Gamble::constant(int(0)))
    }

    /// Table-backed strategy; situations missing from the table take the
    /// zero gamble.
    pub fn from_table(table: HashMap<Situation, Gamble>) -> Self {
        GambleStrategy::from_fn(move |w| {
            table.get(w).cloned().unwrap_or_else(|| Gamble::constant(int(0)))
        })
    }

    pub fn choose(&self, w: &Situation) -> Gamble {
        (self.choose)(w)
    }
}

/// The capital process obtained by starting with `start` capital and playing
/// `strategy`: `M(w)` is `start` plus the accumulated payoffs along `w`.
/// The starting capital must be non-negative.
pub fn strategy_to_process(strategy: &GambleStrategy, start: &Rational) -> Result<NodeProcess, Error> {
    if start < &Rational::zero() {
        return Err(Error::NegativeCapital {
            value: start.clone(),
            place: "starting capital".to_string(),
        });
    }
    let strategy = strategy.clone();
    let start = start.clone();
    Ok(NodeProcess::from_fn(move |w| {
        let mut capital = start.clone();
        let mut prefix = Situation::empty();
        for &x in w.outcomes() {
            capital += strategy.choose(&prefix).pay(x);
            prefix.push(x);
        }
        Ok(capital)
    }))
}

/// One node inequality of a supermartingale validation: the upper
/// expectation of the child values (`lhs`) against the node value (`rhs`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MartingaleCheck {
    pub node: Situation,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl MartingaleCheck {
    /// Margin by which the inequality holds; negative iff it is violated.
    pub fn slack(&self) -> Rational {
        &self.rhs - &self.lhs
    }

    pub fn is_violation(&self) -> bool {
        self.lhs > self.rhs
    }
}

/// Outcome of scanning every node inequality to a fixed depth.
#[derive(Clone, Debug)]
pub struct MartingaleReport {
    pub depth: u32,
    pub start_value: Rational,
    /// Minimum process value over all scanned situations (|w| <= depth).
    pub min_value: Rational,
    pub checks: Vec<MartingaleCheck>,
}

impl MartingaleReport {
    pub fn violations(&self) -> impl Iterator<Item = &MartingaleCheck> {
        self.checks.iter().filter(|c| c.is_violation())
    }

    pub fn violation_count(&self) -> usize {
        self.violations().count()
    }

    /// No violated inequality in the scanned range.
    pub fn passes(&self) -> bool {
        self.violation_count() == 0
    }

    pub fn is_nonnegative(&self) -> bool {
        self.min_value >= Rational::zero()
    }

    /// Test-process status: unit starting capital and non-negative values.
    pub fn is_test(&self) -> bool {
        self.start_value == int(1) && self.is_nonnegative()
    }

    /// CSV rendering: `node,lhs,rhs,slack,violation`, one row per check, in
    /// scan order. With `decimals = Some(k)`, appends `lhs_dec,rhs_dec,
    /// slack_dec` columns rounded to `k` places.
    pub fn to_csv(&self, decimals: Option<u32>) -> String {
        let mut out = String::from("node,lhs,rhs,slack,violation");
        if decimals.is_some() {
            out.push_str(",lhs_dec,rhs_dec,slack_dec");
        }
        out.push('\n');
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{}",
                c.node,
                c.lhs,
                c.rhs,
                c.slack(),
                u8::from(c.is_violation())
            ));
            if let Some(k) = decimals {
                out.push_str(&format!(
                    ",{},{},{}",
                    decimal_string(&c.lhs, k),
                    decimal_string(&c.rhs, k),
                    decimal_string(&c.slack(), k)
                ));
            }
            out.push('\n');
        }
        out
    }
}

/// Scans every situation with `|w| < depth`, checking that the upper
/// expectation of `m`'s child values under `phi(w)` does not exceed `m(w)`.
/// Checks appear in level order (within a level: parent order, then child 0
/// before child 1). Each node's value is evaluated exactly once.
pub fn validate_supermartingale(
    m: &NodeProcess,
    phi: &ForecastingSystem,
    depth: u32,
) -> Result<MartingaleReport, Error> {
    let start_value = m.value(&Situation::empty())?;
    let mut min_value = start_value.clone();
    let mut checks = Vec::new();
    let mut level = vec![(Situation::empty(), start_value.clone())];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * 2);
        for (w, value) in &level {
            let child0 = w.child(Outcome::Zero);
            let child1 = w.child(Outcome::One);
            let v0 = m.value(&child0)?;
            let v1 = m.value(&child1)?;
            let forecast = phi.forecast(w)?;
            let lhs = upper_expectation(&forecast, &Gamble::new(v0.clone(), v1.clone()));
            checks.push(MartingaleCheck {
                node: w.clone(),
                lhs,
                rhs: value.clone(),
            });
            if v0 < min_value {
                min_value = v0.clone();
            }
            if v1 < min_value {
                min_value = v1.clone();
            }
            next.push((child0, v0));
            next.push((child1, v1));
        }
        level = next;
    }
    Ok(MartingaleReport {
        depth,
        start_value,
        min_value,
        checks,
    })
}

/// Capital values of a process along a fixed outcome stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapitalTrajectory {
    /// `values[n]` is the capital after `n` outcomes (so index 0 is the
    /// starting capital).
    pub values: Vec<Rational>,
    /// `running_max[n]` is the largest capital over the first `n` steps.
    pub running_max: Vec<Rational>,
}

impl CapitalTrajectory {
    pub fn from_values(values: Vec<Rational>) -> Self {
        let mut running_max = Vec::with_capacity(values.len());
        let mut best: Option<Rational> = None;
        for v in &values {
            let next = match best {
                None => v.clone(),
                Some(b) => b.max(v.clone()),
            };
            running_max.push(next.clone());
            best = Some(next);
        }
        CapitalTrajectory { values, running_max }
    }

    pub fn final_value(&self) -> &Rational {
        self.values.last().expect("trajectory is never empty")
    }

    pub fn max_value(&self) -> &Rational {
        self.running_max.last().expect("trajectory is never empty")
    }

    /// CSV rendering: `step,capital`; with decimals, a `capital_dec` column.
    pub fn to_csv(&self, decimals: Option<u32>) -> String {
        let mut out = String::from("step,capital");
        if decimals.is_some() {
            out.push_str(",capital_dec");
        }
        out.push('\n');
        for (n, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{n},{v}"));
            if let Some(k) = decimals {
                out.push_str(&format!(",{}", decimal_string(v, k)));
            }
            out.push('\n');
        }
        out
    }
}

/// Evaluates `m` along the first `horizon` outcomes of `omega`, returning
/// the capital after each prefix (including the empty one).
pub fn run_capital(
    m: &NodeProcess,
    omega: &dyn OutcomeStream,
    horizon: usize,
) -> Result<CapitalTrajectory, Error> {
    let mut values = Vec::with_capacity(horizon + 1);
    let mut prefix = Situation::empty();
    values.push(m.value(&prefix)?);
    for n in 0..horizon {
        prefix.push(omega.outcome_at(n)?);
        values.push(m.value(&prefix)?);
    }
    Ok(CapitalTrajectory::from_values(values))
}

/// The inflation-smoothed process `(t(w) + 2^(1-|w|)) / 3`.
///
/// Smoothing a test supermartingale for a system given through endpoint
/// oracles yields a supermartingale for the [`crate::system::rationalize`]d
/// version of that system: the added inflation term absorbs the endpoint
/// slack that rationalization introduces, because that slack was budgeted
/// against the integer capital ceilings of the children.
pub fn inflation_smooth(t: &NodeProcess) -> NodeProcess {
    let t = t.clone();
    NodeProcess::from_fn(move |w| {
        let inflation = if w.is_empty() {
            pow2(1)
        } else {
            pow2_inv(w.len() as u32 - 1)
        };
        Ok((t.value(w)? + inflation) / int(3))
    })
}
