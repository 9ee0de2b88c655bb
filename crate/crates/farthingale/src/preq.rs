//! Capital processes on the prequential tree: superfarthingale validation,
//! mixtures, capital runs along forecast/outcome streams, and the capital
//! ceiling for non-degenerate records.
//!
//! A superfarthingale is the forecast-only analogue of a supermartingale:
//! its node inequality must hold for *every* interval the forecaster might
//! announce next, not just the one a fixed system would pick. Exhausting all
//! rational intervals is impossible, so validation is parameterized by a
//! finite alphabet of forecasts; callers widen the alphabet (e.g. with a
//! randomized fuzz set) to tighten the evidence.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::Error;
use crate::forecast::{upper_expectation, Gamble, IntervalForecast};
use crate::martingale::CapitalTrajectory;
use crate::rational::{decimal_string, int, Rational};
use crate::seq::{
    pair_is_degenerate, ForecastStream, Outcome, OutcomeStream, PrequentialSituation,
};

type PreqFn = dyn Fn(&PrequentialSituation) -> Result<Rational, Error> + Send + Sync;

/// A capital process indexed by prequential situations.
#[derive(Clone)]
pub struct PreqProcess {
    eval: Arc<PreqFn>,
}

impl std::fmt::Debug for PreqProcess {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("PreqProcess")
    }
}

impl PreqProcess {
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(&PrequentialSituation) -> Result<Rational, Error> + Send + Sync + 'static,
    {
        PreqProcess { eval: Arc::new(f) }
    }

    pub fn constant(c: Rational) -> Self {
        PreqProcess::from_fn(move |_| Ok(c.clone()))
    }

    /// Table-backed process; a missing situation takes the value of its
    /// longest listed prefix (capital frozen). The table must contain the
    /// root.
    pub fn from_table(table: HashMap<PrequentialSituation, Rational>) -> Self {
        PreqProcess::from_fn(move |v| {
            let mut u = v.clone();
            loop {
                if let Some(value) = table.get(&u) {
                    return Ok(value.clone());
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

    pub fn value(&self, v: &PrequentialSituation) -> Result<Rational, Error> {
        (self.eval)(v)
    }
}

/// The doubling skeptic: starts at 1 and doubles on each step that pairs
/// `[0, 1/2]` with outcome 1 or `[1/2, 1]` with outcome 0; any other step
/// forfeits everything.
pub fn doubler() -> PreqProcess {
    let low = IntervalForecast::new(int(0), crate::rational::rat(1, 2)).expect("static interval");
    let high = IntervalForecast::new(crate::rational::rat(1, 2), int(1)).expect("static interval");
    PreqProcess::from_fn(move |v| {
        let mut value = int(1);
        for (forecast, x) in v.steps() {
            let doubles = (forecast == &low && *x == Outcome::One)
                || (forecast == &high && *x == Outcome::Zero);
            if !doubles {
                return Ok(int(0));
            }
            value *= int(2);
        }
        Ok(value)
    })
}

/// Components and weights of a finite convex mixture. The unassigned weight
/// (if any) goes to the constant-1 process, so a mixture of test processes
/// still starts at exactly 1.
#[derive(Clone)]
pub struct MixtureSpec {
    components: Vec<(Rational, PreqProcess)>,
    residual: Rational,
}

impl MixtureSpec {
    pub fn new(components: Vec<(Rational, PreqProcess)>) -> Result<Self, Error> {
        let mut total = int(0);
        for (weight, _) in &components {
            if weight <= &Rational::zero() {
                return Err(Error::InvalidWeights {
                    reason: format!("weight {weight} is not positive"),
                });
            }
            total += weight;
        }
        if total > int(1) {
            return Err(Error::InvalidWeights {
                reason: format!("weights sum to {total} > 1"),
            });
        }
        Ok(MixtureSpec {
            components,
            residual: int(1) - total,
        })
    }

    pub fn components(&self) -> &[(Rational, PreqProcess)] {
        &self.components
    }

    /// Weight assigned to the constant-1 filler.
    pub fn residual(&self) -> &Rational {
        &self.residual
    }
}

/// The convex mixture `v -> sum_k w_k * F_k(v) + residual * 1`.
pub fn mixture(spec: &MixtureSpec) -> PreqProcess {
    let spec = spec.clone();
    PreqProcess::from_fn(move |v| {
        let mut total = spec.residual.clone();
        for (weight, component) in &spec.components {
            total += weight * component.value(v)?;
        }
        Ok(total)
    })
}

/// One node inequality of a superfarthingale validation: at node `v`, for
/// announced forecast `forecast`, the upper expectation of the two child
/// values (`lhs`) against the node value (`rhs`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarthingaleCheck {
    pub node: PrequentialSituation,
    pub forecast: IntervalForecast,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl FarthingaleCheck {
    pub fn slack(&self) -> Rational {
        &self.rhs - &self.lhs
    }

    pub fn is_violation(&self) -> bool {
        self.lhs > self.rhs
    }
}

/// Outcome of scanning all alphabet-built prequential situations to a depth.
#[derive(Clone, Debug)]
pub struct FarthingaleReport {
    pub depth: u32,
    pub alphabet: Vec<IntervalForecast>,
    pub start_value: Rational,
    /// Minimum process value over all visited situations.
    pub min_value: Rational,
    pub checks: Vec<FarthingaleCheck>,
}

impl FarthingaleReport {
    pub fn violations(&self) -> impl Iterator<Item = &FarthingaleCheck> {
        self.checks.iter().filter(|c| c.is_violation())
    }

    pub fn violation_count(&self) -> usize {
        self.violations().count()
    }

    pub fn passes(&self) -> bool {
        self.violation_count() == 0
    }

    pub fn is_nonnegative(&self) -> bool {
        self.min_value >= Rational::zero()
    }

    /// Test-process status: unit start and non-negative values.
    pub fn is_test(&self) -> bool {
        self.start_value == int(1) && self.is_nonnegative()
    }

    /// CSV rendering: `node,lo,hi,lhs,rhs,slack,violation` where `lo,hi` are
    /// the endpoints of the announced forecast being checked.
    pub fn to_csv(&self, decimals: Option<u32>) -> String {
        let mut out = String::from("node,lo,hi,lhs,rhs,slack,violation");
        if decimals.is_some() {
            out.push_str(",lhs_dec,rhs_dec,slack_dec");
        }
        out.push('\n');
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}",
                c.node.label(),
                c.forecast.lo(),
                c.forecast.hi(),
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

/// Checks the superfarthingale inequality at every prequential situation of
/// length `< depth` whose forecasts come from `alphabet`, for every forecast
/// in `alphabet`. Checks are emitted depth-first: all of a node's checks in
/// alphabet order, then its subtrees in (alphabet, outcome 0/1) order. Each
/// situation's value is evaluated exactly once.
pub fn validate_superfarthingale(
    f: &PreqProcess,
    alphabet: &[IntervalForecast],
    depth: u32,
) -> Result<FarthingaleReport, Error> {
    if alphabet.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    let start_value = f.value(&PrequentialSituation::empty())?;
    let mut report = FarthingaleReport {
        depth,
        alphabet: alphabet.to_vec(),
        start_value: start_value.clone(),
        min_value: start_value.clone(),
        checks: Vec::new(),
    };
    let mut v = PrequentialSituation::empty();
    walk(f, alphabet, &mut v, &start_value, depth, &mut report)?;
    Ok(report)
}

fn walk(
    f: &PreqProcess,
    alphabet: &[IntervalForecast],
    v: &mut PrequentialSituation,
    value: &Rational,
    remaining: u32,
    report: &mut FarthingaleReport,
) -> Result<(), Error> {
    if remaining == 0 {
        return Ok(());
    }
    let mut branches = Vec::with_capacity(alphabet.len());
    for forecast in alphabet {
        let mut child = |x: Outcome| -> Result<Rational, Error> {
            v.push(forecast.clone(), x);
            let value = f.value(v);
            v.pop();
            value
        };
        let v0 = child(Outcome::Zero)?;
        let v1 = child(Outcome::One)?;
        let lhs = upper_expectation(forecast, &Gamble::new(v0.clone(), v1.clone()));
        report.checks.push(FarthingaleCheck {
            node: v.clone(),
            forecast: forecast.clone(),
            lhs,
            rhs: value.clone(),
        });
        if v0 < report.min_value {
            report.min_value = v0.clone();
        }
        if v1 < report.min_value {
            report.min_value = v1.clone();
        }
        branches.push((forecast.clone(), v0, v1));
    }
    for (forecast, v0, v1) in branches {
        v.push(forecast.clone(), Outcome::Zero);
        walk(f, alphabet, v, &v0, remaining - 1, report)?;
        v.pop();
        v.push(forecast, Outcome::One);
        walk(f, alphabet, v, &v1, remaining - 1, report)?;
        v.pop();
    }
    Ok(())
}

/// A capital trajectory along a prequential stream, together with the steps
/// that produced it and the first degenerate step if one occurred.
/// Degenerate steps are legal (processes stay evaluable); they are recorded
/// so callers can flag that betting odds were unbounded from there on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreqTrajectory {
    /// `values[n]` is the capital after `n` steps.
    pub values: Vec<Rational>,
    pub running_max: Vec<Rational>,
    /// The forecast/outcome pairs consumed, in order.
    pub steps: Vec<(IntervalForecast, Outcome)>,
    /// 1-based index of the first step pairing a point forecast with the
    /// outcome it excludes, if any.
    pub first_degenerate: Option<usize>,
}

impl PreqTrajectory {
    pub fn final_value(&self) -> &Rational {
        self.values.last().expect("trajectory is never empty")
    }

    pub fn max_value(&self) -> &Rational {
        self.running_max.last().expect("trajectory is never empty")
    }

    /// The prequential situation after all recorded steps.
    pub fn situation(&self) -> PrequentialSituation {
        PrequentialSituation::from_steps(self.steps.clone())
    }

    /// CSV rendering: `step,lo,hi,outcome,capital`. Row 0 is the starting
    /// capital and has empty forecast/outcome cells.
    pub fn to_csv(&self, decimals: Option<u32>) -> String {
        let mut out = String::from("step,lo,hi,outcome,capital");
        if decimals.is_some() {
            out.push_str(",capital_dec");
        }
        out.push('\n');
        for (n, value) in self.values.iter().enumerate() {
            if n == 0 {
                out.push_str(&format!("0,,,,{value}"));
            } else {
                let (forecast, x) = &self.steps[n - 1];
                out.push_str(&format!(
                    "{n},{},{},{x},{value}",
                    forecast.lo(),
                    forecast.hi()
                ));
            }
            if let Some(k) = decimals {
                out.push_str(&format!(",{}", decimal_string(value, k)));
            }
            out.push('\n');
        }
        out
    }
}

/// Evaluates `f` along `horizon` steps of the forecast and outcome streams,
/// returning the capital after each prefix.
pub fn run_capital_preq(
    f: &PreqProcess,
    iota: &dyn ForecastStream,
    omega: &dyn OutcomeStream,
    horizon: usize,
) -> Result<PreqTrajectory, Error> {
    let mut v = PrequentialSituation::empty();
    let mut values = Vec::with_capacity(horizon + 1);
    let mut steps = Vec::with_capacity(horizon);
    let mut first_degenerate = None;
    values.push(f.value(&v)?);
    for n in 0..horizon {
        let forecast = iota.forecast_at(n)?;
        let x = omega.outcome_at(n)?;
        if first_degenerate.is_none() && pair_is_degenerate(&forecast, x) {
            first_degenerate = Some(n + 1);
        }
        steps.push((forecast.clone(), x));
        v.push(forecast, x);
        values.push(f.value(&v)?);
    }
    let base = CapitalTrajectory::from_values(values);
    Ok(PreqTrajectory {
        values: base.values,
        running_max: base.running_max,
        steps,
        first_degenerate,
    })
}

/// The exact cap on any test superfarthingale's value at `v`: the product
/// over steps of one over the announced upper probability of each 1 and
/// lower improbability of each 0. Errors on degenerate `v` (the product
/// would divide by zero).
pub fn bound_ceiling(v: &PrequentialSituation) -> Result<Rational, Error> {
    let mut product = int(1);
    for (k, (forecast, x)) in v.steps().iter().enumerate() {
        let factor = match x {
            Outcome::One => forecast.hi().clone(),
            Outcome::Zero => int(1) - forecast.lo(),
        };
        if factor.is_zero() {
            return Err(Error::DegenerateStep {
                step: k + 1,
                forecast: forecast.to_string(),
                outcome: x.bit(),
            });
        }
        product /= factor;
    }
    Ok(product)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::seq::ConstantForecasts;

    fn iv(lo: (i64, i64), hi: (i64, i64)) -> IntervalForecast {
        IntervalForecast::new(rat(lo.0, lo.1), rat(hi.0, hi.1)).unwrap()
    }

    fn low() -> IntervalForecast {
        iv((0, 1), (1, 2))
    }

    fn high() -> IntervalForecast {
        iv((1, 2), (1, 1))
    }

    /// A prequential path the doubler likes: [0,1/2] answered by 1 each step.
    fn doubling_path(n: usize) -> PrequentialSituation {
        PrequentialSituation::from_steps(vec![(low(), Outcome::One); n])
    }

    #[test]
    fn doubler_recursion() {
        let f = doubler();
        let v = PrequentialSituation::empty().child(low(), Outcome::One);
        assert_eq!(f.value(&v).unwrap(), int(2));
        let v = PrequentialSituation::empty().child(low(), Outcome::Zero);
        assert_eq!(f.value(&v).unwrap(), int(0));
        let v = PrequentialSituation::empty()
            .child(high(), Outcome::Zero)
            .child(low(), Outcome::One);
        assert_eq!(f.value(&v).unwrap(), int(4));
        assert_eq!(f.value(&doubling_path(10)).unwrap(), int(1024));
        // Once forfeited, forever forfeited.
        let v = doubling_path(3)
            .child(low(), Outcome::Zero)
            .child(low(), Outcome::One);
        assert_eq!(f.value(&v).unwrap(), int(0));
    }

    #[test]
    fn constant_process_validates_over_any_alphabet() {
        let f = PreqProcess::constant(int(1));
        let alphabet = [low(), high()];
        let report = validate_superfarthingale(&f, &alphabet, 6).unwrap();
        assert_eq!(report.checks.len(), 2730);
        assert!(report.passes());
        assert!(report.is_test());
    }

    #[test]
    fn doubler_validates_over_its_own_alphabet() {
        let report = validate_superfarthingale(&doubler(), &[low(), high()], 6).unwrap();
        assert!(report.passes());
        assert!(report.is_test());
        // At every node the inequality is tight: the doubling child carries
        // probability exactly 1/2 under the worst-case endpoint.
        assert!(report.checks.iter().all(|c| c.slack() == int(0)));
    }

    #[test]
    fn jump_process_is_flagged_with_exact_slack() {
        let f = PreqProcess::from_fn(|v| Ok(if v.is_empty() { int(1) } else { int(3) }));
        let alphabet = [IntervalForecast::point(rat(1, 2)).unwrap()];
        let report = validate_superfarthingale(&f, &alphabet, 3).unwrap();
        let bad: Vec<_> = report.violations().collect();
        assert_eq!(bad.len(), 1);
        assert!(bad[0].node.is_empty());
        assert_eq!(bad[0].lhs, int(3));
        assert_eq!(bad[0].rhs, int(1));
        assert_eq!(bad[0].slack(), int(-2));
    }

    #[test]
    fn empty_alphabet_is_rejected() {
        let f = PreqProcess::constant(int(1));
        assert_eq!(
            validate_superfarthingale(&f, &[], 3).unwrap_err(),
            Error::EmptyAlphabet
        );
    }

    #[test]
    fn bound_ceiling_examples() {
        let half = IntervalForecast::point(rat(1, 2)).unwrap();
        let v = PrequentialSituation::from_steps(vec![
            (half.clone(), Outcome::One),
            (half, Outcome::Zero),
        ]);
        assert_eq!(bound_ceiling(&v).unwrap(), int(4));
        assert_eq!(bound_ceiling(&PrequentialSituation::empty()).unwrap(), int(1));

        let degenerate = PrequentialSituation::from_steps(vec![(
            IntervalForecast::point(int(0)).unwrap(),
            Outcome::One,
        )]);
        assert_eq!(
            bound_ceiling(&degenerate).unwrap_err(),
            Error::DegenerateStep {
                step: 1,
                forecast: "[0, 0]".to_string(),
                outcome: 1,
            }
        );
    }

    #[test]
    fn doubler_attains_the_ceiling_on_its_path() {
        let f = doubler();
        for n in 0..=8 {
            let v = doubling_path(n);
            assert_eq!(f.value(&v).unwrap(), bound_ceiling(&v).unwrap());
        }
    }

    #[test]
    fn mixture_arithmetic() {
        // Identity mixture.
        let spec = MixtureSpec::new(vec![(int(1), doubler())]).unwrap();
        let f = mixture(&spec);
        assert_eq!(f.value(&doubling_path(4)).unwrap(), int(16));
        assert_eq!(spec.residual(), &int(0));

        // Constants mix to a constant.
        let spec = MixtureSpec::new(vec![
            (rat(1, 2), PreqProcess::constant(int(1))),
            (rat(1, 4), PreqProcess::constant(int(1))),
        ])
        .unwrap();
        assert_eq!(mixture(&spec).value(&doubling_path(3)).unwrap(), int(1));

        // Doubler at weight 1/2 with constant-1 residual.
        let spec = MixtureSpec::new(vec![(rat(1, 2), doubler())]).unwrap();
        let f = mixture(&spec);
        for n in 0..=6 {
            let expected = rat(1, 2) * int(1 << n) + rat(1, 2);
            assert_eq!(f.value(&doubling_path(n)).unwrap(), expected);
        }
    }

    #[test]
    fn mixture_weight_guards() {
        assert!(MixtureSpec::new(vec![(int(0), doubler())]).is_err());
        assert!(MixtureSpec::new(vec![(rat(-1, 2), doubler())]).is_err());
        assert!(MixtureSpec::new(vec![
            (rat(3, 4), doubler()),
            (rat(1, 2), PreqProcess::constant(int(1))),
        ])
        .is_err());
    }

    #[test]
    fn mixture_dominates_weighted_components() {
        let spec = MixtureSpec::new(vec![
            (rat(1, 3), doubler()),
            (rat(1, 5), PreqProcess::constant(rat(1, 2))),
        ])
        .unwrap();
        let f = mixture(&spec);
        for n in 0..=5 {
            let v = doubling_path(n);
            let total = f.value(&v).unwrap();
            for (weight, component) in spec.components() {
                assert!(total >= weight * component.value(&v).unwrap());
            }
        }
    }

    #[test]
    fn run_capital_preq_walks_both_streams() {
        let f = doubler();
        let iota = ConstantForecasts(low());
        let omega = vec![Outcome::One, Outcome::One, Outcome::Zero];
        let run = run_capital_preq(&f, &iota, &omega, 3).unwrap();
        assert_eq!(run.values, vec![int(1), int(2), int(4), int(0)]);
        assert_eq!(run.running_max.last().unwrap(), &int(4));
        assert_eq!(run.first_degenerate, None);
        assert_eq!(run.situation().len(), 3);

        // Exhaustion propagates.
        assert!(run_capital_preq(&f, &iota, &omega, 4).is_err());
    }

    #[test]
    fn degenerate_steps_are_recorded_not_fatal() {
        let f = PreqProcess::constant(int(1));
        let iota = ConstantForecasts(IntervalForecast::point(int(0)).unwrap());
        let omega = vec![Outcome::Zero, Outcome::One, Outcome::One];
        let run = run_capital_preq(&f, &iota, &omega, 3).unwrap();
        // Step 1 pairs {0} with 0 (fine); step 2 pairs {0} with 1.
        assert_eq!(run.first_degenerate, Some(2));
        assert_eq!(run.values.len(), 4);
    }

    #[test]
    fn validated_test_superfarthingale_respects_the_ceiling() {
        let f = doubler();
        let alphabet = [low(), high()];
        assert!(validate_superfarthingale(&f, &alphabet, 5).unwrap().passes());
        // Exhaustively enumerate non-degenerate situations over the alphabet
        // to depth 5 and compare value against ceiling.
        fn visit(
            f: &PreqProcess,
            alphabet: &[IntervalForecast],
            v: &mut PrequentialSituation,
            remaining: u32,
        ) {
            let value = f.value(v).unwrap();
            assert!(value <= bound_ceiling(v).unwrap(), "ceiling broken at {}", v.label());
            if remaining == 0 {
                return;
            }
            for forecast in alphabet {
                for x in Outcome::BOTH {
                    if pair_is_degenerate(forecast, x) {
                        continue;
                    }
                    v.push(forecast.clone(), x);
                    visit(f, alphabet, v, remaining - 1);
                    v.pop();
                }
            }
        }
        visit(&f, &alphabet, &mut PrequentialSituation::empty(), 5);
    }

    #[test]
    fn preq_table_freezes_beyond_the_table() {
        let mut table = HashMap::new();
        table.insert(PrequentialSituation::empty(), int(1));
        table.insert(doubling_path(1), rat(3, 2));
        let f = PreqProcess::from_table(table);
        assert_eq!(f.value(&doubling_path(1)).unwrap(), rat(3, 2));
        assert_eq!(f.value(&doubling_path(3)).unwrap(), rat(3, 2));
        // Unknown branches freeze at the root value.
        let other = PrequentialSituation::empty().child(high(), Outcome::One);
        assert_eq!(f.value(&other).unwrap(), int(1));
    }

    #[test]
    fn trajectory_csv_shape() {
        let f = doubler();
        let iota = ConstantForecasts(low());
        let omega = vec![Outcome::One];
        let run = run_capital_preq(&f, &iota, &omega, 1).unwrap();
        assert_eq!(
            run.to_csv(None),
            "step,lo,hi,outcome,capital\n0,,,,1\n1,0,1/2,1,2\n"
        );
    }

    #[test]
    fn report_csv_shape() {
        let f = PreqProcess::constant(int(1));
        let report = validate_superfarthingale(&f, &[low()], 1).unwrap();
        assert_eq!(
            report.to_csv(None),
            "node,lo,hi,lhs,rhs,slack,violation\n-,0,1/2,1,1,0,0\n"
        );
    }
}
