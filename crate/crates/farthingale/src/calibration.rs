//! Calibration betting strategies and audit reports.
//!
//! A selection function watches a prequential record and decides, before each
//! outcome, whether the upcoming step counts. The two calibration processes
//! bet a fixed fraction of capital on every selected step: the lower process
//! profits when outcomes run below the announced lower endpoints, the upper
//! process when they run above the upper endpoints. Both are test
//! superfarthingales — each betting factor has conditional upper expectation
//! exactly equal to the capital before the step.
//!
//! [`audit`] replays both processes along a forecast/outcome pair, tracking
//! running discrepancy averages over the selected steps and exact capitals.
//! Whenever the lower average falls strictly below `-eps`, the capital of the
//! lower process is guaranteed to be at least `exp((2 eps^2 / 9) * n)` for `n`
//! selected steps; [`bound_certificate`] checks that inequality with outward
//! rational logarithm bounds and returns the verified certificate.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::forecast::IntervalForecast;
use crate::logbound::ln_bounds;
use crate::preq::PreqProcess;
use crate::rational::{decimal_string, dyadic_floor, int, rat, Rational, RunningProduct};
use crate::seq::{pair_is_degenerate, ForecastStream, Outcome, OutcomeStream, PrequentialSituation};

/// Decides, from the record so far and the forecast just announced, whether
/// the upcoming step is selected. Deterministic and total.
#[derive(Clone)]
pub struct SelectionFunction {
    chooser: Arc<dyn Fn(&PrequentialSituation, &IntervalForecast) -> bool + Send + Sync>,
}

impl fmt::Debug for SelectionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SelectionFunction(..)")
    }
}

impl SelectionFunction {
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(&PrequentialSituation, &IntervalForecast) -> bool + Send + Sync + 'static,
    {
        SelectionFunction { chooser: Arc::new(f) }
    }

    /// Selects every step.
    pub fn always() -> Self {
        SelectionFunction::from_fn(|_, _| true)
    }

    /// Selects no step; the calibration capitals stay at 1.
    pub fn never() -> Self {
        SelectionFunction::from_fn(|_, _| false)
    }

    /// Selects the steps whose 1-based index is a multiple of `k`.
    pub fn every_kth(k: usize) -> Self {
        assert!(k >= 1, "every_kth requires k >= 1");
        SelectionFunction::from_fn(move |v, _| (v.len() + 1) % k == 0)
    }

    /// Selects the steps whose announced forecast equals `interval`.
    pub fn matching(interval: IntervalForecast) -> Self {
        SelectionFunction::from_fn(move |_, announced| announced == &interval)
    }

    pub fn select(&self, v: &PrequentialSituation, forecast: &IntervalForecast) -> bool {
        (self.chooser)(v, forecast)
    }
}

fn check_eps(eps: &Rational) -> Result<(), Error> {
    if eps <= &Rational::zero() || eps >= &Rational::one() {
        return Err(Error::EpsilonOutOfRange { eps: eps.clone() });
    }
    Ok(())
}

fn outcome_rational(x: Outcome) -> Rational {
    int(i64::from(x.bit()))
}

/// Betting factor of the lower calibration process for one selected step:
/// `1 - (eps/3) * (x - lo)`. Stays within `(1/2, 2)` for `eps` in `(0, 1)`.
fn lower_factor(eps: &Rational, forecast: &IntervalForecast, x: Outcome) -> Rational {
    int(1) - eps / int(3) * (outcome_rational(x) - forecast.lo())
}

/// Betting factor of the upper calibration process for one selected step:
/// `1 + (eps/3) * (x - hi)`.
fn upper_factor(eps: &Rational, forecast: &IntervalForecast, x: Outcome) -> Rational {
    int(1) + eps / int(3) * (outcome_rational(x) - forecast.hi())
}

fn calibration_process(
    s: &SelectionFunction,
    eps: &Rational,
    factor: fn(&Rational, &IntervalForecast, Outcome) -> Rational,
) -> Result<PreqProcess, Error> {
    check_eps(eps)?;
    let s = s.clone();
    let eps = eps.clone();
    Ok(PreqProcess::from_fn(move |v| {
        let mut prefix = PrequentialSituation::empty();
        let mut capital = Rational::one();
        for (forecast, x) in v.steps() {
            if s.select(&prefix, forecast) {
                capital *= factor(&eps, forecast, *x);
            }
            prefix.push(forecast.clone(), *x);
        }
        Ok(capital)
    }))
}

/// The product process with factors `1 - (eps/3) * S * (x - lo)`; grows when
/// outcomes fall below the announced lower endpoints on selected steps.
pub fn lower_calibration_farthingale(
    s: &SelectionFunction,
    eps: &Rational,
) -> Result<PreqProcess, Error> {
    calibration_process(s, eps, lower_factor)
}

/// The product process with factors `1 + (eps/3) * S * (x - hi)`; grows when
/// outcomes exceed the announced upper endpoints on selected steps.
pub fn upper_calibration_farthingale(
    s: &SelectionFunction,
    eps: &Rational,
) -> Result<PreqProcess, Error> {
    calibration_process(s, eps, upper_factor)
}

/// One audited step. Discrepancies are recorded for every step; sums,
/// averages, and capitals move only on selected steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditStep {
    /// 1-based index of the step.
    pub step: usize,
    pub forecast: IntervalForecast,
    pub outcome: Outcome,
    pub selected: bool,
    /// `x - lo` for this step's forecast.
    pub discrepancy_lo: Rational,
    /// `x - hi` for this step's forecast.
    pub discrepancy_hi: Rational,
    /// Number of selected steps so far (this one included if selected).
    pub selected_count: usize,
    /// Mean of `discrepancy_lo` over selected steps; `None` until one exists.
    pub running_avg_lo: Option<Rational>,
    pub running_avg_hi: Option<Rational>,
    /// Exact capital of the lower calibration process after this step.
    pub capital_lo: Rational,
    pub capital_hi: Rational,
    /// Whether the capital bound implication was machine-checked here: the
    /// running lower average is strictly below `-eps` and an accumulated
    /// certified lower bound on `ln capital_lo` reaches
    /// `(2 eps^2 / 9) * selected_count`. Conservative: never set wrongly,
    /// though a razor-thin margin can leave it unset.
    pub certified: bool,
}

/// Replay of both calibration processes along one forecast/outcome pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub eps: Rational,
    pub steps: Vec<AuditStep>,
    /// 1-based index of the first degenerate step, if any was seen.
    pub first_degenerate: Option<usize>,
}

impl AuditReport {
    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    pub fn final_step(&self) -> Option<&AuditStep> {
        self.steps.last()
    }

    /// CSV rendering, one row per step:
    /// `step,lo,hi,outcome,selected,avg_lo,avg_hi,cap_lo,cap_hi,certificate`.
    /// Average cells stay empty before the first selected step. With
    /// `decimals: Some(k)`, four rounded-decimal columns are appended:
    /// `avg_lo_dec,avg_hi_dec,cap_lo_dec,cap_hi_dec`.
    pub fn to_csv(&self, decimals: Option<u32>) -> String {
        let mut out = String::from("step,lo,hi,outcome,selected,avg_lo,avg_hi,cap_lo,cap_hi,certificate");
        if decimals.is_some() {
            out.push_str(",avg_lo_dec,avg_hi_dec,cap_lo_dec,cap_hi_dec");
        }
        out.push('\n');
        let exact_opt = |q: &Option<Rational>| q.as_ref().map(Rational::to_string).unwrap_or_default();
        for s in &self.steps {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}",
                s.step,
                s.forecast.lo(),
                s.forecast.hi(),
                s.outcome,
                u8::from(s.selected),
                exact_opt(&s.running_avg_lo),
                exact_opt(&s.running_avg_hi),
                s.capital_lo,
                s.capital_hi,
                u8::from(s.certified),
            ));
            if let Some(places) = decimals {
                let dec_opt = |q: &Option<Rational>| {
                    q.as_ref().map(|q| decimal_string(q, places)).unwrap_or_default()
                };
                out.push_str(&format!(
                    ",{},{},{},{}",
                    dec_opt(&s.running_avg_lo),
                    dec_opt(&s.running_avg_hi),
                    decimal_string(&s.capital_lo, places),
                    decimal_string(&s.capital_hi, places),
                ));
            }
            out.push('\n');
        }
        out
    }
}

/// Exponent of the certified growth bound: `(2 eps^2 / 9) * count`.
fn certificate_exponent(eps: &Rational, count: usize) -> Rational {
    rat(2, 9) * eps * eps * int(count as i64)
}

/// Run both calibration processes along the streams for `horizon` steps.
/// Degenerate steps are recorded and the audit continues (the factors remain
/// well-defined). Errors on `eps` outside `(0, 1)` or stream exhaustion.
pub fn audit(
    iota: &dyn ForecastStream,
    omega: &dyn OutcomeStream,
    s: &SelectionFunction,
    eps: &Rational,
    horizon: usize,
) -> Result<AuditReport, Error> {
    check_eps(eps)?;
    // Per-factor lower bounds on the log accumulate on a fixed dyadic grid,
    // so the certified flag costs O(1) big-number work per step.
    const LN_BITS: u32 = 48;
    let mut prefix = PrequentialSituation::empty();
    let mut steps = Vec::with_capacity(horizon);
    let mut first_degenerate = None;
    let mut selected_count = 0usize;
    let mut sum_lo = Rational::zero();
    let mut sum_hi = Rational::zero();
    // Coprime-pair accumulators: a plain `Rational *=` re-reduces the whole
    // bignum every step, which turns long audits quadratic.
    let mut capital_lo = RunningProduct::one();
    let mut capital_hi = RunningProduct::one();
    let mut ln_capital_lo_floor = Rational::zero();
    for k in 0..horizon {
        let forecast = iota.forecast_at(k)?;
        let outcome = omega.outcome_at(k)?;
        if first_degenerate.is_none() && pair_is_degenerate(&forecast, outcome) {
            first_degenerate = Some(k + 1);
        }
        let selected = s.select(&prefix, &forecast);
        let discrepancy_lo = outcome_rational(outcome) - forecast.lo();
        let discrepancy_hi = outcome_rational(outcome) - forecast.hi();
        if selected {
            selected_count += 1;
            sum_lo += &discrepancy_lo;
            sum_hi += &discrepancy_hi;
            let f_lo = lower_factor(eps, &forecast, outcome);
            if !f_lo.is_one() {
                let (ln_lo, _) = ln_bounds(&f_lo, LN_BITS)?;
                ln_capital_lo_floor += dyadic_floor(&ln_lo, LN_BITS);
            }
            capital_lo.multiply(&f_lo);
            capital_hi.multiply(&upper_factor(eps, &forecast, outcome));
        }
        let (running_avg_lo, running_avg_hi) = if selected_count > 0 {
            let n = int(selected_count as i64);
            (Some(&sum_lo / &n), Some(&sum_hi / &n))
        } else {
            (None, None)
        };
        let certified = match &running_avg_lo {
            Some(avg) if *avg < -eps.clone() => {
                ln_capital_lo_floor >= certificate_exponent(eps, selected_count)
            }
            _ => false,
        };
        steps.push(AuditStep {
            step: k + 1,
            forecast: forecast.clone(),
            outcome,
            selected,
            discrepancy_lo,
            discrepancy_hi,
            selected_count,
            running_avg_lo,
            running_avg_hi,
            capital_lo: capital_lo.value(),
            capital_hi: capital_hi.value(),
            certified,
        });
        prefix.push(forecast, outcome);
    }
    Ok(AuditReport { eps: eps.clone(), steps, first_degenerate })
}

/// A machine-checked instance of the capital growth bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCertificate {
    /// 1-based step the certificate refers to.
    pub step: usize,
    pub eps: Rational,
    pub selected_count: usize,
    pub running_avg_lo: Rational,
    pub capital_lo: Rational,
    /// `(2 eps^2 / 9) * selected_count`: the certified bound is
    /// `capital_lo >= exp(exponent)`.
    pub exponent: Rational,
    /// Verified rational lower bound on `ln capital_lo`; at least `exponent`.
    pub ln_capital_lower: Rational,
}

impl fmt::Display for BoundCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step {}: {} selected, avg_lo {} < -{}; capital_lo {} >= exp({}) (ln bound {})",
            self.step,
            self.selected_count,
            self.running_avg_lo,
            self.eps,
            self.capital_lo,
            self.exponent,
            self.ln_capital_lower,
        )
    }
}

/// Check the growth bound at step `n` (1-based) of an audit report. Returns
/// the certificate when the report has a selected step by `n`, the running
/// lower average sits strictly below `-eps`, and the inequality
/// `ln capital_lo >= (2 eps^2 / 9) * selected_count` is confirmed by outward
/// rational logarithm bounds; `None` otherwise (including `n` out of range).
pub fn bound_certificate(report: &AuditReport, n: usize) -> Option<BoundCertificate> {
    if n == 0 || n > report.steps.len() {
        return None;
    }
    let step = &report.steps[n - 1];
    if step.selected_count == 0 {
        return None;
    }
    let avg = step.running_avg_lo.clone()?;
    if avg >= -report.eps.clone() {
        return None;
    }
    let exponent = certificate_exponent(&report.eps, step.selected_count);
    // The bound holds with strict slack, so some finite precision separates
    // the two sides; escalate a few times before giving up conservatively.
    let mut bits = 40;
    while bits <= 640 {
        let (ln_lower, _) = ln_bounds(&step.capital_lo, bits).ok()?;
        if ln_lower >= exponent {
            return Some(BoundCertificate {
                step: n,
                eps: report.eps.clone(),
                selected_count: step.selected_count,
                running_avg_lo: avg,
                capital_lo: step.capital_lo.clone(),
                exponent,
                ln_capital_lower: ln_lower,
            });
        }
        bits *= 2;
    }
    None
}

/// The dyadic epsilon grid `{1/2, 1/4, ..., 2^-10}` scanned by audits that
/// are not handed a specific epsilon.
pub fn eps_grid() -> Vec<Rational> {
    (1..=10).map(crate::rational::pow2_inv).collect()
}
