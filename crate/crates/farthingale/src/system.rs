//! Forecasting systems: maps from situations to interval forecasts.
//!
//! A forecasting system is the strategy of the forecaster — it fixes, at
//! every node of the event tree, the interval that would be announced there.
//! Systems given only through convergent endpoint approximations are handled
//! by [`ApproximableSystem`], and [`rationalize`] turns such a system into an
//! exactly-computable one that is at least as conservative everywhere, with
//! endpoint deviations that shrink rapidly with depth.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::forecast::IntervalForecast;
use crate::rational::{int, pow2_inv, Rational};
use crate::seq::{
    pair_is_degenerate, stream_prefix, ForecastStream, Outcome, OutcomeStream,
    PrequentialSituation, Situation,
};

type SystemFn = dyn Fn(&Situation) -> Result<IntervalForecast, Error> + Send + Sync;

/// A rule assigning an interval forecast to every situation.
#[derive(Clone)]
pub struct ForecastingSystem {
    eval: Arc<SystemFn>,
}

impl std::fmt::Debug for ForecastingSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("ForecastingSystem")
    }
}

impl ForecastingSystem {
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(&Situation) -> Result<IntervalForecast, Error> + Send + Sync + 'static,
    {
        ForecastingSystem { eval: Arc::new(f) }
    }

    /// Announces the same interval at every node.
    pub fn stationary(forecast: IntervalForecast) -> Self {
        ForecastingSystem::from_fn(move |_| Ok(forecast.clone()))
    }

    /// Looks nodes up in a finite table, falling back to `default` for
    /// situations that are not listed.
    pub fn from_table(table: HashMap<Situation, IntervalForecast>, default: IntervalForecast) -> Self {
        ForecastingSystem::from_fn(move |w| Ok(table.get(w).cloned().unwrap_or_else(|| default.clone())))
    }

    /// The forecast announced at `w`.
    pub fn forecast(&self, w: &Situation) -> Result<IntervalForecast, Error> {
        (self.eval)(w)
    }
}

/// The forecasts `phi` announces along the path to `w`, one per step (so the
/// result has length `|w|`; the forecast at `w` itself is not included).
pub fn forecasts_along(phi: &ForecastingSystem, w: &Situation) -> Result<Vec<IntervalForecast>, Error> {
    let mut prefix = Situation::empty();
    let mut out = Vec::with_capacity(w.len());
    for &x in w.outcomes() {
        out.push(phi.forecast(&prefix)?);
        prefix.push(x);
    }
    Ok(out)
}

/// The prequential record produced by playing `phi` against the outcomes of
/// `w`: each step pairs the announced forecast with the outcome that followed.
pub fn prequential_along(phi: &ForecastingSystem, w: &Situation) -> Result<PrequentialSituation, Error> {
    let mut prefix = Situation::empty();
    let mut v = PrequentialSituation::empty();
    for &x in w.outcomes() {
        v.push(phi.forecast(&prefix)?, x);
        prefix.push(x);
    }
    Ok(v)
}

/// Whether the record `v` is exactly what `phi` would have announced along
/// `v`'s own outcomes.
pub fn is_compatible(phi: &ForecastingSystem, v: &PrequentialSituation) -> Result<bool, Error> {
    let mut prefix = Situation::empty();
    for (announced, x) in v.steps() {
        if &phi.forecast(&prefix)? != announced {
            return Ok(false);
        }
        prefix.push(*x);
    }
    Ok(true)
}

/// Whether `phi`'s forecast contains the announced one at every step of `v`
/// (i.e. `phi` is at least as conservative as the record).
pub fn is_more_conservative_on(phi: &ForecastingSystem, v: &PrequentialSituation) -> Result<bool, Error> {
    let mut prefix = Situation::empty();
    for (announced, x) in v.steps() {
        if !phi.forecast(&prefix)?.contains(announced) {
            return Ok(false);
        }
        prefix.push(*x);
    }
    Ok(true)
}

/// Whether `wide(w)` contains `narrow(w)` at every situation of length at
/// most `depth`.
pub fn is_more_conservative(
    wide: &ForecastingSystem,
    narrow: &ForecastingSystem,
    depth: u32,
) -> Result<bool, Error> {
    for w in crate::seq::situations_to_depth(depth) {
        if !wide.forecast(&w)?.contains(&narrow.forecast(&w)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Adapter: the forecast stream obtained by running a system along a fixed
/// outcome stream.
pub struct SystemForecasts {
    pub system: ForecastingSystem,
    pub outcomes: Arc<dyn OutcomeStream>,
}

impl ForecastStream for SystemForecasts {
    fn forecast_at(&self, index: usize) -> Result<IntervalForecast, Error> {
        let prefix = stream_prefix(self.outcomes.as_ref(), index)?;
        self.system.forecast(&prefix)
    }
}

/// Multiplicative cap on the capital any test supermartingale for `phi` can
/// hold at `w`: one over the product, along the path, of the announced upper
/// probability of each `1` and lower improbability of each `0`.
///
/// Errors if some step pins the opposite outcome (the product would divide
/// by zero).
pub fn capital_ceiling(phi: &ForecastingSystem, w: &Situation) -> Result<Rational, Error> {
    let mut prefix = Situation::empty();
    let mut product = int(1);
    for &x in w.outcomes() {
        let forecast = phi.forecast(&prefix)?;
        let factor = match x {
            Outcome::One => forecast.hi().clone(),
            Outcome::Zero => int(1) - forecast.lo(),
        };
        if factor.is_zero() {
            return Err(Error::DegenerateSystem {
                node: prefix.to_string(),
                forecast: forecast.to_string(),
            });
        }
        product /= factor;
        prefix.push(x);
    }
    Ok(product)
}

type EndpointOracle = dyn Fn(&Situation, u32) -> Result<Rational, Error> + Send + Sync;

/// A forecasting system known only through endpoint approximations:
/// `lo(w, n)` and `hi(w, n)` return rationals within `2^-n` of the true
/// endpoints at `w`.
#[derive(Clone)]
pub struct ApproximableSystem {
    lo: Arc<EndpointOracle>,
    hi: Arc<EndpointOracle>,
    nondegenerate: bool,
}

impl std::fmt::Debug for ApproximableSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ApproximableSystem")
            .field("nondegenerate", &self.nondegenerate)
            .finish()
    }
}

impl ApproximableSystem {
    /// Wraps a pair of endpoint oracles. `nondegenerate` asserts that the
    /// underlying system never announces `{0}` or `{1}`; operations that
    /// need unbounded-odds protection check this flag.
    pub fn from_oracles<L, H>(lo: L, hi: H, nondegenerate: bool) -> Self
    where
        L: Fn(&Situation, u32) -> Result<Rational, Error> + Send + Sync + 'static,
        H: Fn(&Situation, u32) -> Result<Rational, Error> + Send + Sync + 'static,
    {
        ApproximableSystem {
            lo: Arc::new(lo),
            hi: Arc::new(hi),
            nondegenerate,
        }
    }

    /// An exactly-computable system viewed as (perfectly accurate) oracles.
    pub fn exact(system: &ForecastingSystem, nondegenerate: bool) -> Self {
        let lo_sys = system.clone();
        let hi_sys = system.clone();
        ApproximableSystem::from_oracles(
            move |w, _| Ok(lo_sys.forecast(w)?.lo().clone()),
            move |w, _| Ok(hi_sys.forecast(w)?.hi().clone()),
            nondegenerate,
        )
    }

    /// Lower endpoint at `w`, accurate to `2^-precision`.
    pub fn lo_approx(&self, w: &Situation, precision: u32) -> Result<Rational, Error> {
        (self.lo)(w, precision)
    }

    /// Upper endpoint at `w`, accurate to `2^-precision`.
    pub fn hi_approx(&self, w: &Situation, precision: u32) -> Result<Rational, Error> {
        (self.hi)(w, precision)
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.nondegenerate
    }

    fn require_nondegenerate(&self, op: &str) -> Result<(), Error> {
        if self.nondegenerate {
            Ok(())
        } else {
            Err(Error::NondegeneracyRequired { op: op.to_string() })
        }
    }
}

/// Iteration guard for the adaptive refinement loops below.
const MAX_REFINEMENT: u32 = 256;

/// An approximation, within `1/4`, of the capital ceiling at `w`, computed
/// from endpoint oracles alone.
///
/// Each path factor is bracketed by evaluating the relevant oracle at
/// precision `n` and widening by `2^-n` outward (clamped to `[0, 1]`); the
/// precision is raised until the bracket around the whole product is at most
/// `1/2` wide, and the midpoint is returned.
pub fn ceiling_estimate(approx: &ApproximableSystem, w: &Situation) -> Result<Rational, Error> {
    approx.require_nondegenerate("ceiling_estimate")?;
    let half = crate::rational::rat(1, 2);
    for n in 0..=MAX_REFINEMENT {
        let slack = pow2_inv(n);
        let mut lower = int(1);
        let mut upper = int(1);
        let mut prefix = Situation::empty();
        let mut bracketed = true;
        for &x in w.outcomes() {
            // Bracket the step's denominator: the announced upper probability
            // of a 1, or lower improbability of a 0.
            let (den_lo, den_hi) = match x {
                Outcome::One => {
                    let c = approx.hi_approx(&prefix, n)?;
                    ((&c - &slack).max(int(0)), (&c + &slack).min(int(1)))
                }
                Outcome::Zero => {
                    let c = approx.lo_approx(&prefix, n)?;
                    (
                        int(1) - (&c + &slack).min(int(1)),
                        int(1) - (&c - &slack).max(int(0)),
                    )
                }
            };
            if den_lo.is_zero() {
                // Cannot bound the factor yet; refine and retry.
                bracketed = false;
                break;
            }
            lower /= den_hi;
            upper /= den_lo;
            prefix.push(x);
        }
        if bracketed && &upper - &lower <= half {
            return Ok((lower + upper) / int(2));
        }
    }
    Err(Error::PrecisionExhausted {
        place: format!("ceiling_estimate at node {w}"),
        iterations: MAX_REFINEMENT,
    })
}

/// Integer cap derived from a `1/4`-accurate ceiling estimate `q`:
/// `max(1, ceil(q + 1))`. Separated out so the rounding rule is testable on
/// its own.
pub fn ceiling_from_estimate(q: &Rational) -> BigInt {
    let candidate = (q + int(1)).ceil().to_integer();
    candidate.max(BigInt::one())
}

/// A positive integer dominating the capital ceiling at `w`, computed from
/// endpoint oracles: the true ceiling `C'` satisfies `C' <= q + 1/4` for the
/// estimate `q`, and `q + 1/4 <= ceil(q + 1)`, so every test supermartingale
/// for the system is bounded by the returned integer at `w`.
pub fn integer_ceiling(approx: &ApproximableSystem, w: &Situation) -> Result<BigInt, Error> {
    Ok(ceiling_from_estimate(&ceiling_estimate(approx, w)?))
}

/// Precision index `N(w)` used by [`rationalize`]: the least `n` with
/// `2^-n <= 2^-|w| / (max(C(w0), C(w1)) + 2)`, where `C` is
/// [`integer_ceiling`] at the two children of `w`.
pub fn rationalize_precision(approx: &ApproximableSystem, w: &Situation) -> Result<u32, Error> {
    let c0 = integer_ceiling(approx, &w.child(Outcome::Zero))?;
    let c1 = integer_ceiling(approx, &w.child(Outcome::One))?;
    let cap = c0.max(c1) + BigInt::from(2);
    // Least n with 2^n >= 2^|w| * cap.
    let threshold: BigInt = (BigInt::one() << w.len()) * cap;
    let mut n = threshold.bits().saturating_sub(1) as u32;
    if (BigInt::one() << (n as usize)) < threshold {
        n += 1;
    }
    Ok(n)
}

/// Replaces an endpoint-approximable system by an exactly-computable one
/// that contains it: at `w`, the oracle values at precision `N(w) + 1` are
/// widened outward by `2^-(N(w)+1)` and clamped to `[0, 1]`.
///
/// The result contains the original forecast at every node, deviates from it
/// by at most `2^-N(w)` per endpoint, and never announces `{0}` or `{1}`.
pub fn rationalize(approx: &ApproximableSystem) -> Result<ForecastingSystem, Error> {
    approx.require_nondegenerate("rationalize")?;
    let approx = approx.clone();
    Ok(ForecastingSystem::from_fn(move |w| {
        let n = rationalize_precision(&approx, w)?;
        let slack = pow2_inv(n + 1);
        let lo = (approx.lo_approx(w, n + 1)? - &slack).max(int(0));
        let hi = (approx.hi_approx(w, n + 1)? + &slack).min(int(1));
        IntervalForecast::new(lo, hi)
    }))
}

/// Checks that `phi` never announces a degenerate step along the outcomes of
/// `w`; returns the first offending step if it does.
pub fn degenerate_step_along(
    phi: &ForecastingSystem,
    w: &Situation,
) -> Result<Option<(usize, IntervalForecast)>, Error> {
    let mut prefix = Situation::empty();
    for (k, &x) in w.outcomes().iter().enumerate() {
        let forecast = phi.forecast(&prefix)?;
        if pair_is_degenerate(&forecast, x) {
            return Ok(Some((k + 1, forecast)));
        }
        prefix.push(x);
    }
    Ok(None)
}
