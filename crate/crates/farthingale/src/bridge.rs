//! Conversions between the two process kinds.
//!
//! A supermartingale for a fixed forecasting system sees outcome situations;
//! a superfarthingale sees full prequential records. The lift turns the
//! former into the latter by forfeiting on any deviation from the system's
//! own announcements; the restriction plays a superfarthingale along the
//! records the system itself would produce. On non-degenerate, compatible
//! records the two directions invert each other exactly.

use crate::error::Error;
use crate::martingale::NodeProcess;
use crate::preq::PreqProcess;
use crate::rational::{decimal_string, int, Rational};
use crate::seq::{
    pair_is_degenerate, stream_prefix, OutcomeStream, PrequentialSituation, Situation,
};
use crate::system::{prequential_along, ForecastingSystem};

/// Lifts a supermartingale for `phi` to a process on prequential situations:
/// `t`'s value at the outcome projection when the record is non-degenerate
/// and announces exactly `phi`'s forecasts, and 0 otherwise.
///
/// Guarantees, by construction: degenerate records get 0; records induced by
/// `phi` on any outcome string get exactly `t`'s value there; and the result
/// satisfies the superfarthingale inequality for arbitrary announced
/// forecasts (off-system branches have both children 0, whose upper
/// expectation is 0).
pub fn lift_to_farthingale(t: &NodeProcess, phi: &ForecastingSystem) -> PreqProcess {
    let t = t.clone();
    let phi = phi.clone();
    PreqProcess::from_fn(move |v| {
        let mut outcomes = Situation::empty();
        for (announced, x) in v.steps() {
            if pair_is_degenerate(announced, *x) || phi.forecast(&outcomes)? != *announced {
                return Ok(int(0));
            }
            outcomes.push(*x);
        }
        t.value(&outcomes)
    })
}

/// Restricts a prequential process to the records `phi` itself produces:
/// the value at `w` is `f`'s value at the record pairing `phi`'s forecasts
/// along `w` with the outcomes of `w`.
pub fn restrict_to_martingale(f: &PreqProcess, phi: &ForecastingSystem) -> NodeProcess {
    let f = f.clone();
    let phi = phi.clone();
    NodeProcess::from_fn(move |w| f.value(&prequential_along(&phi, w)?))
}

/// One step of an equivalence probe: both capitals after `step` outcomes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeRow {
    pub step: usize,
    pub martingale: Rational,
    pub farthingale: Rational,
}

impl ProbeRow {
    pub fn equal(&self) -> bool {
        self.martingale == self.farthingale
    }
}

/// Side-by-side trajectories of a supermartingale and a prequential process
/// along the records a system induces on one outcome stream.
#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub rows: Vec<ProbeRow>,
}

impl ProbeReport {
    pub fn all_equal(&self) -> bool {
        self.rows.iter().all(ProbeRow::equal)
    }

    /// First step where the two capitals differ, if any.
    pub fn first_mismatch(&self) -> Option<&ProbeRow> {
        self.rows.iter().find(|r| !r.equal())
    }

    /// CSV rendering: `step,capital_martingale,capital_farthingale,equal`.
    pub fn to_csv(&self, decimals: Option<u32>) -> String {
        let mut out = String::from("step,capital_martingale,capital_farthingale,equal");
        if decimals.is_some() {
            out.push_str(",martingale_dec,farthingale_dec");
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}",
                r.step,
                r.martingale,
                r.farthingale,
                u8::from(r.equal())
            ));
            if let Some(k) = decimals {
                out.push_str(&format!(
                    ",{},{}",
                    decimal_string(&r.martingale, k),
                    decimal_string(&r.farthingale, k)
                ));
            }
            out.push('\n');
        }
        out
    }
}

/// Runs `m` on the outcome prefixes of `omega` and `f` on the prequential
/// records `phi` induces on them, step by step to `horizon`, recording both
/// capitals. Errors if the induced record hits a degenerate step (the
/// comparison is only meaningful where the restriction/lift identity can
/// hold).
pub fn equivalence_probe(
    phi: &ForecastingSystem,
    omega: &dyn OutcomeStream,
    m: &NodeProcess,
    f: &PreqProcess,
    horizon: usize,
) -> Result<ProbeReport, Error> {
    let mut rows = Vec::with_capacity(horizon + 1);
    let mut w = Situation::empty();
    let mut v = PrequentialSituation::empty();
    rows.push(ProbeRow {
        step: 0,
        martingale: m.value(&w)?,
        farthingale: f.value(&v)?,
    });
    for n in 0..horizon {
        let forecast = phi.forecast(&w)?;
        let x = omega.outcome_at(n)?;
        if pair_is_degenerate(&forecast, x) {
            return Err(Error::DegenerateStep {
                step: n + 1,
                forecast: forecast.to_string(),
                outcome: x.bit(),
            });
        }
        w.push(x);
        v.push(forecast, x);
        rows.push(ProbeRow {
            step: n + 1,
            martingale: m.value(&w)?,
            farthingale: f.value(&v)?,
        });
    }
    Ok(ProbeReport { rows })
}

/// Convenience for probes and tests: the prequential record `phi` induces on
/// the first `len` outcomes of `omega`.
pub fn induced_record(
    phi: &ForecastingSystem,
    omega: &dyn OutcomeStream,
    len: usize,
) -> Result<PrequentialSituation, Error> {
    prequential_along(phi, &stream_prefix(omega, len)?)
}
