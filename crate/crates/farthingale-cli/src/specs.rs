//! Parsers for the compact spec strings the CLI takes on the command line.
//!
//! Grammar (no whitespace inside a spec; `R` is a rational like `2` or
//! `3/10`; `@` binds a system to a conversion, split at the last `@`):
//!
//! - martingale process: `constant:R` | `jump:R` | `restrict:FARSPEC@SYSSPEC`
//! - farthingale process: `constant:R` | `jump:R` | `doubler` |
//!   `mixture:FILE` | `callower:EPS[@SELSPEC]` | `calupper:EPS[@SELSPEC]` |
//!   `lift:MARTSPEC@SYSSPEC`
//! - system: `stationary:LO,HI` | `table:FILE` | `spite` (binds the
//!   `--outcomes` stream as the hidden path)
//! - outcomes: `file:PATH` | `literal:BITS` | `bernoulli:P` (seeded)
//! - forecasts: `constant:LO,HI` | `file:PATH` (exhausts at end of file) |
//!   `cycle:FILE` (repeats the file forever)
//! - selection: `always` | `never` | `everykth:K` | `match:LO,HI`
//!
//! A mixture file holds `WEIGHT FARSPEC` lines; `#` comments and blank lines
//! are ignored. File paths must not contain `@`.

use std::fs;
use std::sync::Arc;

use farthingale::bridge::{lift_to_farthingale, restrict_to_martingale};
use farthingale::calibration::{
    lower_calibration_farthingale, upper_calibration_farthingale, SelectionFunction,
};
use farthingale::files::{parse_intervals, parse_outcomes, parse_system_table};
use farthingale::forecast::IntervalForecast;
use farthingale::generator::spite_system;
use farthingale::martingale::NodeProcess;
use farthingale::preq::{doubler, mixture, MixtureSpec, PreqProcess};
use farthingale::rational::{int, parse_rational, Rational};
use farthingale::sampling::{bernoulli_outcomes, rng};
use farthingale::seq::{ConstantForecasts, CycleForecasts, ForecastStream, Outcome, OutcomeStream};
use farthingale::system::ForecastingSystem;
use farthingale::Error;

/// Everything a spec may need besides its own text.
pub struct SpecContext {
    /// The materialized `--outcomes` stream, if the command has one; the
    /// `spite` system reads it as the hidden path.
    pub outcomes: Option<Arc<Vec<Outcome>>>,
}

impl SpecContext {
    pub fn empty() -> Self {
        SpecContext { outcomes: None }
    }

    fn outcomes(&self) -> Result<Arc<Vec<Outcome>>, Error> {
        self.outcomes.clone().ok_or_else(|| {
            Error::parse(0, "the spite system needs an --outcomes stream to bet against")
        })
    }
}

pub fn read_file(path: &str) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::parse(0, format!("cannot read {path}: {e}")))
}

pub fn parse_rational_arg(s: &str) -> Result<Rational, Error> {
    parse_rational(s.trim())
}

/// Interval list from a file of "lo hi" lines.
pub fn parse_intervals_file(path: &str) -> Result<Vec<IntervalForecast>, Error> {
    parse_intervals(&read_file(path)?)
}

/// `LO,HI` as an interval forecast.
pub fn parse_interval_arg(s: &str) -> Result<IntervalForecast, Error> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| Error::parse(0, format!("expected \"lo,hi\", found {s:?}")))?;
    IntervalForecast::new(parse_rational_arg(lo)?, parse_rational_arg(hi)?)
}

/// Materialize an outcome spec to exactly `len` outcomes (or however many a
/// file provides — files are not padded, so later exhaustion is reported by
/// the consuming operation).
pub fn parse_outcome_spec(spec: &str, seed: u64, len: usize) -> Result<Vec<Outcome>, Error> {
    match spec.split_once(':') {
        Some(("file", path)) => parse_outcomes(&read_file(path)?),
        Some(("literal", bits)) => parse_outcomes(bits),
        Some(("bernoulli", p)) => {
            let p = parse_rational_arg(p)?;
            bernoulli_outcomes(&mut rng(seed), &p, len)
        }
        _ => Err(Error::parse(
            0,
            format!("unknown outcome spec {spec:?} (expected file:, literal:, or bernoulli:)"),
        )),
    }
}

pub fn parse_forecast_spec(spec: &str) -> Result<Arc<dyn ForecastStream>, Error> {
    match spec.split_once(':') {
        Some(("constant", pair)) => Ok(Arc::new(ConstantForecasts(parse_interval_arg(pair)?))),
        Some(("file", path)) => {
            let list = parse_intervals(&read_file(path)?);
            Ok(Arc::new(list?) as Arc<dyn ForecastStream>)
        }
        Some(("cycle", path)) => {
            let list = parse_intervals(&read_file(path)?)?;
            if list.is_empty() {
                return Err(Error::parse(0, format!("cycle file {path} has no forecasts")));
            }
            Ok(Arc::new(CycleForecasts(list)))
        }
        _ => Err(Error::parse(
            0,
            format!("unknown forecast spec {spec:?} (expected constant:, file:, or cycle:)"),
        )),
    }
}

/// Returns the system together with a non-degeneracy claim (true only when
/// every forecast the system can announce is visibly non-degenerate).
pub fn parse_system_spec(
    spec: &str,
    ctx: &SpecContext,
) -> Result<(ForecastingSystem, bool), Error> {
    if spec == "spite" {
        return Ok((spite_system(ctx.outcomes()? as Arc<dyn OutcomeStream>), true));
    }
    match spec.split_once(':') {
        Some(("stationary", pair)) => {
            let i = parse_interval_arg(pair)?;
            let nondegenerate = !i.is_point_zero() && !i.is_point_one();
            Ok((ForecastingSystem::stationary(i), nondegenerate))
        }
        Some(("table", path)) => {
            let table = parse_system_table(&read_file(path)?)?;
            let nondegenerate = table.is_nondegenerate();
            Ok((table.into_system(), nondegenerate))
        }
        _ => Err(Error::parse(
            0,
            format!("unknown system spec {spec:?} (expected stationary:, table:, or spite)"),
        )),
    }
}

pub fn parse_selection_spec(spec: &str) -> Result<SelectionFunction, Error> {
    match spec {
        "always" => return Ok(SelectionFunction::always()),
        "never" => return Ok(SelectionFunction::never()),
        _ => {}
    }
    match spec.split_once(':') {
        Some(("everykth", k)) => {
            let k: usize = k
                .parse()
                .map_err(|_| Error::parse(0, format!("everykth needs an integer, found {k:?}")))?;
            if k == 0 {
                return Err(Error::parse(0, "everykth needs k >= 1"));
            }
            Ok(SelectionFunction::every_kth(k))
        }
        Some(("match", pair)) => Ok(SelectionFunction::matching(parse_interval_arg(pair)?)),
        _ => Err(Error::parse(
            0,
            format!("unknown selection spec {spec:?} (expected always, never, everykth:, or match:)"),
        )),
    }
}

/// Split `body@system` at the last `@` (system specs never contain `@`).
fn split_system(spec: &str, op: &str) -> Result<(String, String), Error> {
    spec.rsplit_once('@')
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .ok_or_else(|| Error::parse(0, format!("{op} needs \"...@SYSTEM\", found {spec:?}")))
}

pub fn parse_martingale_spec(spec: &str, ctx: &SpecContext) -> Result<NodeProcess, Error> {
    parse_martingale_inner(spec, ctx, 0)
}

fn parse_martingale_inner(spec: &str, ctx: &SpecContext, depth: u32) -> Result<NodeProcess, Error> {
    check_nesting(depth)?;
    match spec.split_once(':') {
        Some(("constant", r)) => Ok(NodeProcess::constant(parse_rational_arg(r)?)),
        Some(("jump", r)) => {
            let r = parse_rational_arg(r)?;
            Ok(NodeProcess::from_fn(move |w| {
                Ok(if w.is_empty() { int(1) } else { r.clone() })
            }))
        }
        Some(("restrict", rest)) => {
            let (far, sys) = split_system(rest, "restrict")?;
            let f = parse_farthingale_inner(&far, ctx, depth + 1)?;
            let (phi, _) = parse_system_spec(&sys, ctx)?;
            Ok(restrict_to_martingale(&f, &phi))
        }
        _ => Err(Error::parse(
            0,
            format!("unknown martingale spec {spec:?} (expected constant:, jump:, or restrict:)"),
        )),
    }
}

pub fn parse_farthingale_spec(spec: &str, ctx: &SpecContext) -> Result<PreqProcess, Error> {
    parse_farthingale_inner(spec, ctx, 0)
}

fn check_nesting(depth: u32) -> Result<(), Error> {
    if depth > 8 {
        return Err(Error::parse(0, "process specs nest too deeply (limit 8)"));
    }
    Ok(())
}

fn parse_farthingale_inner(
    spec: &str,
    ctx: &SpecContext,
    depth: u32,
) -> Result<PreqProcess, Error> {
    check_nesting(depth)?;
    if spec == "doubler" {
        return Ok(doubler());
    }
    match spec.split_once(':') {
        Some(("constant", r)) => Ok(PreqProcess::constant(parse_rational_arg(r)?)),
        Some(("jump", r)) => {
            let r = parse_rational_arg(r)?;
            Ok(PreqProcess::from_fn(move |v| {
                Ok(if v.is_empty() { int(1) } else { r.clone() })
            }))
        }
        Some(("mixture", path)) => {
            let text = read_file(path)?;
            let mut components = Vec::new();
            for (line_no, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (weight, far) = line.split_once(char::is_whitespace).ok_or_else(|| {
                    Error::parse(line_no + 1, format!("expected \"WEIGHT FARSPEC\", found {line:?}"))
                })?;
                let weight = parse_rational_arg(weight)
                    .map_err(|e| Error::parse(line_no + 1, e.to_string()))?;
                let f = parse_farthingale_inner(far.trim(), ctx, depth + 1)
                    .map_err(|e| Error::parse(line_no + 1, e.to_string()))?;
                components.push((weight, f));
            }
            Ok(mixture(&MixtureSpec::new(components)?))
        }
        Some(("callower", rest)) => {
            let (eps, s) = parse_calibration_args(rest)?;
            lower_calibration_farthingale(&s, &eps)
        }
        Some(("calupper", rest)) => {
            let (eps, s) = parse_calibration_args(rest)?;
            upper_calibration_farthingale(&s, &eps)
        }
        Some(("lift", rest)) => {
            let (mart, sys) = split_system(rest, "lift")?;
            let m = parse_martingale_inner(&mart, ctx, depth + 1)?;
            let (phi, _) = parse_system_spec(&sys, ctx)?;
            Ok(lift_to_farthingale(&m, &phi))
        }
        _ => Err(Error::parse(
            0,
            format!(
                "unknown farthingale spec {spec:?} (expected constant:, jump:, doubler, \
                 mixture:, callower:, calupper:, or lift:)"
            ),
        )),
    }
}

/// `EPS` or `EPS@SELSPEC` (selection defaults to `always`).
fn parse_calibration_args(rest: &str) -> Result<(Rational, SelectionFunction), Error> {
    match rest.split_once('@') {
        Some((eps, sel)) => Ok((parse_rational_arg(eps)?, parse_selection_spec(sel)?)),
        None => Ok((parse_rational_arg(rest)?, SelectionFunction::always())),
    }
}
