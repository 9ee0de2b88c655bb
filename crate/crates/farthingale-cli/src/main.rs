//! `farthingale` — command-line driver for the betting-game engine.
//!
//! Every command reads compact spec strings (see `specs.rs` for the grammar),
//! computes with exact rational arithmetic, and writes a deterministic
//! machine-readable body (CSV, or `situation lo hi` rows for `rationalize`)
//! plus a short human summary.
//!
//! Output routing: with `--out PATH` the body goes to the file and the
//! summary to stdout; without it the body goes to stdout and the summary to
//! stderr. The body starts with `#` comment lines recording the command and,
//! when a sampler ran, the seed — everything needed to reproduce it, so the
//! body is byte-identical whichever route it takes.
//!
//! Exit codes: 0 success (validation clean, probe equal), 1 a checked
//! property failed or the game itself broke (violations, mismatch, exhausted
//! stream, degenerate system, capital errors), 2 bad usage (parse errors,
//! out-of-range parameters, depth over the `FARTHINGALE_MAX_DEPTH` limit,
//! default 12).

mod specs;

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use farthingale::bridge::{equivalence_probe, lift_to_farthingale, restrict_to_martingale};
use farthingale::calibration::{audit, bound_certificate, eps_grid};
use farthingale::files::format_forecast_rows;
use farthingale::forecast::IntervalForecast;
use farthingale::generator::greedy_random_path;
use farthingale::martingale::{run_capital, validate_supermartingale};
use farthingale::preq::{run_capital_preq, validate_superfarthingale};
use farthingale::rational::{decimal_string, Rational};
use farthingale::seq::{situations_to_depth, Outcome};
use farthingale::system::{prequential_along, rationalize, ApproximableSystem};
use farthingale::Error;

use specs::{
    parse_farthingale_spec, parse_interval_arg, parse_intervals_file, parse_martingale_spec,
    parse_outcome_spec, parse_rational_arg, parse_selection_spec, parse_system_spec, SpecContext,
};

#[derive(Parser)]
#[command(
    name = "farthingale",
    version,
    about = "Exact betting-game calculator: validate, replay, audit, and convert capital processes over binary outcomes with interval forecasts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a process tree for the defining supermartingale or
    /// superfarthingale inequalities
    #[command(subcommand)]
    Validate(ValidateCmd),
    /// Replay a process's capital along an outcome stream
    #[command(subcommand)]
    Run(RunCmd),
    /// Calibration audit: per-step discrepancies, capital bounds, and
    /// certified growth certificates
    Audit(AuditArgs),
    /// Build a forecast-consistent outcome path along which a process never
    /// grows
    Generate(GenerateArgs),
    /// Convert a process between the two game forms via a forecasting system
    #[command(subcommand)]
    Convert(ConvertCmd),
    /// Snap a forecasting system to exact rational forecasts, node by node
    Rationalize(RationalizeArgs),
    /// Check that a martingale and a farthingale report the same capital
    /// along the records a system induces on one outcome path
    Probe(ProbeArgs),
}

#[derive(Subcommand)]
enum ValidateCmd {
    /// Check `sum_x phi_hi-adjusted children <= parent` over every node of
    /// the outcome tree
    Martingale(ValidateMartingaleArgs),
    /// Check the interval upper expectation of the children against the
    /// parent over every forecast in an alphabet
    Farthingale(ValidateFarthingaleArgs),
}

#[derive(Subcommand)]
enum RunCmd {
    /// Capital of a martingale process along an outcome stream
    Martingale(RunMartingaleArgs),
    /// Capital of a farthingale process along paired forecast and outcome
    /// streams
    Farthingale(RunFarthingaleArgs),
}

#[derive(Subcommand)]
enum ConvertCmd {
    /// Lift a martingale to the prequential game; tabulates capital over the
    /// system's own records
    Lift(ConvertArgs),
    /// Restrict a farthingale to the outcome tree a system induces
    Restrict(ConvertArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Write the body to this file; the summary then goes to stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Append decimal rendering columns with this many places
    #[arg(long, value_name = "PLACES")]
    decimal: Option<u32>,
}

#[derive(Args)]
struct StreamArgs {
    /// Outcome stream: file:PATH | literal:BITS | bernoulli:P
    #[arg(long, value_name = "SPEC")]
    outcomes: Option<String>,
    /// Seed for sampled outcome streams
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ValidateMartingaleArgs {
    /// Process spec: constant:R | jump:R | restrict:FARSPEC@SYSSPEC
    spec: String,
    /// Forecasting system: stationary:LO,HI | table:FILE | spite
    #[arg(long, value_name = "SPEC")]
    system: String,
    /// Scan every node with at most this many outcomes
    #[arg(long, value_name = "N")]
    depth: u32,
    #[command(flatten)]
    stream: StreamArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ValidateFarthingaleArgs {
    /// Process spec: constant:R | jump:R | doubler | mixture:FILE |
    /// callower:EPS[@SEL] | calupper:EPS[@SEL] | lift:MARTSPEC@SYSSPEC
    spec: String,
    /// Forecast alphabet entry LO,HI (repeatable)
    #[arg(long = "interval", value_name = "LO,HI")]
    intervals: Vec<String>,
    /// Read additional alphabet entries ("lo hi" lines) from a file
    #[arg(long, value_name = "PATH")]
    alphabet_file: Option<String>,
    /// Scan every prequential node with at most this many steps
    #[arg(long, value_name = "N")]
    depth: u32,
    #[command(flatten)]
    stream: StreamArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RunMartingaleArgs {
    /// Process spec: constant:R | jump:R | restrict:FARSPEC@SYSSPEC
    spec: String,
    #[command(flatten)]
    stream: RequiredStreamArgs,
    /// Number of outcomes to consume
    #[arg(long, value_name = "N")]
    horizon: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RequiredStreamArgs {
    /// Outcome stream: file:PATH | literal:BITS | bernoulli:P
    #[arg(long, value_name = "SPEC")]
    outcomes: String,
    /// Seed for sampled outcome streams
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RunFarthingaleArgs {
    /// Process spec: constant:R | jump:R | doubler | mixture:FILE |
    /// callower:EPS[@SEL] | calupper:EPS[@SEL] | lift:MARTSPEC@SYSSPEC
    spec: String,
    /// Forecast stream: constant:LO,HI | file:PATH | cycle:FILE
    #[arg(long, value_name = "SPEC")]
    forecasts: String,
    #[command(flatten)]
    stream: RequiredStreamArgs,
    /// Number of steps to play
    #[arg(long, value_name = "N")]
    horizon: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct AuditArgs {
    /// Forecast stream: constant:LO,HI | file:PATH | cycle:FILE
    #[arg(long, value_name = "SPEC")]
    forecasts: String,
    #[command(flatten)]
    stream: RequiredStreamArgs,
    /// Miscalibration threshold in (0, 1)
    #[arg(long, value_name = "R")]
    eps: String,
    /// Which steps enter the average: always | never | everykth:K |
    /// match:LO,HI
    #[arg(long, value_name = "SPEC", default_value = "always")]
    select: String,
    /// Number of steps to audit
    #[arg(long, value_name = "N")]
    horizon: usize,
    /// Verify a capital-growth certificate at this step (default: horizon)
    #[arg(long, value_name = "N")]
    certificate_at: Option<usize>,
    /// Also report which thresholds on the dyadic grid 1/2 .. 1/1024 certify
    /// at the horizon
    #[arg(long)]
    scan_grid: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct GenerateArgs {
    /// Farthingale process the path plays against
    #[arg(long, value_name = "SPEC")]
    process: String,
    /// Forecast stream: constant:LO,HI | file:PATH | cycle:FILE
    #[arg(long, value_name = "SPEC")]
    forecasts: String,
    /// Number of outcomes to generate
    #[arg(long, value_name = "N")]
    horizon: usize,
    #[command(flatten)]
    stream: StreamArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ConvertArgs {
    /// Process spec to convert (martingale for lift, farthingale for
    /// restrict)
    spec: String,
    /// Forecasting system: stationary:LO,HI | table:FILE | spite
    #[arg(long, value_name = "SPEC")]
    system: String,
    /// Tabulate the converted process at every node up to this depth
    #[arg(long, value_name = "N")]
    depth: u32,
    #[command(flatten)]
    stream: StreamArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RationalizeArgs {
    /// Forecasting system: stationary:LO,HI | table:FILE | spite
    #[arg(long, value_name = "SPEC")]
    system: String,
    /// Emit rationalized forecasts at every node up to this depth
    #[arg(long, value_name = "N")]
    depth: u32,
    #[command(flatten)]
    stream: StreamArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ProbeArgs {
    /// Forecasting system: stationary:LO,HI | table:FILE | spite
    #[arg(long, value_name = "SPEC")]
    system: String,
    #[command(flatten)]
    stream: RequiredStreamArgs,
    /// Martingale side (default: restrict of the farthingale side)
    #[arg(long, value_name = "SPEC")]
    martingale: Option<String>,
    /// Farthingale side (default: lift of the martingale side)
    #[arg(long, value_name = "SPEC")]
    farthingale: Option<String>,
    /// Number of steps to compare
    #[arg(long, value_name = "N")]
    horizon: usize,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            process::exit(classify(&e));
        }
    }
}

/// 2 for malformed or out-of-range input, 1 for games that break mid-play.
fn classify(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::InvalidInterval { .. }
        | Error::ProbabilityOutOfRange { .. }
        | Error::EpsilonOutOfRange { .. }
        | Error::EmptyAlphabet
        | Error::InvalidWeights { .. }
        | Error::NondegeneracyRequired { .. } => 2,
        Error::StreamExhausted { .. }
        | Error::DegenerateStep { .. }
        | Error::DegenerateSystem { .. }
        | Error::NegativeCapital { .. }
        | Error::NotSuperfarthingaleAt { .. }
        | Error::PrecisionExhausted { .. }
        | Error::LogOfNonPositive { .. } => 1,
    }
}

fn max_depth() -> u32 {
    std::env::var("FARTHINGALE_MAX_DEPTH")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(12)
}

fn check_depth(depth: u32) -> Result<(), Error> {
    let limit = max_depth();
    if depth > limit {
        return Err(Error::parse(
            0,
            format!(
                "depth {depth} exceeds the scan limit {limit} \
                 (set FARTHINGALE_MAX_DEPTH to raise it)"
            ),
        ));
    }
    Ok(())
}

/// Materializes the (optional) outcome stream and reports whether a sampler
/// consumed the seed. `need` is the largest index any consumer can touch.
fn build_context(
    outcomes: &Option<String>,
    seed: u64,
    need: usize,
) -> Result<(SpecContext, bool), Error> {
    match outcomes {
        None => Ok((SpecContext::empty(), false)),
        Some(spec) => {
            let len = need.max(64) + 2;
            let materialized = parse_outcome_spec(spec, seed, len)?;
            let ctx = SpecContext {
                outcomes: Some(Arc::new(materialized)),
            };
            Ok((ctx, spec.starts_with("bernoulli:")))
        }
    }
}

/// `# farthingale <canonical invocation>` plus a seed line when a sampler
/// ran. `--out` never appears: the body must not depend on where it lands.
fn header(canon: &str, seed: Option<u64>) -> String {
    let mut h = format!("# farthingale {canon}\n");
    if let Some(s) = seed {
        let _ = writeln!(h, "# seed {s}");
    }
    h
}

fn emit(output: &OutputArgs, header: String, body: String, summary: String) -> Result<(), Error> {
    let text = format!("{header}{body}");
    match &output.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| {
                Error::parse(0, format!("cannot write {}: {e}", path.display()))
            })?;
            if !summary.is_empty() {
                println!("{summary}");
            }
        }
        None => {
            print!("{text}");
            if !summary.is_empty() {
                eprintln!("{summary}");
            }
        }
    }
    Ok(())
}

fn canon_flag(canon: &mut String, flag: &str, value: &str) {
    let _ = write!(canon, " --{flag} {value}");
}

fn canon_decimal(canon: &mut String, output: &OutputArgs) {
    if let Some(k) = output.decimal {
        canon_flag(canon, "decimal", &k.to_string());
    }
}

fn canon_stream(canon: &mut String, outcomes: &Option<String>) {
    if let Some(o) = outcomes {
        canon_flag(canon, "outcomes", o);
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// CSV for tabulated conversions: `node,capital` with an optional decimal
/// column.
fn node_capital_csv(rows: &[(String, Rational)], decimals: Option<u32>) -> String {
    let mut out = String::from("node,capital");
    if decimals.is_some() {
        out.push_str(",capital_dec");
    }
    out.push('\n');
    for (node, value) in rows {
        let _ = write!(out, "{node},{value}");
        if let Some(k) = decimals {
            let _ = write!(out, ",{}", decimal_string(value, k));
        }
        out.push('\n');
    }
    out
}

fn dispatch(command: Command) -> Result<i32, Error> {
    match command {
        Command::Validate(ValidateCmd::Martingale(a)) => validate_martingale_cmd(a),
        Command::Validate(ValidateCmd::Farthingale(a)) => validate_farthingale_cmd(a),
        Command::Run(RunCmd::Martingale(a)) => run_martingale_cmd(a),
        Command::Run(RunCmd::Farthingale(a)) => run_farthingale_cmd(a),
        Command::Audit(a) => audit_cmd(a),
        Command::Generate(a) => generate_cmd(a),
        Command::Convert(ConvertCmd::Lift(a)) => convert_cmd(a, true),
        Command::Convert(ConvertCmd::Restrict(a)) => convert_cmd(a, false),
        Command::Rationalize(a) => rationalize_cmd(a),
        Command::Probe(a) => probe_cmd(a),
    }
}

fn validate_martingale_cmd(a: ValidateMartingaleArgs) -> Result<i32, Error> {
    check_depth(a.depth)?;
    let (ctx, used_rng) =
        build_context(&a.stream.outcomes, a.stream.seed, a.depth as usize)?;
    let m = parse_martingale_spec(&a.spec, &ctx)?;
    let (phi, _) = parse_system_spec(&a.system, &ctx)?;
    let report = validate_supermartingale(&m, &phi, a.depth)?;

    let mut canon = format!("validate martingale {}", a.spec);
    canon_flag(&mut canon, "system", &a.system);
    canon_flag(&mut canon, "depth", &a.depth.to_string());
    canon_stream(&mut canon, &a.stream.outcomes);
    canon_decimal(&mut canon, &a.output);

    let summary = format!(
        "supermartingale: {} ({} of {} checks violated)\n\
         start capital: {}\nminimum value: {}\ntest process: {}",
        yes_no(report.passes()),
        report.violation_count(),
        report.checks.len(),
        report.start_value,
        report.min_value,
        yes_no(report.is_test()),
    );
    emit(
        &a.output,
        header(&canon, used_rng.then_some(a.stream.seed)),
        report.to_csv(a.output.decimal),
        summary,
    )?;
    Ok(if report.passes() { 0 } else { 1 })
}

fn validate_farthingale_cmd(a: ValidateFarthingaleArgs) -> Result<i32, Error> {
    check_depth(a.depth)?;
    let (ctx, used_rng) =
        build_context(&a.stream.outcomes, a.stream.seed, a.depth as usize)?;
    let f = parse_farthingale_spec(&a.spec, &ctx)?;

    let mut alphabet: Vec<IntervalForecast> = Vec::new();
    for pair in &a.intervals {
        alphabet.push(parse_interval_arg(pair)?);
    }
    if let Some(path) = &a.alphabet_file {
        alphabet.extend(parse_intervals_file(path)?);
    }
    let report = validate_superfarthingale(&f, &alphabet, a.depth)?;

    let mut canon = format!("validate farthingale {}", a.spec);
    for pair in &a.intervals {
        canon_flag(&mut canon, "interval", pair);
    }
    if let Some(path) = &a.alphabet_file {
        canon_flag(&mut canon, "alphabet-file", path);
    }
    canon_flag(&mut canon, "depth", &a.depth.to_string());
    canon_stream(&mut canon, &a.stream.outcomes);
    canon_decimal(&mut canon, &a.output);

    let summary = format!(
        "superfarthingale: {} ({} of {} checks violated)\n\
         start capital: {}\nminimum value: {}\ntest process: {}",
        yes_no(report.passes()),
        report.violation_count(),
        report.checks.len(),
        report.start_value,
        report.min_value,
        yes_no(report.is_test()),
    );
    emit(
        &a.output,
        header(&canon, used_rng.then_some(a.stream.seed)),
        report.to_csv(a.output.decimal),
        summary,
    )?;
    Ok(if report.passes() { 0 } else { 1 })
}

fn run_martingale_cmd(a: RunMartingaleArgs) -> Result<i32, Error> {
    let outcomes_spec = Some(a.stream.outcomes.clone());
    let (ctx, used_rng) = build_context(&outcomes_spec, a.stream.seed, a.horizon)?;
    let m = parse_martingale_spec(&a.spec, &ctx)?;
    let omega = ctx.outcomes.clone().expect("stream is required");
    let trajectory = run_capital(&m, &*omega, a.horizon)?;

    let mut canon = format!("run martingale {}", a.spec);
    canon_flag(&mut canon, "outcomes", &a.stream.outcomes);
    canon_flag(&mut canon, "horizon", &a.horizon.to_string());
    canon_decimal(&mut canon, &a.output);

    let summary = format!(
        "steps: {}\nfinal capital: {}\nmaximum capital: {}",
        a.horizon,
        trajectory.final_value(),
        trajectory.max_value(),
    );
    emit(
        &a.output,
        header(&canon, used_rng.then_some(a.stream.seed)),
        trajectory.to_csv(a.output.decimal),
        summary,
    )?;
    Ok(0)
}

fn run_farthingale_cmd(a: RunFarthingaleArgs) -> Result<i32, Error> {
    let outcomes_spec = Some(a.stream.outcomes.clone());
    let (ctx, used_rng) = build_context(&outcomes_spec, a.stream.seed, a.horizon)?;
    let f = parse_farthingale_spec(&a.spec, &ctx)?;
    let iota = specs::parse_forecast_spec(&a.forecasts)?;
    let omega = ctx.outcomes.clone().expect("stream is required");
    let trajectory = run_capital_preq(&f, &*iota, &*omega, a.horizon)?;

    let mut canon = format!("run farthingale {}", a.spec);
    canon_flag(&mut canon, "forecasts", &a.forecasts);
    canon_flag(&mut canon, "outcomes", &a.stream.outcomes);
    canon_flag(&mut canon, "horizon", &a.horizon.to_string());
    canon_decimal(&mut canon, &a.output);

    let mut summary = format!(
        "steps: {}\nfinal capital: {}\nmaximum capital: {}",
        a.horizon,
        trajectory.final_value(),
        trajectory.max_value(),
    );
    if let Some(k) = trajectory.first_degenerate {
        let _ = write!(
            summary,
            "\nfirst degenerate step: {k} (point forecast excluded the outcome)"
        );
    }
    emit(
        &a.output,
        header(&canon, used_rng.then_some(a.stream.seed)),
        trajectory.to_csv(a.output.decimal),
        summary,
    )?;
    Ok(0)
}

fn audit_cmd(a: AuditArgs) -> Result<i32, Error> {
    let outcomes_spec = Some(a.stream.outcomes.clone());
    let (ctx, used_rng) = build_context(&outcomes_spec, a.stream.seed, a.horizon)?;
    let iota = specs::parse_forecast_spec(&a.forecasts)?;
    let omega = ctx.outcomes.clone().expect("stream is required");
    let s = parse_selection_spec(&a.select)?;
    let eps = parse_rational_arg(&a.eps)?;
    let report = audit(&*iota, &*omega, &s, &eps, a.horizon)?;

    let mut canon = format!("audit --forecasts {}", a.forecasts);
    canon_flag(&mut canon, "outcomes", &a.stream.outcomes);
    canon_flag(&mut canon, "eps", &a.eps);
    canon_flag(&mut canon, "select", &a.select);
    canon_flag(&mut canon, "horizon", &a.horizon.to_string());
    if let Some(n) = a.certificate_at {
        canon_flag(&mut canon, "certificate-at", &n.to_string());
    }
    if a.scan_grid {
        canon.push_str(" --scan-grid");
    }
    canon_decimal(&mut canon, &a.output);

    let selected = report
        .final_step()
        .map(|st| st.selected_count)
        .unwrap_or(0);
    let mut summary = format!("steps: {}\nselected: {selected}", report.horizon());
    if let Some(k) = report.first_degenerate {
        let _ = write!(summary, "\nfirst degenerate step: {k}");
    }
    let cert_step = a.certificate_at.unwrap_or(a.horizon);
    match bound_certificate(&report, cert_step) {
        Some(cert) => {
            let _ = write!(
                summary,
                "\ncertificate at step {}: {} selected, avg_lo {} < -{}; \
                 capital_lo ~ {} >= exp({}) certified (ln capital_lo >= {} ~ {})",
                cert.step,
                cert.selected_count,
                cert.running_avg_lo,
                cert.eps,
                decimal_string(&cert.capital_lo, 6),
                cert.exponent,
                cert.exponent,
                decimal_string(&cert.ln_capital_lower, 6),
            );
        }
        None => {
            let _ = write!(summary, "\ncertificate at step {cert_step}: none");
        }
    }
    if a.scan_grid {
        for grid_eps in eps_grid() {
            let grid_report = audit(&*iota, &*omega, &s, &grid_eps, a.horizon)?;
            let fired = bound_certificate(&grid_report, a.horizon).is_some();
            let _ = write!(summary, "\ngrid eps {grid_eps}: certificate {}", yes_no(fired));
        }
    }
    emit(
        &a.output,
        header(&canon, used_rng.then_some(a.stream.seed)),
        report.to_csv(a.output.decimal),
        summary,
    )?;
    Ok(0)
}

fn generate_cmd(a: GenerateArgs) -> Result<i32, Error> {
    let (ctx, used_rng) = build_context(&a.stream.outcomes, a.stream.seed, a.horizon)?;
    let f = parse_farthingale_spec(&a.process, &ctx)?;
    let iota = specs::parse_forecast_spec(&a.forecasts)?;
    let run = greedy_random_path(&*iota, &f, a.horizon)?;

    let mut canon = format!("generate --process {}", a.process);
    canon_flag(&mut canon, "forecasts", &a.forecasts);
    canon_flag(&mut canon, "horizon", &a.horizon.to_string());
    canon_stream(&mut canon, &a.stream.outcomes);
    canon_decimal(&mut canon, &a.output);

    let path: String = run
        .outcomes
        .iter()
        .map(|x| match x {
            Outcome::Zero => '0',
            Outcome::One => '1',
        })
        .collect();
    let summary = format!(
        "path: {}\nfinal capital: {}\nstart capital: {}",
        if path.is_empty() { "-" } else { &path },
        run.trajectory.final_value(),
        run.trajectory.values[0],
    );
    emit(
        &a.output,
        header(&canon, used_rng.then_some(a.stream.seed)),
        run.trajectory.to_csv(a.output.decimal),
        summary,
    )?;
    Ok(0)
}

fn convert_cmd(a: ConvertArgs, lift: bool) -> Result<i32, Error> {
    check_depth(a.depth)?;
    let (ctx, used_rng) =
        build_context(&a.stream.outcomes, a.stream.seed, a.depth as usize)?;
    let (phi, _) = parse_system_spec(&a.system, &ctx)?;

    let mut rows: Vec<(String, Rational)> = Vec::new();
    if lift {
        let m = parse_martingale_spec(&a.spec, &ctx)?;
        let f = lift_to_farthingale(&m, &phi);
        for w in situations_to_depth(a.depth) {
            let v = prequential_along(&phi, &w)?;
            rows.push((w.to_string(), f.value(&v)?));
        }
    } else {
        let f = parse_farthingale_spec(&a.spec, &ctx)?;
        let m = restrict_to_martingale(&f, &phi);
        for w in situations_to_depth(a.depth) {
            rows.push((w.to_string(), m.value(&w)?));
        }
    }

    let verb = if lift { "lift" } else { "restrict" };
    let mut canon = format!("convert {verb} {}", a.spec);
    canon_flag(&mut canon, "system", &a.system);
    canon_flag(&mut canon, "depth", &a.depth.to_string());
    canon_stream(&mut canon, &a.stream.outcomes);
    canon_decimal(&mut canon, &a.output);

    let summary = format!(
        "nodes: {}\nstart capital: {}",
        rows.len(),
        rows[0].1,
    );
    emit(
        &a.output,
        header(&canon, used_rng.then_some(a.stream.seed)),
        node_capital_csv(&rows, a.output.decimal),
        summary,
    )?;
    Ok(0)
}

fn rationalize_cmd(a: RationalizeArgs) -> Result<i32, Error> {
    check_depth(a.depth)?;
    let (ctx, used_rng) =
        build_context(&a.stream.outcomes, a.stream.seed, a.depth as usize)?;
    let (phi, nondegenerate) = parse_system_spec(&a.system, &ctx)?;
    let approx = ApproximableSystem::exact(&phi, nondegenerate);
    let psi = rationalize(&approx)?;

    let mut rows = Vec::new();
    for w in situations_to_depth(a.depth) {
        let forecast = psi.forecast(&w)?;
        rows.push((w, forecast));
    }

    let mut canon = format!("rationalize --system {}", a.system);
    canon_flag(&mut canon, "depth", &a.depth.to_string());
    canon_stream(&mut canon, &a.stream.outcomes);

    let summary = format!("nodes: {}", rows.len());
    emit(
        &a.output,
        header(&canon, used_rng.then_some(a.stream.seed)),
        format_forecast_rows(&rows),
        summary,
    )?;
    Ok(0)
}

fn probe_cmd(a: ProbeArgs) -> Result<i32, Error> {
    let outcomes_spec = Some(a.stream.outcomes.clone());
    let (ctx, used_rng) = build_context(&outcomes_spec, a.stream.seed, a.horizon)?;
    let (phi, _) = parse_system_spec(&a.system, &ctx)?;
    let (mart_spec, far_spec) = match (&a.martingale, &a.farthingale) {
        (Some(m), Some(f)) => (m.clone(), f.clone()),
        (Some(m), None) => (m.clone(), format!("lift:{m}@{}", a.system)),
        (None, Some(f)) => (format!("restrict:{f}@{}", a.system), f.clone()),
        (None, None) => {
            return Err(Error::parse(
                0,
                "probe needs --martingale, --farthingale, or both",
            ))
        }
    };
    let m = parse_martingale_spec(&mart_spec, &ctx)?;
    let f = parse_farthingale_spec(&far_spec, &ctx)?;
    let omega = ctx.outcomes.clone().expect("stream is required");
    let report = equivalence_probe(&phi, &*omega, &m, &f, a.horizon)?;

    let mut canon = format!("probe --system {}", a.system);
    canon_flag(&mut canon, "outcomes", &a.stream.outcomes);
    canon_flag(&mut canon, "martingale", &mart_spec);
    canon_flag(&mut canon, "farthingale", &far_spec);
    canon_flag(&mut canon, "horizon", &a.horizon.to_string());
    canon_decimal(&mut canon, &a.output);

    let summary = match report.first_mismatch() {
        None => format!(
            "equal along the path: yes ({} steps)\nfinal capital: {}",
            a.horizon,
            report.rows.last().expect("nonempty").martingale,
        ),
        Some(row) => format!(
            "equal along the path: no\nfirst mismatch at step {}: martingale {} vs farthingale {}",
            row.step, row.martingale, row.farthingale,
        ),
    };
    emit(
        &a.output,
        header(&canon, used_rng.then_some(a.stream.seed)),
        report.to_csv(a.output.decimal),
        summary,
    )?;
    Ok(if report.all_equal() { 0 } else { 1 })
}
