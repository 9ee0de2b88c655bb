//! Acceptance suite: one test per criterion, each ending in a single
//! `criterion N (...): PASS` line (printed on success, `FAIL` on unwind, and
//! mirrored by the per-test ok/FAILED line of the harness itself).
//!
//! Everything here is exact rational arithmetic; no tolerance appears
//! anywhere except where a criterion explicitly names one.

use std::collections::HashMap;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng as _;

use farthingale::bridge::{equivalence_probe, lift_to_farthingale, restrict_to_martingale};
use farthingale::calibration::{audit, bound_certificate, SelectionFunction};
use farthingale::files::parse_outcomes;
use farthingale::forecast::{
    eval_linear, lower_expectation, upper_expectation, Gamble, IntervalForecast,
};
use farthingale::generator::{greedy_random_path, spite_system};
use farthingale::ln_bounds;
use farthingale::martingale::{inflation_smooth, validate_supermartingale};
use farthingale::preq::{
    bound_ceiling, doubler, mixture, validate_superfarthingale, MixtureSpec, PreqProcess,
};
use farthingale::rational::{
    dyadic_ceil, dyadic_floor, int, pow2, pow2_inv, rat, Rational,
};
use farthingale::sampling::{
    alphabet, bernoulli_outcomes, forecast_stream, fuzz_alphabet, gamble, interval,
    mixture_fixture, nondegenerate_interval, nondegenerate_system, rng, test_superfarthingale,
    test_supermartingale,
};
use farthingale::seq::{
    situations_to_depth, ConstantForecasts, Outcome, OutcomeStream, PrequentialSituation,
};
use farthingale::system::{
    capital_ceiling, prequential_along, rationalize, rationalize_precision, ApproximableSystem,
    ForecastingSystem,
};

/// Prints the PASS line when defused, or a FAIL line if the test unwinds.
struct Verdict {
    number: u32,
    what: &'static str,
    passed: bool,
}

impl Verdict {
    fn open(number: u32, what: &'static str) -> Self {
        Verdict {
            number,
            what,
            passed: false,
        }
    }

    fn pass(mut self) {
        self.passed = true;
        println!("criterion {} ({}): PASS", self.number, self.what);
    }
}

impl Drop for Verdict {
    fn drop(&mut self) {
        if !self.passed {
            println!("criterion {} ({}): FAIL", self.number, self.what);
        }
    }
}

fn q(n: i64, d: i64) -> Rational {
    rat(n, d)
}

fn rational_pow(base: &Rational, exp: usize) -> Rational {
    let mut acc = int(1);
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

fn rational_abs(x: Rational) -> Rational {
    if x < int(0) {
        -x
    } else {
        x
    }
}

#[test]
fn criterion_01_doubler_along_the_spite_path() {
    let verdict = Verdict::open(1, "doubler along the spite path holds exactly 2^n for n <= 32");
    let start = Instant::now();

    // 33 hidden outcomes so the system forecasts every node up to depth 32.
    let omega = parse_outcomes("101101001110010110100101011010111").unwrap();
    assert_eq!(omega.len(), 33);
    let phi = spite_system(Arc::new(omega.clone()) as Arc<dyn OutcomeStream>);
    let m = restrict_to_martingale(&doubler(), &phi);
    let report = equivalence_probe(&phi, &omega, &m, &doubler(), 32).unwrap();

    assert!(report.all_equal(), "restriction must track the farthingale");
    assert_eq!(report.rows.len(), 33);
    for (n, row) in report.rows.iter().enumerate() {
        assert_eq!(
            row.farthingale,
            pow2(n as u32),
            "capital after {n} steps must be 2^{n}"
        );
    }

    assert!(
        start.elapsed() < Duration::from_secs(1),
        "criterion budget: under one second"
    );
    verdict.pass();
}

fn add_gambles(f: &Gamble, g: &Gamble) -> Gamble {
    Gamble::new(
        f.pay(Outcome::Zero) + g.pay(Outcome::Zero),
        f.pay(Outcome::One) + g.pay(Outcome::One),
    )
}

fn scale_gamble(lambda: &Rational, f: &Gamble) -> Gamble {
    Gamble::new(
        lambda * f.pay(Outcome::Zero),
        lambda * f.pay(Outcome::One),
    )
}

#[test]
fn criterion_02_coherence_of_interval_expectations() {
    let verdict = Verdict::open(2, "coherence laws on 10^4 instances; grid oracle on 10^3");
    let start = Instant::now();
    let mut rng = rng(20260817);

    for case in 0..10_000u32 {
        let i = interval(&mut rng);
        let f = gamble(&mut rng);
        let g = gamble(&mut rng);
        let lambda = q(rng.random_range(0..=6), rng.random_range(1..=6));
        let mu = q(rng.random_range(0..=6), rng.random_range(1..=6));
        let c = q(rng.random_range(-8..=8), rng.random_range(1..=8));

        let up_f = upper_expectation(&i, &f);
        let lo_f = lower_expectation(&i, &f);
        let up_g = upper_expectation(&i, &g);

        // Bounds: min f <= lower <= upper <= max f.
        let (p0, p1) = (f.pay(Outcome::Zero).clone(), f.pay(Outcome::One).clone());
        let (min_f, max_f) = if p0 <= p1 { (p0, p1) } else { (p1, p0) };
        assert!(min_f <= lo_f && lo_f <= up_f && up_f <= max_f, "case {case}: bounds");

        // Subadditivity, including the scaled form.
        assert!(
            upper_expectation(&i, &add_gambles(&f, &g)) <= &up_f + &up_g,
            "case {case}: subadditivity"
        );
        let combo = add_gambles(&scale_gamble(&lambda, &f), &scale_gamble(&mu, &g));
        assert!(
            upper_expectation(&i, &combo) <= &lambda * &up_f + &mu * &up_g,
            "case {case}: scaled subadditivity"
        );

        // Non-negative homogeneity.
        assert_eq!(
            upper_expectation(&i, &scale_gamble(&lambda, &f)),
            &lambda * &up_f,
            "case {case}: homogeneity"
        );

        // Constant translation.
        let shifted = add_gambles(&f, &Gamble::constant(c.clone()));
        assert_eq!(upper_expectation(&i, &shifted), &up_f + &c, "case {case}: translation");

        // Monotonicity: raise f pointwise by non-negative increments.
        let raised = Gamble::new(
            f.pay(Outcome::Zero) + q(rng.random_range(0..=4), 4),
            f.pay(Outcome::One) + q(rng.random_range(0..=4), 4),
        );
        assert!(upper_expectation(&i, &raised) >= up_f, "case {case}: monotonicity");

        // Lipschitz surrogate: |E(f) - E(g)| <= max |f - g|.
        let d0 = rational_abs(f.pay(Outcome::Zero) - g.pay(Outcome::Zero));
        let d1 = rational_abs(f.pay(Outcome::One) - g.pay(Outcome::One));
        let dist = if d0 >= d1 { d0 } else { d1 };
        let gap = rational_abs(&up_f - &up_g);
        assert!(gap <= dist, "case {case}: Lipschitz");

        // Conjugacy.
        assert_eq!(lo_f, -upper_expectation(&i, &f.negated()), "case {case}: conjugacy");
    }

    // Endpoint evaluation equals the brute-force max/min over the 65-point
    // k/64 grid of the interval (the expectation is linear in p).
    for case in 0..1_000u32 {
        let i = interval(&mut rng);
        let f = gamble(&mut rng);
        let width = i.hi() - i.lo();
        let mut grid_max: Option<Rational> = None;
        let mut grid_min: Option<Rational> = None;
        for k in 0..=64i64 {
            let p = i.lo() + &width * q(k, 64);
            let value = eval_linear(&p, &f).unwrap();
            grid_max = Some(grid_max.map_or(value.clone(), |m| if value > m { value.clone() } else { m }));
            grid_min = Some(grid_min.map_or(value.clone(), |m| if value < m { value } else { m }));
        }
        assert_eq!(upper_expectation(&i, &f), grid_max.unwrap(), "case {case}: grid max");
        assert_eq!(lower_expectation(&i, &f), grid_min.unwrap(), "case {case}: grid min");
    }

    assert!(
        start.elapsed() < Duration::from_secs(10),
        "criterion budget: under ten seconds"
    );
    verdict.pass();
}

fn pair_degenerate(i: &IntervalForecast, x: Outcome) -> bool {
    (i.is_point_zero() && x == Outcome::One) || (i.is_point_one() && x == Outcome::Zero)
}

#[test]
fn criterion_03_ceiling_lemmas() {
    let verdict = Verdict::open(3, "capital ceilings bound 100+100 sampled test processes, depth 6");
    let mut rng = rng(3);

    for instance in 0..100u32 {
        let phi = nondegenerate_system(&mut rng, 6);
        let t = test_supermartingale(&mut rng, &phi, 6).unwrap();
        let report = validate_supermartingale(&t, &phi, 6).unwrap();
        assert!(report.passes() && report.is_test(), "instance {instance}: sampled process");
        for w in situations_to_depth(6) {
            let value = t.value(&w).unwrap();
            let ceiling = capital_ceiling(&phi, &w).unwrap();
            assert!(value <= ceiling, "instance {instance}: T({w}) > ceiling");
        }
    }

    for instance in 0..100u32 {
        let size = rng.random_range(1..=2);
        let a = alphabet(&mut rng, size);
        let f = test_superfarthingale(&mut rng, &a, 6);
        let report = validate_superfarthingale(&f, &a, 6).unwrap();
        assert!(report.passes() && report.is_test(), "instance {instance}: sampled process");

        // Every non-degenerate prequential situation over the alphabet.
        let mut level = vec![PrequentialSituation::empty()];
        for _ in 0..6 {
            let mut next = Vec::with_capacity(level.len() * a.len() * 2);
            for v in &level {
                for i in &a {
                    for x in Outcome::BOTH {
                        if pair_degenerate(i, x) {
                            continue;
                        }
                        let child = v.child(i.clone(), x);
                        let value = f.value(&child).unwrap();
                        let ceiling = bound_ceiling(&child).unwrap();
                        assert!(value <= ceiling, "instance {instance}: F(v) > bound ceiling");
                        next.push(child);
                    }
                }
            }
            level = next;
        }
    }

    verdict.pass();
}

/// Random system drawn from a two-interval palette, so the emitted-forecast
/// alphabet stays small enough to scan prequentially.
fn palette_system(rng: &mut rand_chacha::ChaCha20Rng) -> (ForecastingSystem, Vec<IntervalForecast>) {
    let palette = [
        nondegenerate_interval(rng),
        nondegenerate_interval(rng),
    ];
    let mut table = HashMap::new();
    for w in situations_to_depth(6) {
        table.insert(w, palette[rng.random_range(0..2)].clone());
    }
    let phi = ForecastingSystem::from_table(table, palette[0].clone());
    let mut emitted = vec![palette[0].clone()];
    if palette[1] != palette[0] {
        emitted.push(palette[1].clone());
    }
    (phi, emitted)
}

#[test]
fn criterion_04_bridge_round_trip() {
    let verdict = Verdict::open(4, "restrict(lift(T)) = T on 100 instances; both conversions validate");
    let mut rng = rng(4);

    for instance in 0..100u32 {
        let (phi, emitted) = palette_system(&mut rng);
        let t = test_supermartingale(&mut rng, &phi, 6).unwrap();
        let lifted = lift_to_farthingale(&t, &phi);
        let restricted = restrict_to_martingale(&lifted, &phi);

        // Round trip at every node to depth 6. The system is non-degenerate
        // everywhere, so every induced prequential situation qualifies.
        for w in situations_to_depth(6) {
            assert!(
                prequential_along(&phi, &w).is_ok(),
                "instance {instance}: induced record must be non-degenerate"
            );
            assert_eq!(
                restricted.value(&w).unwrap(),
                t.value(&w).unwrap(),
                "instance {instance}: round trip differs at {w}"
            );
        }

        // The lift validates over the emitted alphabet plus five fuzz
        // intervals (it forfeits on announcements the system never makes).
        let alpha = fuzz_alphabet(&mut rng, &emitted, 5);
        let far_report = validate_superfarthingale(&lifted, &alpha, 2).unwrap();
        assert!(
            far_report.passes() && far_report.is_test(),
            "instance {instance}: lift must validate over {} intervals",
            alpha.len()
        );

        // The restriction validates as a test supermartingale for the system.
        let mart_report = validate_supermartingale(&restricted, &phi, 6).unwrap();
        assert!(
            mart_report.passes() && mart_report.is_test(),
            "instance {instance}: restriction must validate"
        );
    }

    verdict.pass();
}

#[test]
fn criterion_05_rationalization_containment_and_deviation() {
    let verdict = Verdict::open(5, "rationalize: containment + 2^-N deviation on 20 systems, depth 6");
    let mut rng = rng(5);

    for instance in 0..20u32 {
        let phi = nondegenerate_system(&mut rng, 6);
        let approx = ApproximableSystem::exact(&phi, true);
        let psi = rationalize(&approx).unwrap();

        for w in situations_to_depth(6) {
            let original = phi.forecast(&w).unwrap();
            let snapped = psi.forecast(&w).unwrap();
            assert!(
                snapped.lo() <= original.lo() && original.hi() <= snapped.hi(),
                "instance {instance}: containment fails at {w}"
            );
            let tolerance = pow2_inv(rationalize_precision(&approx, &w).unwrap());
            assert!(
                original.lo() - snapped.lo() <= tolerance,
                "instance {instance}: lower deviation exceeds 2^-N at {w}"
            );
            assert!(
                snapped.hi() - original.hi() <= tolerance,
                "instance {instance}: upper deviation exceeds 2^-N at {w}"
            );
        }

        // Inflation-smoothing carries sampled test supermartingales for the
        // original system over to the rationalized one.
        for _ in 0..3 {
            let t = test_supermartingale(&mut rng, &phi, 6).unwrap();
            assert!(validate_supermartingale(&t, &phi, 6).unwrap().passes());
            let smoothed = inflation_smooth(&t);
            let report = validate_supermartingale(&smoothed, &psi, 6).unwrap();
            assert!(
                report.passes(),
                "instance {instance}: smoothed process must validate for the rationalization"
            );
        }
    }

    verdict.pass();
}

#[test]
fn criterion_06_calibration_determinism_and_certificates() {
    let verdict = Verdict::open(6, "calibration: exact capital at step 100; certificate fires on Bernoulli(1/5)");
    let start = Instant::now();
    let band = IntervalForecast::new(q(2, 5), q(3, 5)).unwrap();
    let iota = ConstantForecasts(band);
    let always = SelectionFunction::always();

    // Deterministic part: all-zero outcomes, eps = 3/10.
    let zeros = vec![Outcome::Zero; 100];
    let report = audit(&iota, &zeros, &always, &q(3, 10), 100).unwrap();
    let last = report.final_step().unwrap();
    assert_eq!(
        last.capital_lo,
        rational_pow(&q(26, 25), 100),
        "lower capital after 100 zero outcomes"
    );

    let cert = bound_certificate(&report, 100).expect("certificate must fire at step 100");
    assert_eq!(cert.exponent, int(2), "2 eps^2 / 9 * 100 with eps = 3/10");
    assert!(cert.ln_capital_lower >= int(2));

    // Independent ln verification against e^2 with gap at most 2^-20:
    // ln((26/25)^100) must bracket tightly and sit strictly above 2.
    let (ln_lo, ln_hi) = ln_bounds(&last.capital_lo, 30).unwrap();
    assert!(&ln_hi - &ln_lo <= pow2_inv(20), "ln bracket gap tolerance");
    assert!(ln_lo > int(2), "capital must certifiably exceed e^2");

    // Statistical part: i.i.d. Bernoulli(1/5) outcomes, fixed seed. The mean
    // discrepancy against the lower endpoint is -1/5, so eps = 1/10 is the
    // natural threshold the certificate can clear.
    let omega = bernoulli_outcomes(&mut rng(20260817), &q(1, 5), 10_000).unwrap();
    let noisy = audit(&iota, &omega, &always, &q(1, 10), 10_000).unwrap();
    let fired = noisy
        .steps
        .iter()
        .find(|s| s.certified)
        .map(|s| s.step)
        .expect("certificate must fire within 10^4 steps");
    assert!(fired <= 10_000);
    assert!(
        bound_certificate(&noisy, fired).is_some(),
        "escalating verification must confirm the flagged step"
    );

    assert!(
        start.elapsed() < Duration::from_secs(10),
        "criterion budget: under ten seconds"
    );
    verdict.pass();
}

#[test]
fn criterion_07_calibrated_stream_capitals_stay_bounded() {
    let verdict = Verdict::open(7, "Bernoulli(1/2) vs [2/5,3/5]: both calibration capitals < 100 for 10^5 steps");

    // With eps = 3/10 over the constant band [2/5, 3/5], each selected step
    // multiplies the lower capital by 26/25 (outcome 0) or 47/50 (outcome 1),
    // and the upper capital by the mirrored pair. Both are test processes
    // under every probability in the band, and 1/2 lies in the band, so by
    // Ville's inequality each capital exceeds 100 with probability at most
    // 1/100 — a <= 1% nominal false-failure budget per process under
    // re-seeding (the drift E[factor] = 99/100 < 1 makes the realized chance
    // far smaller). Seed 7 below is pinned as a passing draw.
    //
    // Rather than multiplying 10^5 exact factors, certify through logs:
    // outward-rounded upper bounds u on ln(26/25) and ln(47/50) and a lower
    // bound L on ln(100) reduce the claim at every prefix to an exact
    // comparison of dyadic rationals, since ln capital <= a*u1 + b*u2 for
    // prefix counts (a, b). The bounds are certified, so a PASS here is a
    // proof; only a razor-thin margin could produce a spurious FAIL, and the
    // margin is enormous (the drift is about -0.0113 per step).
    let up = &q(26, 25);
    let down = &q(47, 50);
    let bits = 96;
    let (_, ln_up_hi) = ln_bounds(up, bits).unwrap();
    let (_, ln_down_hi) = ln_bounds(down, bits).unwrap();
    let (ln_100_lo, _) = ln_bounds(&int(100), bits).unwrap();
    let gain = dyadic_ceil(&ln_up_hi, bits);
    let loss = dyadic_ceil(&ln_down_hi, bits);
    let limit = dyadic_floor(&ln_100_lo, bits);

    let omega = bernoulli_outcomes(&mut rng(7), &q(1, 2), 100_000).unwrap();
    let mut ln_capital_lo = int(0);
    let mut ln_capital_hi = int(0);
    for (step, x) in omega.iter().enumerate() {
        match x {
            Outcome::Zero => {
                ln_capital_lo += &gain;
                ln_capital_hi += &loss;
            }
            Outcome::One => {
                ln_capital_lo += &loss;
                ln_capital_hi += &gain;
            }
        }
        assert!(
            ln_capital_lo < limit && ln_capital_hi < limit,
            "a calibration capital reached 100 at step {}",
            step + 1
        );
    }

    verdict.pass();
}

#[test]
fn criterion_08_greedy_path_never_lets_the_mixture_grow() {
    let verdict = Verdict::open(8, "greedy paths: mixture capital non-increasing over 10 streams, horizon 10^3");
    let mut rng = rng(8);

    // The finite universal mixture: the doubler at weight 1/2, the residual
    // 1/2 on constant cash.
    let spec = MixtureSpec::new(vec![(q(1, 2), doubler())]).unwrap();
    let universal = mixture(&spec);

    for stream in 0..10u32 {
        let iota = forecast_stream(&mut rng, 1_000);
        let run = greedy_random_path(&iota, &universal, 1_000).unwrap();
        let values = &run.trajectory.values;
        assert_eq!(values[0], int(1), "stream {stream}: unit start");
        for n in 0..1_000 {
            assert!(
                values[n + 1] <= values[n],
                "stream {stream}: capital rose at step {}",
                n + 1
            );
        }
        assert!(*run.trajectory.final_value() <= int(1));
        assert!(run.trajectory.first_degenerate.is_none(), "stream {stream}");
        for (i, x) in &run.trajectory.steps {
            assert!(!pair_degenerate(i, *x), "stream {stream}: degenerate step");
        }
    }

    verdict.pass();
}

#[test]
fn criterion_09_mixtures_validate_and_dominate() {
    let verdict = Verdict::open(9, "100 random mixtures validate to depth 6 and dominate w_k * F_k");
    let mut rng = rng(9);

    for instance in 0..100u32 {
        let size = rng.random_range(1..=2);
        let a = alphabet(&mut rng, size);
        let k = rng.random_range(1..=3);
        let spec = mixture_fixture(&mut rng, &a, k, 6);
        let mixed = mixture(&spec);

        let report = validate_superfarthingale(&mixed, &a, 6).unwrap();
        assert!(
            report.passes() && report.is_test(),
            "instance {instance}: mixture must validate"
        );

        // Pointwise domination of every weighted component over the whole
        // scanned tree.
        let components: Vec<(Rational, PreqProcess)> = spec.components().to_vec();
        let mut level = vec![PrequentialSituation::empty()];
        for _ in 0..=6 {
            let mut next = Vec::with_capacity(level.len() * a.len() * 2);
            for v in &level {
                let total = mixed.value(v).unwrap();
                for (weight, component) in &components {
                    assert!(
                        total >= weight * &component.value(v).unwrap(),
                        "instance {instance}: domination fails"
                    );
                }
                if v.len() < 6 {
                    for i in &a {
                        for x in Outcome::BOTH {
                            next.push(v.child(i.clone(), x));
                        }
                    }
                }
            }
            level = next;
        }
    }

    verdict.pass();
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_farthingale"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("no signal"),
        String::from_utf8(out.stdout).expect("utf8"),
    )
}

#[test]
fn criterion_10_cli_replay_determinism_and_exit_codes() {
    let verdict = Verdict::open(10, "CLI: byte-identical replays and the exit-code matrix");

    // Replay determinism: identical inputs and seed give byte-identical
    // bodies, a different seed does not.
    let args = [
        "audit", "--forecasts", "constant:2/5,3/5", "--outcomes", "bernoulli:1/5",
        "--seed", "11", "--eps", "1/10", "--horizon", "50",
    ];
    let first = run_cli(&args);
    let second = run_cli(&args);
    assert_eq!(first, second, "replies must be byte-identical");
    let mut reseeded = args;
    reseeded[6] = "12";
    assert_ne!(first.1, run_cli(&reseeded).1);

    // Exit-code matrix: 0 = clean, 1 = checked property fails or the game
    // breaks, 2 = unusable input. One probe of each class per subcommand.
    let matrix: &[(&[&str], i32)] = &[
        // validate martingale
        (&["validate", "martingale", "constant:1", "--system", "stationary:1/4,3/4", "--depth", "3"], 0),
        (&["validate", "martingale", "jump:2", "--system", "stationary:1/4,3/4", "--depth", "2"], 1),
        (&["validate", "martingale", "constant:oops", "--system", "stationary:1/4,3/4", "--depth", "2"], 2),
        // validate farthingale
        (&["validate", "farthingale", "callower:3/10", "--interval", "2/5,3/5", "--depth", "3"], 0),
        (&["validate", "farthingale", "jump:2", "--interval", "2/5,3/5", "--depth", "2"], 1),
        (&["validate", "farthingale", "doubler", "--depth", "2"], 2),
        // run martingale
        (&["run", "martingale", "restrict:doubler@spite", "--outcomes", "literal:0110", "--horizon", "4"], 0),
        (&["run", "martingale", "constant:1", "--outcomes", "literal:01", "--horizon", "9"], 1),
        (&["run", "martingale", "constant:1", "--outcomes", "bernoulli:7/5", "--horizon", "4"], 2),
        // run farthingale
        (&["run", "farthingale", "doubler", "--forecasts", "constant:0,1/2", "--outcomes", "literal:1111", "--horizon", "4"], 0),
        (&["run", "farthingale", "doubler", "--forecasts", "constant:0,1/2", "--outcomes", "literal:11", "--horizon", "4"], 1),
        (&["run", "farthingale", "doubler", "--forecasts", "constant:3/5,2/5", "--outcomes", "literal:1111", "--horizon", "4"], 2),
        // audit
        (&["audit", "--forecasts", "constant:2/5,3/5", "--outcomes", "literal:0000", "--eps", "3/10", "--horizon", "4"], 0),
        (&["audit", "--forecasts", "file:/nonexistent", "--outcomes", "literal:0000", "--eps", "3/10", "--horizon", "4"], 2),
        // generate
        (&["generate", "--process", "callower:3/10", "--forecasts", "constant:2/5,3/5", "--horizon", "5"], 0),
        (&["generate", "--process", "jump:2", "--forecasts", "constant:2/5,3/5", "--horizon", "5"], 1),
        (&["generate", "--process", "callower:2", "--forecasts", "constant:2/5,3/5", "--horizon", "5"], 2),
        // convert
        (&["convert", "lift", "constant:1", "--system", "stationary:1/4,3/4", "--depth", "3"], 0),
        (&["convert", "restrict", "doubler", "--system", "stationary:0,1/2", "--depth", "3"], 0),
        (&["convert", "lift", "constant:1", "--system", "stationary:1/4,3/4", "--depth", "99"], 2),
        // rationalize
        (&["rationalize", "--system", "stationary:1/3,2/3", "--depth", "2"], 0),
        (&["rationalize", "--system", "stationary:1,1", "--depth", "2"], 2),
        // probe
        (&["probe", "--system", "stationary:1/4,3/4", "--outcomes", "literal:0110", "--martingale", "constant:1", "--horizon", "4"], 0),
        (&["probe", "--system", "stationary:1/4,3/4", "--outcomes", "literal:0110", "--martingale", "constant:1", "--farthingale", "doubler", "--horizon", "4"], 1),
        (&["probe", "--system", "stationary:1/4,3/4", "--outcomes", "literal:0110", "--horizon", "4"], 2),
    ];
    for (args, expected) in matrix {
        let (code, _) = run_cli(args);
        assert_eq!(code, *expected, "exit code for {args:?}");
    }

    verdict.pass();
}
