//! Seeded random fixtures: rationals, intervals, systems, and randomly
//! staked test processes whose defining inequalities hold by construction.
//!
//! Everything draws from a caller-supplied ChaCha generator, so a recorded
//! seed replays the exact fixture. No floating point is involved anywhere:
//! rationals are sampled by integer numerator/denominator draws and
//! Bernoulli outcomes by exact integer threshold comparison.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::Error;
use crate::forecast::{Gamble, IntervalForecast};
use crate::martingale::NodeProcess;
use crate::preq::{MixtureSpec, PreqProcess};
use crate::rational::{int, rat, Rational};
use crate::seq::{situations_to_depth, Outcome, PrequentialSituation, Situation};
use crate::system::ForecastingSystem;

/// A deterministically seeded generator for fixture construction.
pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Uniform-ish rational in `[0, 1]`: denominator up to 60, numerator up to
/// the denominator. Small denominators keep exact arithmetic downstream fast.
pub fn unit_rational(rng: &mut ChaCha20Rng) -> Rational {
    let den = rng.random_range(1..=60i64);
    let num = rng.random_range(0..=den);
    rat(num, den)
}

/// Random valid interval forecast (endpoints sorted unit rationals).
pub fn interval(rng: &mut ChaCha20Rng) -> IntervalForecast {
    let a = unit_rational(rng);
    let b = unit_rational(rng);
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    IntervalForecast::new(lo, hi).expect("sorted unit rationals form an interval")
}

/// Random interval that is neither `[0,0]` nor `[1,1]`, so it never forces
/// a degenerate step on both of its children.
pub fn nondegenerate_interval(rng: &mut ChaCha20Rng) -> IntervalForecast {
    loop {
        let i = interval(rng);
        if !i.is_point_zero() && !i.is_point_one() {
            return i;
        }
    }
}

/// Random gamble with payoffs in `[-4, 4]`, denominators up to 16.
pub fn gamble(rng: &mut ChaCha20Rng) -> Gamble {
    let payoff = |rng: &mut ChaCha20Rng| {
        let den = rng.random_range(1..=16i64);
        let num = rng.random_range(-4 * den..=4 * den);
        rat(num, den)
    };
    Gamble::new(payoff(rng), payoff(rng))
}

/// `size` distinct random intervals.
pub fn alphabet(rng: &mut ChaCha20Rng, size: usize) -> Vec<IntervalForecast> {
    let mut out: Vec<IntervalForecast> = Vec::with_capacity(size);
    let mut attempts = 0;
    while out.len() < size {
        attempts += 1;
        assert!(attempts < 10_000, "alphabet sampling stalled");
        let i = interval(rng);
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

/// `base` extended by `extra` further distinct random intervals — the fuzz
/// set a validator scans in addition to the forecasts a process announces.
pub fn fuzz_alphabet(
    rng: &mut ChaCha20Rng,
    base: &[IntervalForecast],
    extra: usize,
) -> Vec<IntervalForecast> {
    let mut out = base.to_vec();
    let mut attempts = 0;
    while out.len() < base.len() + extra {
        attempts += 1;
        assert!(attempts < 10_000, "fuzz sampling stalled");
        let i = interval(rng);
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

/// Random table-backed forecasting system, non-degenerate at every situation
/// (tabulated to `depth`, with a non-degenerate default beyond).
pub fn nondegenerate_system(rng: &mut ChaCha20Rng, depth: u32) -> ForecastingSystem {
    let mut table = HashMap::new();
    for w in situations_to_depth(depth) {
        table.insert(w, nondegenerate_interval(rng));
    }
    let default = nondegenerate_interval(rng);
    ForecastingSystem::from_table(table, default)
}

/// Multiplicative betting step: a factor pair `(m(0), m(1))`, both
/// non-negative, whose upper expectation under `forecast` is at most 1.
/// Built from a fair-or-better stake: buy at a price at or above the upper
/// endpoint, or sell at or below the lower endpoint, with the stake scaled
/// to keep both factors strictly positive.
fn betting_factors(rng: &mut ChaCha20Rng, forecast: &IntervalForecast) -> (Rational, Rational) {
    let rho = rat(rng.random_range(0..=7), 8);
    let buy = rng.random_range(0..2) == 0;
    if buy {
        // Price q in [hi, 1]: m(x) = 1 + c (x - q) with c chosen so m(0) > 0.
        let q = forecast.hi() + (int(1) - forecast.hi()) * unit_rational(rng);
        let c = if q.is_zero() { rho } else { rho / &q };
        (int(1) - &c * &q, int(1) + c * (int(1) - q))
    } else {
        // Price q in [0, lo]: m(x) = 1 - c (x - q) with c chosen so m(1) > 0.
        let q = forecast.lo() * unit_rational(rng);
        let one_minus_q = int(1) - &q;
        let c = if one_minus_q.is_zero() { rho } else { rho / &one_minus_q };
        (int(1) + &c * &q, int(1) - c * one_minus_q)
    }
}

/// Random test supermartingale for `phi`: starts at 1, stays strictly
/// positive, and multiplies by a fair-or-better betting factor at each node
/// to `depth` (frozen beyond). Satisfies the supermartingale inequality at
/// every node by construction.
pub fn test_supermartingale(
    rng: &mut ChaCha20Rng,
    phi: &ForecastingSystem,
    depth: u32,
) -> Result<NodeProcess, Error> {
    let mut table: HashMap<Situation, Rational> = HashMap::new();
    table.insert(Situation::empty(), Rational::one());
    for w in situations_to_depth(depth.saturating_sub(1)) {
        let value = table[&w].clone();
        let (m0, m1) = betting_factors(rng, &phi.forecast(&w)?);
        table.insert(w.child(Outcome::Zero), &value * m0);
        table.insert(w.child(Outcome::One), value * m1);
    }
    Ok(NodeProcess::from_table(table))
}

/// Random test superfarthingale over `alphabet`: starts at 1, strictly
/// positive, and multiplies by a fair-or-better betting factor for each
/// announced interval at each node to `depth`. Frozen beyond the table, so
/// steps announcing intervals outside `alphabet` leave the capital unchanged
/// — the process validates over any alphabet extension.
pub fn test_superfarthingale(
    rng: &mut ChaCha20Rng,
    alphabet: &[IntervalForecast],
    depth: u32,
) -> PreqProcess {
    assert!(!alphabet.is_empty(), "alphabet must be non-empty");
    let mut table: HashMap<PrequentialSituation, Rational> = HashMap::new();
    table.insert(PrequentialSituation::empty(), Rational::one());
    let mut frontier = vec![PrequentialSituation::empty()];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(frontier.len() * alphabet.len() * 2);
        for v in frontier {
            let value = table[&v].clone();
            for i in alphabet {
                let (m0, m1) = betting_factors(rng, i);
                let child0 = v.child(i.clone(), Outcome::Zero);
                let child1 = v.child(i.clone(), Outcome::One);
                table.insert(child0.clone(), &value * m0);
                table.insert(child1.clone(), &value * m1);
                next.push(child0);
                next.push(child1);
            }
        }
        frontier = next;
    }
    PreqProcess::from_table(table)
}

/// Random forecast stream of length `len`; roughly one step in eight
/// announces a point forecast (possibly `[0,0]` or `[1,1]`).
pub fn forecast_stream(rng: &mut ChaCha20Rng, len: usize) -> Vec<IntervalForecast> {
    (0..len)
        .map(|_| {
            if rng.random_range(0..8) == 0 {
                IntervalForecast::point(unit_rational(rng)).expect("unit rational is a probability")
            } else {
                interval(rng)
            }
        })
        .collect()
}

/// Uniform `BigUint` below `bound` by rejection on masked random bytes.
fn below(rng: &mut ChaCha20Rng, bound: &BigUint) -> BigUint {
    debug_assert!(!bound.is_zero());
    let bits = bound.bits();
    let bytes = bits.div_ceil(8) as usize;
    let excess = (bytes as u64) * 8 - bits;
    let mask = 0xffu8 >> excess;
    loop {
        let mut buf = vec![0u8; bytes];
        rng.fill(&mut buf[..]);
        buf[0] &= mask;
        let candidate = BigUint::from_bytes_be(&buf);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// Exact i.i.d. Bernoulli(`p`) outcomes: each draw compares a uniform
/// integer below the denominator against the numerator. Errors unless
/// `0 <= p <= 1`.
pub fn bernoulli_outcomes(
    rng: &mut ChaCha20Rng,
    p: &Rational,
    len: usize,
) -> Result<Vec<Outcome>, Error> {
    if p < &Rational::zero() || p > &Rational::one() {
        return Err(Error::ProbabilityOutOfRange { p: p.clone() });
    }
    let numer = p.numer().to_biguint().expect("checked non-negative");
    let denom = p.denom().to_biguint().expect("positive denominator");
    Ok((0..len)
        .map(|_| {
            if below(rng, &denom) < numer {
                Outcome::One
            } else {
                Outcome::Zero
            }
        })
        .collect())
}

/// `k` strictly positive rational weights with sum at most 1.
pub fn mixture_weights(rng: &mut ChaCha20Rng, k: usize) -> Vec<Rational> {
    assert!(k >= 1, "need at least one weight");
    let numerators: Vec<i64> = (0..k).map(|_| rng.random_range(1..=9i64)).collect();
    let total: i64 = numerators.iter().sum();
    let den = rng.random_range(total..=2 * total);
    numerators.into_iter().map(|n| rat(n, den)).collect()
}

/// Random mixture of `k` sampled test superfarthingales over `alphabet`.
pub fn mixture_fixture(
    rng: &mut ChaCha20Rng,
    alphabet: &[IntervalForecast],
    k: usize,
    depth: u32,
) -> MixtureSpec {
    let weights = mixture_weights(rng, k);
    let components = weights
        .into_iter()
        .map(|w| (w, test_superfarthingale(rng, alphabet, depth)))
        .collect();
    MixtureSpec::new(components).expect("sampled weights are positive and sum below 1")
}
