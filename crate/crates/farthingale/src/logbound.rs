//! Certified rational bounds on the natural logarithm.
//!
//! [`ln_bounds`] returns exact rationals `(lo, hi)` with
//! `lo <= ln q <= hi` and `hi - lo <= 2^-precision_bits`. All rounding is
//! outward, so the bounds are safe to use in one-sided certificates.
//!
//! Method: write `q = 2^k * m` with `m` in `[3/4, 3/2)`; then
//! `ln m = 2 * atanh(t)` for `t = (m-1)/(m+1)` in `[-1/7, 1/5]`, computed by
//! the odd power series with an explicit geometric tail bound, and
//! `ln 2 = 2 * atanh(1/3)` the same way. The series argument never exceeds
//! `1/3`, so every extra term buys at least three bits.

use std::sync::OnceLock;

use num_traits::{Signed, Zero};

use crate::error::Error;
use crate::rational::{int, pow2_inv, rat, Rational};

/// Iteration guard for the series loops.
const MAX_TERMS: u32 = 10_000;

/// Bounds on `atanh(t)` with gap at most `budget`, for `|t| <= 1/3`.
fn atanh_bounds(t: &Rational, budget: &Rational) -> Result<(Rational, Rational), Error> {
    debug_assert!(t.abs() <= rat(1, 3), "atanh argument {t} out of range");
    let t2 = t * t;
    let one_minus_t2 = int(1) - &t2;
    let mut power = t.clone(); // t^(2j+1)
    let mut sum = Rational::zero();
    for j in 0..MAX_TERMS {
        sum += &power / int(2 * i64::from(j) + 1);
        power *= &t2;
        // The remainder after j+1 terms is sign(t) * sum of t^(2i+1)/(2i+1)
        // for i > j, bounded in absolute value by the geometric estimate
        // |t|^(2j+3) / ((2j+3) * (1 - t^2)).
        let tail = power.abs() / (int(2 * i64::from(j) + 3) * &one_minus_t2);
        if &tail + &tail <= *budget {
            return Ok((&sum - &tail, sum + tail));
        }
    }
    Err(Error::PrecisionExhausted {
        place: "atanh series".to_string(),
        iterations: MAX_TERMS,
    })
}

/// Bounds on `ln 2` with gap at most `budget`.
fn ln2_bounds(budget: &Rational) -> Result<(Rational, Rational), Error> {
    // ln 2 = 2 * atanh(1/3). Cache a high-precision bracket and reuse it
    // whenever it is tight enough.
    static CACHE: OnceLock<(Rational, Rational)> = OnceLock::new();
    let cached = CACHE.get_or_init(|| {
        let (lo, hi) = atanh_bounds(&rat(1, 3), &pow2_inv(130))
            .expect("fixed-precision atanh(1/3) converges");
        (lo.clone() + &lo, hi.clone() + &hi)
    });
    if &cached.1 - &cached.0 <= *budget {
        return Ok(cached.clone());
    }
    let half = budget / int(2);
    let (lo, hi) = atanh_bounds(&rat(1, 3), &half)?;
    Ok((lo.clone() + &lo, hi.clone() + &hi))
}

/// Exact rationals bracketing `ln q` to within `2^-precision_bits`.
/// Errors unless `q > 0`.
pub fn ln_bounds(q: &Rational, precision_bits: u32) -> Result<(Rational, Rational), Error> {
    if q <= &Rational::zero() {
        return Err(Error::LogOfNonPositive { value: q.clone() });
    }

    // Range-reduce: q = 2^k * m with m in [3/4, 3/2). Start from the bit
    // lengths and correct with a short loop.
    let mut k: i64 = q.numer().bits() as i64 - q.denom().bits() as i64;
    let mut m = scale_by_pow2(q, -k);
    let (lower_edge, upper_edge) = (rat(3, 4), rat(3, 2));
    while m < lower_edge {
        m = scale_by_pow2(&m, 1);
        k -= 1;
    }
    while m >= upper_edge {
        m = scale_by_pow2(&m, -1);
        k += 1;
    }

    let total_budget = pow2_inv(precision_bits);
    let half_budget = &total_budget / int(2);

    // ln m = 2 * atanh((m-1)/(m+1)), |t| <= 1/5 on the reduced range.
    let t = (&m - int(1)) / (m + int(1));
    let (alo, ahi) = atanh_bounds(&t, &(&half_budget / int(2)))?;
    let (mut lo, mut hi) = (alo.clone() + &alo, ahi.clone() + &ahi);

    if k != 0 {
        let k_abs = int(k.abs());
        let (l2lo, l2hi) = ln2_bounds(&(&half_budget / &k_abs))?;
        if k > 0 {
            lo += &k_abs * l2lo;
            hi += &k_abs * l2hi;
        } else {
            lo -= &k_abs * l2hi;
            hi -= &k_abs * l2lo;
        }
    }
    Ok((lo, hi))
}

/// `q * 2^shift` without building intermediate powers as rationals.
fn scale_by_pow2(q: &Rational, shift: i64) -> Rational {
    if shift >= 0 {
        Rational::new(q.numer() << (shift as usize), q.denom().clone())
    } else {
        Rational::new(q.numer().clone(), q.denom() << ((-shift) as usize))
    }
}
