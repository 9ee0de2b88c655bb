//! Exact rational arithmetic helpers.
//!
//! All capital values, forecasts and bounds in this crate are arbitrary-
//! precision rationals; nothing is ever rounded unless a caller explicitly
//! asks for a decimal rendering or a dyadic floor/ceiling.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

/// `n / d` as a [`Rational`]. Panics if `d == 0`; intended for literals.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `n` as a [`Rational`].
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^n` as a [`Rational`].
pub fn pow2(n: u32) -> Rational {
    Rational::from_integer(BigInt::one() << (n as usize))
}

/// `2^-n` as a [`Rational`].
pub fn pow2_inv(n: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << (n as usize))
}

/// Parses `"a/b"` or `"a"` (optionally signed) into a [`Rational`].
///
/// This is the textual syntax used by every file format and CLI flag in the
/// crate; [`Rational`]'s `Display` produces the same syntax back.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| Error::parse(0, format!("invalid rational {s:?}: {e}")))
}

/// Running product of positive rationals, kept as a coprime numerator /
/// denominator pair.
///
/// Multiplying a [`Rational`] accumulator by a small factor costs a full gcd
/// of the accumulated bignums every step; over a long run that is quadratic
/// in the horizon. This type restores the invariant by reducing only against
/// the incoming factor's two small components (one short division and one
/// small gcd each), so a step costs time linear in the accumulated size.
#[derive(Clone, Debug)]
pub struct RunningProduct {
    num: BigInt,
    den: BigInt,
}

impl RunningProduct {
    pub fn one() -> Self {
        RunningProduct {
            num: BigInt::one(),
            den: BigInt::one(),
        }
    }

    /// Multiplies by `factor`, which must be positive.
    pub fn multiply(&mut self, factor: &Rational) {
        debug_assert!(factor.is_positive(), "RunningProduct needs positive factors");
        use num_integer::Integer as _;
        let p = factor.numer();
        let q = factor.denom();
        // gcd(num, q) and gcd(den, p) are full gcds computed cheaply via one
        // remainder by the small operand; dividing them out of both sides of
        // each pair keeps every cross-pair coprime, so the invariant holds.
        let g1 = (&self.num % q).gcd(q);
        let g2 = (&self.den % p).gcd(p);
        self.num = (&self.num / &g1) * (p / &g2);
        self.den = (&self.den / &g2) * (q / &g1);
    }

    /// The current value. The pair is coprime with a positive denominator —
    /// exactly the canonical form — so the result compares and hashes like
    /// any other [`Rational`].
    pub fn value(&self) -> Rational {
        Rational::new_raw(self.num.clone(), self.den.clone())
    }
}

/// Largest integer multiple of `2^-bits` that is `<= q`.
///
/// Used to compress running sums of logarithm bounds: flooring each summand
/// to a fixed dyadic grid keeps denominators bounded by `2^bits` while
/// preserving the direction of the bound.
pub fn dyadic_floor(q: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << (bits as usize);
    let scaled = q * Rational::from_integer(scale.clone());
    Rational::new(scaled.floor().to_integer(), scale)
}

/// Smallest integer multiple of `2^-bits` that is `>= q`.
pub fn dyadic_ceil(q: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << (bits as usize);
    let scaled = q * Rational::from_integer(scale.clone());
    Rational::new(scaled.ceil().to_integer(), scale)
}

/// Renders `q` as a decimal string with exactly `places` digits after the
/// point, rounding half away from zero.
///
/// The rendering is deterministic and never consults floating point, so CSV
/// output is reproducible byte for byte.
pub fn decimal_string(q: &Rational, places: u32) -> String {
    let scale = BigInt::from(10u8).pow(places);
    let scaled = q * Rational::from_integer(scale.clone());
    // Round half away from zero: floor(|x| + 1/2) with the sign restored.
    let half = rat(1, 2);
    let magnitude = (scaled.abs() + half).floor().to_integer();
    let sign = if q.is_negative() && !magnitude.is_zero() {
        "-"
    } else {
        ""
    };
    if places == 0 {
        return format!("{sign}{magnitude}");
    }
    let (int_part, frac_part) = (magnitude.clone() / &scale, magnitude % &scale);
    format!(
        "{sign}{int_part}.{frac:0>width$}",
        frac = frac_part,
        width = places as usize
    )
}
