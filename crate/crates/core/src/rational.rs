//! Exact rationals and their text encoding.
//!
//! Rationals are written as `numerator/denominator` with a positive,
//! always-present denominator so the encoding is lossless and byte-stable.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn from_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn from_frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Encodes as `n/d`, reduced, `d > 0`.
pub fn encode(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `n/d` or a bare integer `n`.
pub fn decode(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse = |part: &str| {
        part.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
    };
    match s.split_once('/') {
        Some((n, d)) => from_parts(parse(n)?, parse(d)?),
        None => Ok(Rational::from_integer(parse(s)?)),
    }
}

pub fn from_parts(num: BigInt, den: BigInt) -> Result<Rational> {
    if den.is_zero() {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(Rational::new(num, den))
}

/// Sign as -1, 0 or 1.
pub fn sign(q: &Rational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or_else(|| {
        // numerator or denominator beyond f64 range; scale through the ratio of bit lengths
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub(crate) fn pow_u64(base: u64, exp: u32) -> Rational {
    let mut acc = BigInt::one();
    let b = BigInt::from(base);
    for _ in 0..exp {
        acc *= &b;
    }
    Rational::from_integer(acc)
}
