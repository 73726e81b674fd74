//! Exact rational scalars.
//!
//! All path-space arithmetic is carried out in arbitrary-precision rationals;
//! identities are checked by exact equality, never by tolerance.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used throughout the crate.
pub type Rational = num_rational::BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational from a numerator/denominator pair. Panics on a zero denominator.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    assert!(denom != 0, "zero denominator");
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `"p/q"` or a plain integer `"p"`, with arbitrary-precision parts.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = |detail: &str| Error::BadRational {
        literal: s.to_string(),
        detail: detail.to_string(),
    };
    let trimmed = s.trim();
    if trimmed.is_empty() {
        return Err(bad("empty literal"));
    }
    match trimmed.split_once('/') {
        None => {
            let n: BigInt = trimmed.parse().map_err(|_| bad("not an integer"))?;
            Ok(Rational::from_integer(n))
        }
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().map_err(|_| bad("bad numerator"))?;
            let d: BigInt = den.trim().parse().map_err(|_| bad("bad denominator"))?;
            if d.is_zero() {
                return Err(bad("zero denominator"));
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// Canonical `"p"` / `"p/q"` rendering (reduced, denominator positive).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest double; rationals seen here always fit comfortably.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of lossy parts for out-of-range extremes.
        let n = r.numer().to_f64().unwrap_or(f64::MAX);
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// True iff `r < 0`.
pub fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for (lit, shown) in [("3", "3"), ("1/2", "1/2"), ("-2/4", "-1/2"), ("10/5", "2")] {
            let r = parse_rational(lit).unwrap();
            assert_eq!(format_rational(&r), shown);
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        for lit in ["", "x", "1/0", "1/2/3", "1.5"] {
            assert!(parse_rational(lit).is_err(), "accepted {lit:?}");
        }
    }

    #[test]
    fn negative_denominator_normalises() {
        assert_eq!(format_rational(&parse_rational("1/-2").unwrap()), "-1/2");
    }
}
