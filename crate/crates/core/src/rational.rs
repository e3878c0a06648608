//! Exact rational scalars.
//!
//! Values of the coefficient function and of Euler factors are arbitrary-
//! precision rationals kept in lowest terms with positive denominator; the
//! wire format is the string `"num/den"`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary-precision rational, always normalized (lowest terms, den > 0).
pub type Rational = BigRational;

/// Rational from an integer pair. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational from an unsigned integer.
pub fn rat_u64(n: u64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// `p^k` as a rational, exact for any exponent.
pub fn rat_pow_u64(base: u64, exp: u32) -> Rational {
    BigRational::from_integer(BigInt::from(base).pow(exp))
}

/// Canonical `"num/den"` rendering, denominator always explicit.
pub fn to_fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `"num/den"` or a bare integer string.
pub fn parse_fraction(s: &str) -> Result<Rational, Error> {
    let bad = |_| Error::SpecSchema(format!("invalid rational literal {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(bad)?;
            let d: BigInt = d.trim().parse().map_err(bad)?;
            if d.is_zero() {
                return Err(Error::SpecSchema(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = s.trim().parse().map_err(bad)?;
            Ok(BigRational::from_integer(n))
        }
    }
}

/// Serde adapter: rationals on the wire are `"num/den"` strings.
pub mod serde_fraction {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use super::{parse_fraction, to_fraction_string, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_fraction_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_fraction(&text).map_err(de::Error::custom)
    }
}

/// Nearest-double conversion; rationals in scope always fit.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn rationals_are_normalized() {
        assert_eq!(rat(2, 4), rat(1, 2));
        assert_eq!(rat(-3, -6), rat(1, 2));
        assert_eq!(rat(3, -6), rat(-1, 2));
        assert!(rat(3, -6).denom() > &BigInt::zero());
    }

    #[test]
    fn fraction_strings_round_trip() {
        for r in [rat(23, 36), rat(-1, 2), rat_int(7), Rational::one()] {
            let s = to_fraction_string(&r);
            assert_eq!(parse_fraction(&s).unwrap(), r);
        }
        assert_eq!(parse_fraction("5").unwrap(), rat_int(5));
        assert_eq!(parse_fraction(" -7 / 3 ").unwrap(), rat(-7, 3));
    }

    #[test]
    fn fraction_parse_rejects_garbage() {
        assert!(parse_fraction("1/0").is_err());
        assert!(parse_fraction("x/2").is_err());
        assert!(parse_fraction("").is_err());
    }
}
