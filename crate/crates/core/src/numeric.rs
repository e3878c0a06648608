//! Scalar values that are either exact rationals or compensated doubles.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::rational::{self, parse_fraction, to_fraction_string, Rational};

/// Arithmetic carried by a series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithMode {
    Exact,
    Float,
}

/// A series value in the arithmetic of its evaluation.
///
/// Serializes as a `"num/den"` string when exact and as a JSON number when
/// float, so exact reports round-trip bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Float(f64),
}

impl Scalar {
    pub fn mode(&self) -> ArithMode {
        match self {
            Scalar::Exact(_) => ArithMode::Exact,
            Scalar::Float(_) => ArithMode::Float,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational::to_f64(r),
            Scalar::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, Scalar::Exact(r) if num_traits::Zero::is_zero(r))
    }

    /// Multiply by an exact rational, staying exact if we are exact.
    pub fn mul_rational(&self, r: &Rational) -> Scalar {
        match self {
            Scalar::Exact(x) => Scalar::Exact(x * r),
            Scalar::Float(x) => Scalar::Float(x * rational::to_f64(r)),
        }
    }

    /// Absolute difference as a double; exactly 0.0 for equal exact values.
    pub fn abs_diff(&self, other: &Scalar) -> f64 {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                let d = a - b;
                rational::to_f64(&d).abs()
            }
            _ => (self.to_f64() - other.to_f64()).abs(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{}", to_fraction_string(r)),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => serializer.serialize_str(&to_fraction_string(r)),
            Scalar::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Scalar;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a \"num/den\" string or a number")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Scalar, E> {
                parse_fraction(s).map(Scalar::Exact).map_err(E::custom)
            }
            fn visit_f64<E>(self, x: f64) -> Result<Scalar, E> {
                Ok(Scalar::Float(x))
            }
            fn visit_i64<E>(self, x: i64) -> Result<Scalar, E> {
                Ok(Scalar::Float(x as f64))
            }
            fn visit_u64<E>(self, x: u64) -> Result<Scalar, E> {
                Ok(Scalar::Float(x as f64))
            }
        }
        deserializer.deserialize_any(V)
    }
}

/// Exact accumulator over a running common denominator.
///
/// Plain `BigRational` addition re-normalizes after every term, and the gcd of
/// two huge operands dominates the runtime of dense exact sums. Keeping the
/// unreduced pair `num/den` makes each step one small-modulus gcd and O(len)
/// big-integer work, with the denominator growing only to the lcm of the term
/// denominators; reduction happens once per checkpoint.
#[derive(Debug, Clone)]
pub struct ExactSum {
    num: num_bigint::BigInt,
    den: num_bigint::BigInt,
}

impl Default for ExactSum {
    fn default() -> Self {
        Self::new()
    }
}

impl ExactSum {
    pub fn new() -> Self {
        use num_traits::{One, Zero};
        Self { num: num_bigint::BigInt::zero(), den: num_bigint::BigInt::one() }
    }

    pub fn add(&mut self, term: &Rational) {
        use num_integer::Integer;
        let td = term.denom();
        // gcd(den, td) via one O(len) remainder; td is small in practice
        let g = (&self.den % td).gcd(td);
        let scale_term = &self.den / &g;
        let scale_acc = td / &g;
        self.num = &self.num * &scale_acc + term.numer() * scale_term;
        self.den *= scale_acc;
    }

    /// Reduced value of the accumulator.
    pub fn value(&self) -> Rational {
        Rational::new(self.num.clone(), self.den.clone())
    }
}

/// Kahan compensated accumulator for float-mode series.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn exact_sum_matches_plain_rational_addition() {
        let mut fast = ExactSum::new();
        let mut slow = Rational::new(0.into(), 1.into());
        for q in 1..=400i64 {
            let sign = if q % 3 == 0 { -1 } else { 1 };
            let term = rat(sign, q * q);
            fast.add(&term);
            slow += term;
        }
        assert_eq!(fast.value(), slow);
    }

    #[test]
    fn kahan_beats_naive_on_small_terms() {
        let mut k = KahanSum::new();
        let mut naive = 0.0f64;
        k.add(1.0);
        naive += 1.0;
        for _ in 0..10_000_000 {
            k.add(1e-16);
            naive += 1e-16;
        }
        let expect = 1.0 + 1e-9;
        assert!((k.value() - expect).abs() < 1e-15);
        assert!((naive - expect).abs() > 1e-10);
    }

    #[test]
    fn scalar_serializes_by_kind() {
        let e = Scalar::Exact(rat(23, 36));
        let f = Scalar::Float(0.5);
        assert_eq!(serde_json::to_string(&e).unwrap(), "\"23/36\"");
        assert_eq!(serde_json::to_string(&f).unwrap(), "0.5");
        let back: Scalar = serde_json::from_str("\"23/36\"").unwrap();
        assert_eq!(back, e);
        let back: Scalar = serde_json::from_str("0.5").unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn exact_abs_diff_is_zero_only_on_equality() {
        let a = Scalar::Exact(rat(1, 3));
        let b = Scalar::Exact(rat(1, 3));
        let c = Scalar::Exact(rat(1, 2));
        assert_eq!(a.abs_diff(&b), 0.0);
        assert!(a.abs_diff(&c) > 0.0);
    }
}
