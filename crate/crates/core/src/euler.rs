//! Euler p-factors of a Ramanujan expansion.
//!
//! For fixed `a` and prime `p` the sub-series over the powers of `p` collapses
//! to a finite sum; this module evaluates it exactly in both closed forms,
//! tests whether a factor vanishes identically, and multiplies factors over an
//! explicit prime set.

use num_traits::{One, Zero};

use crate::arith::{self, PrimeSet};
use crate::coeff::{CoefficientSpec, PrimeRule};
use crate::rational::{rat_pow_u64, Rational};

/// Exact value of one Euler p-factor.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerFactorValue {
    pub p: u64,
    pub a: u64,
    /// `v_p(a)`.
    pub v: u32,
    pub value: Rational,
}

/// The p-factor as `sum_{K=0}^{v_p(a)} p^K (G(p^K) - G(p^{K+1}))`.
pub fn p_factor(spec: &CoefficientSpec, p: u64, a: u64) -> EulerFactorValue {
    debug_assert!(arith::is_prime(p), "{p} is not prime");
    assert!(a >= 1);
    let v = valuation(p, a);
    let mut sum = Rational::zero();
    for k in 0..=v {
        let diff = spec.at_prime_power(p, k) - spec.at_prime_power(p, k + 1);
        if !diff.is_zero() {
            sum += rat_pow_u64(p, k) * diff;
        }
    }
    EulerFactorValue { p, a, v, value: sum }
}

/// The same factor as `sum_{K=0}^{v_p(a)} G(p^K) phi(p^K) - G(p^{v+1}) p^v`.
///
/// Kept as an independent route and cross-checked against [`p_factor`] in the
/// test batteries rather than trusting the rearrangement.
pub fn p_factor_phi_form(spec: &CoefficientSpec, p: u64, a: u64) -> EulerFactorValue {
    debug_assert!(arith::is_prime(p), "{p} is not prime");
    assert!(a >= 1);
    let v = valuation(p, a);
    let mut sum = Rational::zero();
    for k in 0..=v {
        let phi = if k == 0 {
            Rational::one()
        } else {
            rat_pow_u64(p, k - 1) * rat_pow_u64(p - 1, 1)
        };
        sum += spec.at_prime_power(p, k) * phi;
    }
    sum -= spec.at_prime_power(p, v + 1) * rat_pow_u64(p, v);
    EulerFactorValue { p, a, v, value: sum }
}

/// Verdict of the zero-factor test at one prime.
#[derive(Debug, Clone, PartialEq)]
pub enum NullFactorVerdict {
    /// The spec declares `G(p^K) = 1` for all `K`, so the factor vanishes for
    /// every `a`.
    NullExhaustive,
    /// The factor vanished at `a = p^v` for all `v <= k_max`, without the
    /// all-ones declaration.
    NullUpToBound { k_max: u32 },
    /// Smallest `a = p^v` with a non-vanishing factor.
    NotNull { witness_a: u64, value: Rational },
}

/// Decide whether the p-factor vanishes identically, probing `a = p^v` for
/// `v = 0..=k_max`. Vanishing on those probes is equivalent to
/// `G(p^K) = 1` for `K <= k_max + 1`.
pub fn p_factor_is_null(spec: &CoefficientSpec, p: u64, k_max: u32) -> NullFactorVerdict {
    debug_assert!(arith::is_prime(p));
    assert!(k_max >= 1);
    if matches!(spec.rule_for(p), Some(PrimeRule::AllOnes)) {
        debug_assert!(p_factor(spec, p, p.pow(3)).value.is_zero());
        return NullFactorVerdict::NullExhaustive;
    }
    for v in 0..=k_max {
        let a = p.pow(v);
        let f = p_factor(spec, p, a);
        if !f.value.is_zero() {
            return NullFactorVerdict::NotNull { witness_a: a, value: f.value };
        }
    }
    NullFactorVerdict::NullUpToBound { k_max }
}

/// `prod_{p in F} p_factor(spec, p, a)`; the empty product is 1.
pub fn finite_factor(spec: &CoefficientSpec, f: &PrimeSet, a: u64) -> Rational {
    let mut acc = Rational::one();
    for p in f.iter() {
        let factor = p_factor(spec, p, a).value;
        if factor.is_zero() {
            return Rational::zero();
        }
        acc *= factor;
    }
    acc
}

fn valuation(p: u64, a: u64) -> u32 {
    let mut v = 0u32;
    let mut x = a;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::TailRule;
    use crate::rational::{rat, rat_int};

    fn hybrid() -> CoefficientSpec {
        CoefficientSpec::power(3)
            .with_override(2, PrimeRule::AllOnes)
            .unwrap()
    }

    #[test]
    fn p_factor_examples() {
        let s1 = CoefficientSpec::power(1);
        assert_eq!(p_factor(&s1, 2, 4).value, rat(3, 2));
        // v_p(a) = 0 collapses to 1 - G(p)
        assert_eq!(p_factor(&s1, 5, 7).value, rat(4, 5));
        assert_eq!(p_factor(&hybrid(), 2, 13).value, rat_int(0));
        assert_eq!(p_factor(&hybrid(), 2, 40).value, rat_int(0));
    }

    #[test]
    fn phi_form_examples() {
        let s1 = CoefficientSpec::power(1);
        assert_eq!(p_factor_phi_form(&s1, 2, 4).value, rat(3, 2));
        assert_eq!(p_factor_phi_form(&s1, 5, 7).value, rat(4, 5));
        // all-ones ladder telescopes to zero at a = p^2
        assert_eq!(p_factor_phi_form(&hybrid(), 2, 4).value, rat_int(0));
    }

    #[test]
    fn both_forms_agree_on_a_grid() {
        let specs = [
            CoefficientSpec::power(1),
            CoefficientSpec::power(2),
            CoefficientSpec::totient_reciprocal(),
            hybrid(),
        ];
        for spec in &specs {
            for p in [2u64, 3, 5] {
                for a in 1..=200 {
                    let f = p_factor(spec, p, a);
                    let g = p_factor_phi_form(spec, p, a);
                    assert_eq!(f.value, g.value, "p={p} a={a}");
                    assert_eq!(f.v, g.v);
                }
            }
        }
    }

    #[test]
    fn null_verdicts() {
        assert_eq!(
            p_factor_is_null(&hybrid(), 2, 6),
            NullFactorVerdict::NullExhaustive
        );
        assert_eq!(
            p_factor_is_null(&CoefficientSpec::power(3), 2, 6),
            NullFactorVerdict::NotNull { witness_a: 1, value: rat(7, 8) }
        );
        // totient reciprocal: the 2-factor vanishes at a=1 but not at a=2
        assert_eq!(
            p_factor_is_null(&CoefficientSpec::totient_reciprocal(), 2, 6),
            NullFactorVerdict::NotNull { witness_a: 2, value: rat_int(1) }
        );
    }

    #[test]
    fn null_up_to_bound_without_declaration() {
        // ladder of ones long enough to survive every probe up to k_max
        let spec = CoefficientSpec::custom()
            .with_override(
                2,
                PrimeRule::Explicit {
                    values: vec![rat_int(1); 8],
                    tail: TailRule::Zero,
                },
            )
            .unwrap();
        assert_eq!(
            p_factor_is_null(&spec, 2, 6),
            NullFactorVerdict::NullUpToBound { k_max: 6 }
        );
        // a longer probe exposes the zero tail
        assert!(matches!(
            p_factor_is_null(&spec, 2, 9),
            NullFactorVerdict::NotNull { .. }
        ));
    }

    #[test]
    fn finite_factor_examples() {
        let s1 = CoefficientSpec::power(1);
        assert_eq!(finite_factor(&s1, &PrimeSet::empty(), 10), rat_int(1));
        let f23 = PrimeSet::new([2, 3]).unwrap();
        assert_eq!(finite_factor(&s1, &f23, 1), rat(1, 3));
        let f2 = PrimeSet::new([2]).unwrap();
        assert_eq!(finite_factor(&s1, &f2, 4), rat(3, 2));
        // a vanishing factor kills the whole product
        assert_eq!(finite_factor(&hybrid(), &f23, 5), rat_int(0));
    }
}
