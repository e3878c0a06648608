//! Cross-module identity batteries: sieve consistency, Ramanujan-sum
//! equivalences, coefficient multiplicativity, factor rearrangements, and
//! local/global agreement.

use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use proptest::prelude::*;

use ramex::arith::{self, build_sieve, SieveTables};
use ramex::coeff::{CoefficientSpec, PrimeRule, TailRule};
use ramex::euler;
use ramex::expansion::{
    self, cofinite_partial_sum, coprime_split_eval, direct_partial_sum, factored_eval,
    infinite_euler_product_eval, local_factored_eval, EvalOptions,
};
use ramex::ramanujan::{c_batch, c_definition_oracle, c_holder, c_prime_power};
use ramex::rational::{rat, rat_int, Rational};
use ramex::{PrimeSet, Scalar};

static TABLES: Lazy<SieveTables> = Lazy::new(|| build_sieve(100_000).unwrap());

fn hybrid() -> CoefficientSpec {
    CoefficientSpec::power(3)
        .with_override(2, PrimeRule::AllOnes)
        .unwrap()
}

// ---------------------------------------------------------------------------
// sieve internal consistency
// ---------------------------------------------------------------------------

#[test]
fn sieve_matches_point_computation_to_1e4() {
    for n in 1..=10_000u64 {
        let (mu, phi) = arith::mobius_phi(n);
        assert_eq!(TABLES.mu(n), mu, "mu({n})");
        assert_eq!(TABLES.phi(n), phi, "phi({n})");
    }
}

#[test]
fn totient_divisor_sum_identity() {
    // sum_{d|n} phi(d) = n
    for n in 1..=10_000u64 {
        let mut sum = 0u64;
        for d in 1..=n {
            if n % d == 0 {
                sum += TABLES.phi(d);
            }
        }
        assert_eq!(sum, n);
    }
}

#[test]
fn mobius_divisor_sum_identity() {
    // sum_{d|n} mu(d) = [n = 1]
    for n in 1..=10_000u64 {
        let mut sum = 0i64;
        for d in 1..=n {
            if n % d == 0 {
                sum += TABLES.mu(d);
            }
        }
        assert_eq!(sum, i64::from(n == 1), "n={n}");
    }
}

#[test]
fn factorization_round_trips_to_1e5() {
    for n in 1..=100_000u64 {
        let f = arith::factorize(n);
        assert_eq!(f.value(), n);
        let mut prev = 0u64;
        for (p, e) in f.iter() {
            assert!(p > prev && e >= 1);
            prev = p;
        }
    }
}

// ---------------------------------------------------------------------------
// Ramanujan-sum equivalences
// ---------------------------------------------------------------------------

#[test]
fn holder_equals_definition_oracle_small_grid() {
    // the acceptance suite runs the full 256 x 256 grid; this keeps a fast
    // guard in the default battery
    for q in 1..=96u64 {
        for a in 1..=96u64 {
            assert_eq!(
                c_holder(q, a),
                c_definition_oracle(q, a, 1e-6).unwrap(),
                "q={q} a={a}"
            );
        }
    }
}

#[test]
fn ramanujan_sums_respect_the_trivial_bound() {
    for q in 1..=512u64 {
        let phi = TABLES.phi(q) as i64;
        for a in 1..=512u64 {
            let c = c_holder(q, a);
            assert!(c.abs() <= phi, "|c_{q}({a})| = {} > phi = {phi}", c.abs());
        }
    }
}

#[test]
fn prime_power_formula_consistent_with_holder() {
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19] {
        let mut k = 1u32;
        while p.pow(k) <= 512 {
            let q = p.pow(k);
            for a in 1..=512u64 {
                assert_eq!(
                    c_holder(q, a),
                    c_prime_power(p, k, a).unwrap(),
                    "q={q} a={a}"
                );
            }
            k += 1;
        }
    }
}

#[test]
fn multiplicative_in_the_modulus() {
    for q1 in 1..=512u64 {
        for q2 in 1..=(512 / q1) {
            if num_integer::gcd(q1, q2) != 1 {
                continue;
            }
            for a in [1u64, 2, 6, 12, 30, 49, 97] {
                assert_eq!(
                    c_holder(q1 * q2, a),
                    c_holder(q1, a) * c_holder(q2, a),
                    "q1={q1} q2={q2} a={a}"
                );
            }
        }
    }
}

#[test]
fn prime_power_sums_reduce_to_the_p_part() {
    // c_{p^K}(a) = c_{p^K}(p^{v_p(a)})
    for p in [2u64, 3, 5, 7, 11, 13] {
        let mut k = 1u32;
        while p.pow(k) <= 256 {
            let q = p.pow(k);
            for a in 1..=256u64 {
                let v = arith::p_adic_valuation(p, a).unwrap();
                assert_eq!(c_holder(q, a), c_holder(q, p.pow(v)), "q={q} a={a}");
            }
            k += 1;
        }
    }
}

#[test]
fn batch_rows_have_unit_head_and_bounded_entries() {
    for a in [1u64, 7, 360] {
        let row = c_batch(a, 4096, &TABLES).unwrap();
        assert_eq!(row.value(1), 1);
        for q in 1..=row.q_max() {
            assert!(row.value(q).abs() <= TABLES.phi(q) as i64);
        }
    }
}

// ---------------------------------------------------------------------------
// coefficient specs
// ---------------------------------------------------------------------------

fn spec_battery() -> Vec<CoefficientSpec> {
    vec![
        CoefficientSpec::power(1),
        CoefficientSpec::power(2),
        CoefficientSpec::power(3),
        CoefficientSpec::totient_reciprocal(),
        hybrid(),
        CoefficientSpec::zero_beyond([(2, rat(1, 2)), (4, rat(1, 4))]).unwrap(),
        CoefficientSpec::power(2)
            .with_override(
                3,
                PrimeRule::Explicit { values: vec![rat_int(1), rat(1, 9)], tail: TailRule::Family },
            )
            .unwrap(),
    ]
}

#[test]
fn coefficient_values_are_multiplicative() {
    for spec in spec_battery() {
        assert_eq!(spec.value(1), Rational::one());
        for q1 in 1..=100u64 {
            for q2 in 1..=(10_000 / q1) {
                if num_integer::gcd(q1, q2) != 1 {
                    continue;
                }
                assert_eq!(
                    spec.value(q1 * q2),
                    spec.value(q1) * spec.value(q2),
                    "q1={q1} q2={q2}"
                );
            }
        }
    }
}

#[test]
fn fixed_point_sets_nest_for_every_spec_and_bound() {
    for spec in spec_battery() {
        for (p_max, k_max) in [(10u64, 1u32), (100, 4), (1000, 10)] {
            let r = spec.fixed_points(p_max, k_max);
            for p in r.f0_of_g.iter() {
                assert!(r.f_of_g.contains(p), "F0 must sit inside F");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// factor rearrangements
// ---------------------------------------------------------------------------

#[test]
fn finite_factor_equals_its_expanded_support_sum() {
    // for smooth-supported specs the sum over moduli built from F alone
    // rearranges exactly into the product of p-factors
    let specs = [
        CoefficientSpec::zero_beyond([(2, rat(1, 2)), (4, rat(1, 4))]).unwrap(),
        CoefficientSpec::zero_beyond([(2, rat(-1, 3)), (3, rat(1, 5)), (9, rat(2, 7))]).unwrap(),
        CoefficientSpec::zero_beyond([(5, rat(1, 2)), (7, rat(3, 4))]).unwrap(),
    ];
    for spec in &specs {
        let f_primes: Vec<u64> = spec.overrides().keys().copied().collect();
        let f = PrimeSet::new(f_primes).unwrap();
        let support = spec.support_up_to(u64::MAX / 2).unwrap();
        for a in 1..=120u64 {
            let mut sum = Rational::zero();
            for pt in &support {
                let c: i64 = pt
                    .factors
                    .iter()
                    .map(|&(p, e)| c_prime_power(p, e, a).unwrap())
                    .product();
                sum += &pt.value * Rational::from_integer(c.into());
            }
            assert_eq!(sum, euler::finite_factor(spec, &f, a), "a={a}");
        }
    }
}

#[test]
fn truncated_p_series_matches_closed_forms() {
    // the K-series over one prime truncates at v_p(a)+1 and equals both forms
    for spec in spec_battery() {
        for p in [2u64, 3, 5] {
            for a in 1..=300u64 {
                let v = arith::p_adic_valuation(p, a).unwrap();
                let mut series = Rational::zero();
                for k in 0..=(v + 1) {
                    series += spec.at_prime_power(p, k)
                        * Rational::from_integer(c_prime_power(p, k, a).unwrap().into());
                }
                let f = euler::p_factor(&spec, p, a);
                assert_eq!(series, f.value, "p={p} a={a}");
                assert_eq!(series, euler::p_factor_phi_form(&spec, p, a).value);
            }
        }
    }
}

#[test]
fn zero_factor_probes_pin_the_ladder() {
    // vanishing at a = p^v for v = 0..k forces ones through K = k+1, and
    // conversely ones through K = k+1 force vanishing probes
    let p = 3u64;
    for prefix_len in 0..=7usize {
        let mut values = vec![rat_int(1); prefix_len];
        values.push(rat(1, 2));
        let spec = CoefficientSpec::power(2)
            .with_override(p, PrimeRule::Explicit { values, tail: TailRule::Family })
            .unwrap();
        for k in 0..=6u32 {
            let probes_vanish = (0..=k).all(|v| euler::p_factor(&spec, p, p.pow(v)).value.is_zero());
            let ladder_is_ones =
                (1..=k + 1).all(|kk| spec.at_prime_power(p, kk) == Rational::one());
            assert_eq!(probes_vanish, ladder_is_ones, "prefix={prefix_len} k={k}");
        }
    }
}

// ---------------------------------------------------------------------------
// expansions
// ---------------------------------------------------------------------------

#[test]
fn local_and_explicit_factored_agree_exactly() {
    for spec in [CoefficientSpec::power(2), hybrid()] {
        for a in 1..=200u64 {
            let local = local_factored_eval(&spec, a, 120, &EvalOptions::exact(), &TABLES)
                .unwrap();
            if arith::prime_divisors(a).is_empty() {
                assert_eq!(local.finite_factor, Rational::one());
                continue;
            }
            let f = arith::prime_divisors(a);
            let explicit =
                factored_eval(&spec, &f, a, 120, &EvalOptions::exact(), &TABLES).unwrap();
            assert_eq!(local.finite_factor, explicit.finite_factor, "a={a}");
            assert_eq!(local.cofinite_truncated, explicit.cofinite_truncated, "a={a}");
            assert_eq!(local.product, explicit.product, "a={a}");
        }
    }
}

#[test]
fn truncated_products_track_truncated_sums_for_fast_decay() {
    // with a certified majorant the direct truncation and the Euler product
    // over p <= Q stay within the tail bound of each other
    for spec in [CoefficientSpec::power(3), hybrid()] {
        for a in 1..=50u64 {
            let q = 2000u64;
            let direct =
                direct_partial_sum(&spec, a, q, &[], &EvalOptions::float(), &TABLES).unwrap();
            let product = infinite_euler_product_eval(&spec, a, q, &TABLES).unwrap();
            let gap = (direct.final_value().to_f64() - product.value.to_f64()).abs();
            let tail = direct.tail_bound.expect("majorant available");
            assert!(gap <= tail, "a={a}: gap {gap} > tail {tail}");
        }
    }
    // s = 2 has no certified majorant; both routes still approach 1/zeta(2)
    let s2 = CoefficientSpec::power(2);
    let direct = direct_partial_sum(&s2, 1, 50_000, &[], &EvalOptions::float(), &TABLES).unwrap();
    let product = infinite_euler_product_eval(&s2, 1, 50_000, &TABLES).unwrap();
    assert!(direct.tail_bound.is_none());
    assert!((direct.final_value().to_f64() - product.value.to_f64()).abs() < 1e-3);
}

#[test]
fn vanishing_sits_in_the_finite_factor_not_the_cofinite_one() {
    // for the hybrid spec the odd co-finite factor is nonzero at a = 1 while
    // the finite 2-factor (hence the product) vanishes identically
    let spec = hybrid();
    let f2 = PrimeSet::new([2]).unwrap();
    let cof = cofinite_partial_sum(&spec, &f2, 1, 5000, &EvalOptions::float(), &TABLES).unwrap();
    assert!(cof.to_f64().abs() > 0.9, "odd factor stays near 1 - 1/27 - ...");
    let fin = euler::finite_factor(&spec, &f2, 1);
    assert!(fin.is_zero());
    // and the direct sums do shrink toward zero for every small a
    for a in 1..=50u64 {
        let direct =
            direct_partial_sum(&spec, a, 10_000, &[], &EvalOptions::float(), &TABLES).unwrap();
        let tail = direct.tail_bound.unwrap();
        assert!(
            direct.final_value().to_f64().abs() <= tail,
            "a={a}: |sum| {} > tail {tail}",
            direct.final_value().to_f64().abs()
        );
    }
}

#[test]
fn coprime_split_two_factor_product_tracks_direct_sum() {
    // dyadic/odd split of the s=2 expansion at a=1
    let s2 = CoefficientSpec::power(2);
    let r = coprime_split_eval(
        &s2,
        &|p| p == 2,
        1,
        10_000,
        10_000,
        &EvalOptions::float(),
        &TABLES,
    )
    .unwrap();
    assert!(
        r.product_vs_direct < 1e-3,
        "split product vs direct: {}",
        r.product_vs_direct
    );
    // and the p-factor route agrees with the truncated factors
    assert!((r.s_euler_product - r.s_factor_truncated.to_f64()).abs() < 1e-6);
    assert!((r.r_euler_product - r.r_factor_truncated.to_f64()).abs() < 1e-3);
}

#[test]
fn coprime_split_agrees_with_local_route() {
    let s2 = CoefficientSpec::power(2);
    for a in [2u64, 6, 18] {
        let div = arith::prime_divisors(a);
        let split = coprime_split_eval(
            &s2,
            &|p| div.contains(p),
            a,
            4000,
            4000,
            &EvalOptions::float(),
            &TABLES,
        )
        .unwrap();
        let local = local_factored_eval(&s2, a, 4000, &EvalOptions::float(), &TABLES).unwrap();
        assert!((split.product.to_f64() - local.product.to_f64()).abs() < 1e-9, "a={a}");
        let full = infinite_euler_product_eval(&s2, a, 4000, &TABLES).unwrap();
        assert!(
            (split.s_euler_product * split.r_euler_product - full.value.to_f64()).abs() < 1e-12
        );
    }
}

#[test]
fn dense_and_support_paths_agree_on_sparse_specs() {
    // the support-enumeration path must reproduce a plain scan of the same sum
    let specs = [
        CoefficientSpec::zero_beyond([(2, rat(1, 2)), (4, rat(1, 4))]).unwrap(),
        CoefficientSpec::zero_beyond([(2, rat(-1, 3)), (3, rat(1, 5)), (25, rat(2, 7))]).unwrap(),
    ];
    for spec in &specs {
        for a in [1u64, 2, 6, 12, 100] {
            for q_max in [1u64, 2, 3, 4, 10, 60, 500] {
                let fast =
                    direct_partial_sum(spec, a, q_max, &[], &EvalOptions::exact(), &TABLES)
                        .unwrap();
                let mut slow = Rational::zero();
                for q in 1..=q_max {
                    slow += spec.value(q) * Rational::from_integer(c_holder(q, a).into());
                }
                assert_eq!(fast.final_value(), &Scalar::Exact(slow), "a={a} Q={q_max}");
            }
        }
    }
}

#[test]
fn float_refusal_gates_smooth_specs_only() {
    let smooth = CoefficientSpec::zero_beyond([(2, rat(1, 2))])
        .unwrap()
        .with_smooth_bound(2);
    assert!(direct_partial_sum(&smooth, 1, 100, &[], &EvalOptions::float(), &TABLES).is_err());
    assert!(direct_partial_sum(&smooth, 1, 100, &[], &EvalOptions::exact(), &TABLES).is_ok());
    let dense = CoefficientSpec::power(2);
    assert!(direct_partial_sum(&dense, 1, 100, &[], &EvalOptions::float(), &TABLES).is_ok());
}

#[test]
fn capacity_errors_only_where_tables_are_indexed() {
    let small = build_sieve(64).unwrap();
    let dense = CoefficientSpec::power(2);
    assert!(matches!(
        direct_partial_sum(&dense, 1, 65, &[], &EvalOptions::exact(), &small),
        Err(ramex::Error::Capacity { .. })
    ));
    // sparse specs bypass the tables entirely
    let sparse = CoefficientSpec::zero_beyond([(2, rat(1, 2)), (4, rat(1, 4))]).unwrap();
    let r = direct_partial_sum(&sparse, 2, 1_000_000, &[], &EvalOptions::exact(), &small).unwrap();
    assert_eq!(r.final_value(), &Scalar::Exact(rat_int(1)));
    assert!(expansion::smooth_exact_eval(&sparse.clone().with_smooth_bound(2), 2).is_ok());
}

// ---------------------------------------------------------------------------
// property tests
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn prop_factorize_round_trips(n in 1u64..5_000_000) {
        let f = arith::factorize(n);
        prop_assert_eq!(f.value(), n);
        for (p, _) in f.iter() {
            prop_assert!(arith::is_prime(p));
        }
    }

    #[test]
    fn prop_holder_multiplicative(q1 in 1u64..400, q2 in 1u64..400, a in 1u64..10_000) {
        prop_assume!(num_integer::gcd(q1, q2) == 1);
        prop_assert_eq!(c_holder(q1 * q2, a), c_holder(q1, a) * c_holder(q2, a));
    }

    #[test]
    fn prop_coeff_multiplicative(q1 in 1u64..300, q2 in 1u64..300, s in 1u32..4) {
        prop_assume!(num_integer::gcd(q1, q2) == 1);
        let spec = CoefficientSpec::power(s);
        prop_assert_eq!(spec.value(q1 * q2), spec.value(q1) * spec.value(q2));
        let h = hybrid();
        prop_assert_eq!(h.value(q1 * q2), h.value(q1) * h.value(q2));
    }

    #[test]
    fn prop_smoothness_matches_factorization(n in 1u64..100_000, q in 2u64..50) {
        let by_factors = arith::factorize(n).iter().all(|(p, _)| p <= q);
        prop_assert_eq!(arith::is_smooth(n, q), by_factors);
    }

    #[test]
    fn prop_batch_matches_holder(a in 1u64..2_000) {
        let row = c_batch(a, 256, &TABLES).unwrap();
        for q in 1..=256u64 {
            prop_assert_eq!(row.value(q), c_holder(q, a));
        }
    }
}
