//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured quantities. All tolerances are pinned here.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ramex::arith::{self, build_sieve, SieveTables};
use ramex::classify::{
    absolute_convergence_exclusion, classify, CloudCase, ExclusionOutcome,
};
use ramex::coeff::{CoefficientSpec, PrimeRule, TailRule};
use ramex::euler::{p_factor, p_factor_phi_form};
use ramex::expansion::{
    direct_partial_sum, factored_discrepancy_majorant, infinite_euler_product_eval,
    nonvanishing_product_check, EvalOptions, NonvanishingVerdict,
};
use ramex::numeric::KahanSum;
use ramex::ramanujan::{c_definition_oracle, c_holder, c_prime_power};
use ramex::rational::{rat, rat_int, Rational};
use ramex::PrimeSet;

static TABLES: Lazy<SieveTables> = Lazy::new(|| build_sieve(1_000_000).unwrap());

fn hybrid() -> CoefficientSpec {
    CoefficientSpec::power(3)
        .with_override(2, PrimeRule::AllOnes)
        .unwrap()
}

fn battery() -> Vec<(&'static str, CoefficientSpec)> {
    vec![
        ("power s=1", CoefficientSpec::power(1)),
        ("power s=2", CoefficientSpec::power(2)),
        ("power s=3", CoefficientSpec::power(3)),
        ("totient reciprocal", CoefficientSpec::totient_reciprocal()),
        ("hybrid 1/q^3 odd, 1 on 2-powers", hybrid()),
    ]
}

fn assert_runtime(criterion: u32, elapsed: Duration, limit: Duration) {
    assert!(
        elapsed <= limit,
        "criterion {criterion}: runtime {elapsed:?} exceeds limit {limit:?}"
    );
}

/// Machin's formula with plain f64 Taylor series; independent of the float
/// library's constants.
fn pi_reference() -> f64 {
    fn atan_series(inv_x: f64) -> f64 {
        let x = 1.0 / inv_x;
        let mut term = x;
        let mut sum = 0.0;
        let mut k = 0u32;
        while term.abs() > 1e-18 {
            sum += term / (2 * k + 1) as f64;
            term *= -x * x;
            k += 1;
        }
        sum
    }
    16.0 * atan_series(5.0) - 4.0 * atan_series(239.0)
}

#[test]
fn criterion_01_holder_equals_definition_oracle() {
    let start = Instant::now();
    let mut cases = 0u64;
    for q in 1..=256u64 {
        for a in 1..=256u64 {
            let oracle = c_definition_oracle(q, a, 1e-6)
                .unwrap_or_else(|e| panic!("oracle failed at q={q} a={a}: {e}"));
            assert_eq!(c_holder(q, a), oracle, "q={q} a={a}");
            cases += 1;
        }
    }
    let elapsed = start.elapsed();
    assert_eq!(cases, 65_536);
    assert_runtime(1, elapsed, Duration::from_secs(10));
    println!("criterion 1: PASS — Hoelder = definition oracle on {cases} cases in {elapsed:?}");
}

#[test]
fn criterion_02_p_factor_closed_forms_agree() {
    let start = Instant::now();
    let mut cases = 0u64;
    for (name, spec) in battery() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            for a in 1..=2000u64 {
                let direct = p_factor(&spec, p, a);
                let phi_form = p_factor_phi_form(&spec, p, a);
                assert_eq!(direct.value, phi_form.value, "{name} p={p} a={a}");
                // truncated K-series over the prime ladder
                let v = arith::p_adic_valuation(p, a).unwrap();
                let mut series = Rational::zero();
                for k in 0..=(v + 1) {
                    series += spec.at_prime_power(p, k)
                        * Rational::from_integer(c_prime_power(p, k, a).unwrap().into());
                }
                assert_eq!(series, direct.value, "{name} p={p} a={a} K-series");
                cases += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    println!(
        "criterion 2: PASS — both closed forms and the K-series agree exactly on {cases} \
         (spec, p, a) triples in {elapsed:?}"
    );
}

#[test]
fn criterion_03_zero_factor_equivalence_bounded() {
    let start = Instant::now();
    // forward: an all-ones ladder kills the factor for every a
    let allones_specs = [
        (2u64, hybrid()),
        (3u64, CoefficientSpec::power(2).with_override(3, PrimeRule::AllOnes).unwrap()),
        (5u64, CoefficientSpec::totient_reciprocal()
            .with_override(5, PrimeRule::AllOnes)
            .unwrap()),
    ];
    for (p, spec) in &allones_specs {
        for a in 1..=2000u64 {
            assert!(p_factor(spec, *p, a).value.is_zero(), "p={p} a={a}");
        }
    }

    // converse, randomized: vanishing probes at a = p^v for v <= 6 force
    // G(p^K) = 1 for K <= 7
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    let mut spec_count = 0u32;
    let mut premise_count = 0u32;
    while spec_count < 120 {
        let p = *[2u64, 3, 5].get(rng.random_range(0..3)).unwrap();
        let ladder_len = 9usize;
        let mut values = Vec::with_capacity(ladder_len);
        let ones_prefix = rng.random_range(0..=ladder_len);
        for k in 0..ladder_len {
            if k < ones_prefix {
                values.push(rat_int(1));
            } else {
                let num = rng.random_range(-3i64..=3);
                let den = rng.random_range(1i64..=4);
                values.push(rat(num, den));
            }
        }
        let spec = CoefficientSpec::power(2)
            .with_override(p, PrimeRule::Explicit { values, tail: TailRule::Family })
            .unwrap();
        let probes_vanish = (0..=6u32).all(|v| p_factor(&spec, p, p.pow(v)).value.is_zero());
        let ladder_ones = (1..=7u32).all(|k| spec.at_prime_power(p, k) == Rational::one());
        assert_eq!(probes_vanish, ladder_ones, "seeded spec {spec_count} at p={p}");
        if probes_vanish {
            premise_count += 1;
        }
        spec_count += 1;
    }
    assert!(
        premise_count >= 10,
        "battery must exercise the vanishing premise, got {premise_count}"
    );
    let elapsed = start.elapsed();
    println!(
        "criterion 3: PASS — all-ones ladders null the factor (a <= 2000), and on \
         {spec_count} randomized specs vanishing probes (v <= 6) pin G(p^K)=1 for K <= 7 \
         ({premise_count} with the premise); {elapsed:?}"
    );
}

#[test]
fn criterion_04_smooth_factorization_exact() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    let primes = [2u64, 3, 5, 7];
    let mut checked = 0u64;
    for spec_idx in 0..24 {
        // random non-empty subset of {2,3,5,7}, random ladders of length <= 3
        let mut spec = CoefficientSpec::custom();
        let mut f_primes = Vec::new();
        loop {
            for &p in &primes {
                if rng.random_range(0..2) == 1 {
                    let len = rng.random_range(1..=3usize);
                    let mut values = Vec::with_capacity(len);
                    for _ in 0..len {
                        // occasional zero rungs leave holes in the ladder
                        let num = rng.random_range(-2i64..=2);
                        let den = rng.random_range(1i64..=5);
                        values.push(rat(num, den));
                    }
                    spec = spec
                        .with_override(p, PrimeRule::Explicit { values, tail: TailRule::Zero })
                        .unwrap();
                    f_primes.push(p);
                }
            }
            if !f_primes.is_empty() {
                break;
            }
        }
        let spec = spec.with_smooth_bound(7);
        let f = PrimeSet::new(f_primes.iter().copied()).unwrap();
        // Q covering the support: product of the top rung of each ladder
        let q_max: u64 = f_primes.iter().map(|&p| p.pow(3)).product();
        for a in 1..=200u64 {
            let r = ramex::expansion::factored_eval(
                &spec,
                &f,
                a,
                q_max,
                &EvalOptions::exact(),
                &TABLES,
            )
            .unwrap();
            assert_eq!(
                r.discrepancy, 0.0,
                "spec {spec_idx} a={a}: exact factorization must have zero discrepancy"
            );
            assert!(r.direct_truncated.as_exact().is_some());
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    println!(
        "criterion 4: PASS — {checked} exact factored evaluations over 24 randomized \
         smooth-supported specs, discrepancy exactly 0; {elapsed:?}"
    );
}

#[test]
fn criterion_05_factored_numeric_within_majorant() {
    let start = Instant::now();
    let spec = CoefficientSpec::power(2);
    let f = PrimeSet::new([2, 3]).unwrap();
    let q_max = 100_000u64;
    let mut worst: (u64, f64, f64) = (0, 0.0, 0.0);
    for a in [1u64, 6, 12, 30] {
        let r = ramex::expansion::factored_eval(
            &spec,
            &f,
            a,
            q_max,
            &EvalOptions::float(),
            &TABLES,
        )
        .unwrap();
        let bound = factored_discrepancy_majorant(&spec, &f, a, q_max, &TABLES).unwrap();
        assert!(
            r.discrepancy <= bound,
            "a={a}: discrepancy {} above phi-majorant {bound}",
            r.discrepancy
        );
        if r.discrepancy > worst.1 {
            worst = (a, r.discrepancy, bound);
        }
    }
    let elapsed = start.elapsed();
    assert_runtime(5, elapsed, Duration::from_secs(30));
    println!(
        "criterion 5: PASS — |direct - finite*cofinite| <= phi-majorant at Q=10^5 for \
         a in {{1,6,12,30}} (worst a={}: {:.3e} <= {:.3e}); {elapsed:?}",
        worst.0, worst.1, worst.2
    );
}

#[test]
fn criterion_06_hybrid_worked_example() {
    let start = Instant::now();
    let spec = hybrid();
    let q_max = 100_000u64;
    let mut max_abs = 0.0f64;
    for a in 1..=50u64 {
        let direct =
            direct_partial_sum(&spec, a, q_max, &[], &EvalOptions::float(), &TABLES).unwrap();
        let value = direct.final_value().to_f64().abs();
        assert!(value <= 1e-2, "a={a}: |partial sum| = {value} > 1e-2");
        max_abs = max_abs.max(value);
    }
    for p_max in [2u64, 3, 5, 10, 97, 1000, 100_000] {
        let product = infinite_euler_product_eval(&spec, 7, p_max, &TABLES).unwrap();
        assert!(
            product.value.is_exact_zero(),
            "p_max={p_max}: product must vanish exactly"
        );
        assert_eq!(product.zero_factor_at, Some(2));
    }
    let elapsed = start.elapsed();
    println!(
        "criterion 6: PASS — hybrid spec: |direct sum at Q=10^5| <= 1e-2 for a=1..50 \
         (max {max_abs:.2e}), Euler product exactly 0 at every p_max; {elapsed:?}"
    );
}

#[test]
fn criterion_07_zeta_consistency() {
    let start = Instant::now();
    let pi = pi_reference();
    let inv_zeta2 = 6.0 / (pi * pi);

    let s2 = CoefficientSpec::power(2);
    let direct2 =
        direct_partial_sum(&s2, 1, 1_000_000, &[], &EvalOptions::float(), &TABLES).unwrap();
    let euler2 = infinite_euler_product_eval(&s2, 1, 1_000_000, &TABLES).unwrap();
    let d2 = (direct2.final_value().to_f64() - inv_zeta2).abs();
    let e2 = (euler2.value.to_f64() - inv_zeta2).abs();
    assert!(d2 <= 1e-3, "direct s=2 off 6/pi^2 by {d2}");
    assert!(e2 <= 1e-3, "euler s=2 off 6/pi^2 by {e2}");

    // zeta(3) by direct summation to 10^6
    let mut zeta3 = KahanSum::new();
    for n in 1..=1_000_000u64 {
        let x = n as f64;
        zeta3.add(1.0 / (x * x * x));
    }
    let inv_zeta3 = 1.0 / zeta3.value();

    let s3 = CoefficientSpec::power(3);
    let direct3 =
        direct_partial_sum(&s3, 1, 1_000_000, &[], &EvalOptions::float(), &TABLES).unwrap();
    let euler3 = infinite_euler_product_eval(&s3, 1, 1_000_000, &TABLES).unwrap();
    let d3 = (direct3.final_value().to_f64() - inv_zeta3).abs();
    let e3 = (euler3.value.to_f64() - inv_zeta3).abs();
    assert!(d3 <= 1e-6, "direct s=3 off 1/zeta(3) by {d3}");
    assert!(e3 <= 1e-6, "euler s=3 off 1/zeta(3) by {e3}");

    let elapsed = start.elapsed();
    assert_runtime(7, elapsed, Duration::from_secs(60));
    println!(
        "criterion 7: PASS — s=2 within 1e-3 of 6/pi^2 (direct {d2:.2e}, euler {e2:.2e}); \
         s=3 within 1e-6 of 1/zeta(3) (direct {d3:.2e}, euler {e3:.2e}); {elapsed:?}"
    );
}

#[test]
fn criterion_08_classification_trichotomy() {
    let start = Instant::now();
    let c = classify(&CoefficientSpec::power(1), 1000, 8, 10_000, &TABLES).unwrap();
    assert_eq!(c.case, CloudCase::C1);
    assert!(c.fixed_points.f_of_g.is_empty());

    let c = classify(&CoefficientSpec::totient_reciprocal(), 1000, 8, 10_000, &TABLES).unwrap();
    assert_eq!(c.case, CloudCase::C3);
    assert_eq!(c.fixed_points.f_of_g.primes(), &[2]);
    assert!(c.fixed_points.f0_of_g.is_empty());

    let c = classify(&hybrid(), 1000, 8, 10_000, &TABLES).unwrap();
    assert_eq!(c.case, CloudCase::C2);
    assert_eq!(c.fixed_points.f0_of_g.primes(), &[2]);

    let elapsed = start.elapsed();
    println!(
        "criterion 8: PASS — power s=1 -> C1 with F empty; totient -> C3 with F={{2}}; \
         hybrid -> C2 with F0={{2}}; {elapsed:?}"
    );
}

#[test]
fn criterion_09_exclusion_route() {
    let start = Instant::now();
    let excl =
        absolute_convergence_exclusion(&CoefficientSpec::power(3), 2000, 100_000, 8, &TABLES)
            .unwrap();
    assert_eq!(excl.outcome, ExclusionOutcome::ExcludedFromCloud);
    let min_partial = match excl.nonvanishing.as_ref().unwrap().verdict {
        NonvanishingVerdict::BoundedAwayFromZero { min_abs_partial } => min_abs_partial,
        ref other => panic!("expected bounded-away verdict, got {other:?}"),
    };
    assert!(min_partial >= 0.8, "min partial product {min_partial} < 0.8");

    let tot = CoefficientSpec::totient_reciprocal();
    let check = nonvanishing_product_check(&tot, &PrimeSet::empty(), 100_000, &TABLES).unwrap();
    assert_eq!(check.verdict, NonvanishingVerdict::HypothesisViolated { p: 2 });

    let elapsed = start.elapsed();
    println!(
        "criterion 9: PASS — power s=3 excluded from the cloud (min partial product \
         {min_partial:.4} >= 0.8 over p <= 10^5); totient with empty F violates the \
         hypothesis at p=2; {elapsed:?}"
    );
}

#[test]
fn criterion_10_mobius_series_trend() {
    let start = Instant::now();
    let mut sum = KahanSum::new();
    for q in 1..=1_000_000u64 {
        let mu = TABLES.mu(q);
        if mu != 0 {
            sum.add(mu as f64 / q as f64);
        }
    }
    let value = sum.value();
    assert!(
        value.abs() < 0.05,
        "|sum mu(q)/q| = {} at Q=10^6, expected < 0.05",
        value.abs()
    );
    let elapsed = start.elapsed();
    assert_runtime(10, elapsed, Duration::from_secs(20));
    println!(
        "criterion 10: PASS — |sum_{{q<=10^6}} mu(q)/q| = {:.3e} < 0.05 (trend evidence \
         only, no membership certification); {elapsed:?}",
        value.abs()
    );
}
