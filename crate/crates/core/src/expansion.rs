//! Evaluation of Ramanujan expansions and their factorizations.
//!
//! The defining series `sum_q G(q) c_q(a)` is always summed in natural
//! increasing order of `q`: several of the series in scope converge only
//! conditionally, and the truncation notion `q <= Q` fixes the order anyway.
//! Exact mode accumulates arbitrary-precision rationals; float mode uses
//! compensated summation. Specs whose support is enumerable from their
//! overrides are summed over the support only, which keeps exact evaluation
//! cheap at any truncation; dense scans require sieve capacity.
//!
//! Tail bounds are derived from the trivial bound `|c_q(a)| <= phi(q) <= q`
//! and nothing else; series without such a majorant are reported with no
//! certified tolerance.

use num_traits::{One, Zero};

use crate::arith::{self, PrimeSet, SieveTables};
use crate::coeff::{CoefficientSpec, PrimeRule, SupportPoint, TailRule};
use crate::error::Error;
use crate::euler::{self, EulerFactorValue};
use crate::numeric::{ArithMode, ExactSum, KahanSum, Scalar};
use crate::ramanujan::{c_prime_power, RamanujanKernel};
use crate::rational::{self, Rational};
use crate::Result;

/// Truncation below which auto mode stays exact (rational denominators grow
/// superpolynomially with the truncation, so dense exact sums are kept to
/// desk scale).
pub const DEFAULT_EXACT_LIMIT: u64 = 10_000;

/// Requested arithmetic for an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeRequest {
    Exact,
    Float,
    /// Exact at or below the configured threshold, float beyond it.
    Auto,
}

/// Evaluation options shared by the series operations.
#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub mode: ModeRequest,
    pub exact_limit: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { mode: ModeRequest::Auto, exact_limit: DEFAULT_EXACT_LIMIT }
    }
}

impl EvalOptions {
    pub fn exact() -> Self {
        Self { mode: ModeRequest::Exact, ..Self::default() }
    }

    pub fn float() -> Self {
        Self { mode: ModeRequest::Float, ..Self::default() }
    }

    /// Resolve the requested mode at a given truncation. Float is refused
    /// when the spec declares smooth support and the truncation is within the
    /// exact threshold: those evaluations exist to be exact.
    pub fn resolve(&self, spec: &CoefficientSpec, q_max: u64) -> Result<ArithMode> {
        match self.mode {
            ModeRequest::Exact => Ok(ArithMode::Exact),
            ModeRequest::Auto => Ok(if q_max <= self.exact_limit {
                ArithMode::Exact
            } else {
                ArithMode::Float
            }),
            ModeRequest::Float => {
                if spec.declared_smooth_bound().is_some() && q_max <= self.exact_limit {
                    Err(Error::FloatRefused { q: q_max, threshold: self.exact_limit })
                } else {
                    Ok(ArithMode::Float)
                }
            }
        }
    }
}

/// Checkpointed partial sums of one series, in natural order.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSumSeries {
    pub a: u64,
    pub mode: ArithMode,
    /// `(Q_i, sum over q <= Q_i)`, strictly increasing, last entry at the
    /// requested truncation.
    pub checkpoints: Vec<(u64, Scalar)>,
    /// Majorant tail bound from `|c_q(a)| <= phi(q)`, when the family admits
    /// one; `None` means no certified tolerance.
    pub tail_bound: Option<f64>,
}

impl PartialSumSeries {
    pub fn q_max(&self) -> u64 {
        self.checkpoints.last().expect("non-empty").0
    }

    pub fn final_value(&self) -> &Scalar {
        &self.checkpoints.last().expect("non-empty").1
    }
}

// ---------------------------------------------------------------------------
// series driver
// ---------------------------------------------------------------------------

/// Which arithmetic function multiplies `G(q)` in the series.
#[derive(Clone, Copy)]
enum SeriesKernel {
    /// `c_q(a)` for fixed `a`.
    Ramanujan { a: u64 },
    /// `mu(q)` (the `a = 1` kernel, used by the Moebius-series identities).
    Mobius,
}

/// Which moduli participate.
enum SeriesFilter<'x> {
    All,
    /// `(q, F) = 1`.
    CoprimeTo(&'x PrimeSet),
    /// every prime divisor of `q` satisfies the predicate
    FactorsWithin(&'x dyn Fn(u64) -> bool),
    /// no prime divisor of `q` satisfies the predicate
    FactorsOutside(&'x dyn Fn(u64) -> bool),
}

impl SeriesFilter<'_> {
    fn admits_factors(&self, factors: &[(u64, u32)]) -> bool {
        match self {
            SeriesFilter::All => true,
            SeriesFilter::CoprimeTo(f) => factors.iter().all(|&(p, _)| !f.contains(p)),
            SeriesFilter::FactorsWithin(pred) => factors.iter().all(|&(p, _)| pred(p)),
            SeriesFilter::FactorsOutside(pred) => factors.iter().all(|&(p, _)| !pred(p)),
        }
    }

    /// Dense-path test, factorizing through the sieve only when needed.
    fn admits(&self, q: u64, tables: &SieveTables) -> bool {
        match self {
            SeriesFilter::All => true,
            SeriesFilter::CoprimeTo(f) => f.coprime_to(q),
            SeriesFilter::FactorsWithin(pred) => {
                let mut x = q;
                while x > 1 {
                    let p = tables.spf(x);
                    if !pred(p) {
                        return false;
                    }
                    while x % p == 0 {
                        x /= p;
                    }
                }
                true
            }
            SeriesFilter::FactorsOutside(pred) => {
                let mut x = q;
                while x > 1 {
                    let p = tables.spf(x);
                    if pred(p) {
                        return false;
                    }
                    while x % p == 0 {
                        x /= p;
                    }
                }
                true
            }
        }
    }
}

fn kernel_of_factors(kernel: SeriesKernel, factors: &[(u64, u32)]) -> i64 {
    match kernel {
        SeriesKernel::Ramanujan { a } => factors
            .iter()
            .map(|&(p, e)| c_prime_power(p, e, a).expect("prime by construction"))
            .product(),
        SeriesKernel::Mobius => {
            if factors.iter().any(|&(_, e)| e > 1) {
                0
            } else if factors.len() % 2 == 0 {
                1
            } else {
                -1
            }
        }
    }
}

/// Partial sums of `sum G(q) K(q)` at the given checkpoints.
///
/// Sparse specs are summed over their enumerated support in increasing `q`
/// and need no sieve capacity; dense specs scan `1..=q_max`.
fn series_partial_sums(
    spec: &CoefficientSpec,
    kernel: SeriesKernel,
    filter: &SeriesFilter,
    q_max: u64,
    checkpoints: &[u64],
    mode: ArithMode,
    tables: &SieveTables,
) -> Result<Vec<(u64, Scalar)>> {
    assert!(q_max >= 1);
    let mut marks: Vec<u64> = checkpoints.to_vec();
    marks.sort_unstable();
    marks.dedup();
    if marks.iter().any(|&m| m < 1 || m > q_max) {
        return Err(Error::InvalidArgument(format!(
            "checkpoints must lie in 1..={q_max}"
        )));
    }
    if marks.last() != Some(&q_max) {
        marks.push(q_max);
    }

    if let Some(support) = spec.support_up_to(q_max) {
        return Ok(sum_over_support(&support, kernel, filter, &marks, mode));
    }

    tables.check_capacity(q_max)?;
    let ram_kernel = match kernel {
        SeriesKernel::Ramanujan { a } => Some(RamanujanKernel::new(a, tables)),
        SeriesKernel::Mobius => None,
    };
    let c_of = |q: u64| -> i64 {
        match &ram_kernel {
            Some(k) => k.c(q),
            None => tables.mu(q),
        }
    };

    let mut out = Vec::with_capacity(marks.len());
    match mode {
        ArithMode::Exact => {
            let mut acc = ExactSum::new();
            let mut next = marks.iter().copied();
            let mut mark = next.next();
            for q in 1..=q_max {
                if filter.admits(q, tables) {
                    let c = c_of(q);
                    if c != 0 {
                        let g = spec.value_of_factors(&tables.factorize(q));
                        if !g.is_zero() {
                            acc.add(&(g * Rational::from_integer(c.into())));
                        }
                    }
                }
                while mark == Some(q) {
                    out.push((q, Scalar::Exact(acc.value())));
                    mark = next.next();
                }
            }
        }
        ArithMode::Float => {
            let mut acc = KahanSum::new();
            let mut next = marks.iter().copied();
            let mut mark = next.next();
            for q in 1..=q_max {
                if filter.admits(q, tables) {
                    let c = c_of(q);
                    if c != 0 {
                        let g = coeff_f64(spec, q, tables);
                        if g != 0.0 {
                            acc.add(g * c as f64);
                        }
                    }
                }
                while mark == Some(q) {
                    out.push((q, Scalar::Float(acc.value())));
                    mark = next.next();
                }
            }
        }
    }
    Ok(out)
}

fn sum_over_support(
    support: &[SupportPoint],
    kernel: SeriesKernel,
    filter: &SeriesFilter,
    marks: &[u64],
    mode: ArithMode,
) -> Vec<(u64, Scalar)> {
    let mut out = Vec::with_capacity(marks.len());
    let mut acc_exact = ExactSum::new();
    let mut acc_float = KahanSum::new();
    let mut points = support.iter().peekable();
    for &mark in marks {
        while let Some(point) = points.peek() {
            if point.q > mark {
                break;
            }
            if filter.admits_factors(&point.factors) {
                let c = kernel_of_factors(kernel, &point.factors);
                if c != 0 {
                    match mode {
                        ArithMode::Exact => {
                            acc_exact.add(&(&point.value * Rational::from_integer(c.into())));
                        }
                        ArithMode::Float => {
                            acc_float.add(rational::to_f64(&point.value) * c as f64);
                        }
                    }
                }
            }
            points.next();
        }
        out.push((
            mark,
            match mode {
                ArithMode::Exact => Scalar::Exact(acc_exact.value()),
                ArithMode::Float => Scalar::Float(acc_float.value()),
            },
        ));
    }
    out
}

/// `G(q)` as a double via a smallest-prime-factor walk; no allocation.
fn coeff_f64(spec: &CoefficientSpec, q: u64, tables: &SieveTables) -> f64 {
    let mut x = q;
    let mut acc = 1.0;
    while x > 1 {
        let p = tables.spf(x);
        let mut e = 0u32;
        while x % p == 0 {
            x /= p;
            e += 1;
        }
        acc *= spec.at_prime_power_f64(p, e);
        if acc == 0.0 {
            return 0.0;
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// direct and co-finite truncations
// ---------------------------------------------------------------------------

/// `sum_{q <= Q_i} G(q) c_q(a)` at each checkpoint, natural order.
pub fn direct_partial_sum(
    spec: &CoefficientSpec,
    a: u64,
    q_max: u64,
    checkpoints: &[u64],
    opts: &EvalOptions,
    tables: &SieveTables,
) -> Result<PartialSumSeries> {
    assert!(a >= 1);
    let mode = opts.resolve(spec, q_max)?;
    let sums = series_partial_sums(
        spec,
        SeriesKernel::Ramanujan { a },
        &SeriesFilter::All,
        q_max,
        checkpoints,
        mode,
        tables,
    )?;
    Ok(PartialSumSeries {
        a,
        mode,
        checkpoints: sums,
        tail_bound: phi_majorant_tail(spec, a, q_max),
    })
}

/// `sum_{r <= Q, (r,F)=1} G(r) c_r(a)`, natural order.
pub fn cofinite_partial_sum(
    spec: &CoefficientSpec,
    f_set: &PrimeSet,
    a: u64,
    q_max: u64,
    opts: &EvalOptions,
    tables: &SieveTables,
) -> Result<Scalar> {
    assert!(a >= 1);
    let mode = opts.resolve(spec, q_max)?;
    let sums = series_partial_sums(
        spec,
        SeriesKernel::Ramanujan { a },
        &SeriesFilter::CoprimeTo(f_set),
        q_max,
        &[],
        mode,
        tables,
    )?;
    Ok(sums.into_iter().last().expect("final checkpoint").1)
}

// ---------------------------------------------------------------------------
// factored evaluations
// ---------------------------------------------------------------------------

/// A finite-factor-times-co-finite-factor evaluation at truncation `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationResult {
    pub f_set: PrimeSet,
    pub a: u64,
    pub q_max: u64,
    pub mode: ArithMode,
    /// Exact finite Euler product over `f_set`.
    pub finite_factor: Rational,
    pub cofinite_truncated: Scalar,
    /// `finite_factor * cofinite_truncated`.
    pub product: Scalar,
    pub direct_truncated: Scalar,
    /// `|direct_truncated - product|`.
    pub discrepancy: f64,
}

/// Factor the expansion through a non-empty finite prime set `F`:
/// finite factor exactly, co-finite factor and direct sum at truncation `Q`.
pub fn factored_eval(
    spec: &CoefficientSpec,
    f_set: &PrimeSet,
    a: u64,
    q_max: u64,
    opts: &EvalOptions,
    tables: &SieveTables,
) -> Result<FactorizationResult> {
    if f_set.is_empty() {
        return Err(Error::EmptyPrimeSet);
    }
    assemble_factored(spec, f_set.clone(), a, q_max, opts, tables, false)
}

/// Local factorization: `F = P(a)`, the prime divisors of `a`. The co-finite
/// series runs over `(r, a) = 1`, where `c_r(a)` reduces to `mu(r)`.
pub fn local_factored_eval(
    spec: &CoefficientSpec,
    a: u64,
    q_max: u64,
    opts: &EvalOptions,
    tables: &SieveTables,
) -> Result<FactorizationResult> {
    let f_set = arith::prime_divisors(a);
    assemble_factored(spec, f_set, a, q_max, opts, tables, true)
}

fn assemble_factored(
    spec: &CoefficientSpec,
    f_set: PrimeSet,
    a: u64,
    q_max: u64,
    opts: &EvalOptions,
    tables: &SieveTables,
    mobius_kernel: bool,
) -> Result<FactorizationResult> {
    assert!(a >= 1);
    let mode = opts.resolve(spec, q_max)?;
    let finite_factor = euler::finite_factor(spec, &f_set, a);
    let kernel = if mobius_kernel {
        SeriesKernel::Mobius
    } else {
        SeriesKernel::Ramanujan { a }
    };
    let cofinite = series_partial_sums(
        spec,
        kernel,
        &SeriesFilter::CoprimeTo(&f_set),
        q_max,
        &[],
        mode,
        tables,
    )?
    .pop()
    .expect("final checkpoint")
    .1;
    let direct = series_partial_sums(
        spec,
        SeriesKernel::Ramanujan { a },
        &SeriesFilter::All,
        q_max,
        &[],
        mode,
        tables,
    )?
    .pop()
    .expect("final checkpoint")
    .1;
    let product = cofinite.mul_rational(&finite_factor);
    let discrepancy = direct.abs_diff(&product);
    Ok(FactorizationResult {
        f_set,
        a,
        q_max,
        mode,
        finite_factor,
        cofinite_truncated: cofinite,
        product,
        direct_truncated: direct,
        discrepancy,
    })
}

/// Rigorous bound on `|direct(Q) - finite_factor * cofinite(Q)|` from
/// `|c_r(a)| <= phi(r)`.
///
/// Writing each modulus uniquely as `s * r` with `s` built from `F` and `r`
/// coprime to `F`, the mismatch consists of the pairs with `r <= Q < s*r`;
/// only finitely many `s` contribute because `c_s(a)` vanishes once any
/// exponent passes `v_p(a) + 1`. Each inner span is summed numerically.
pub fn factored_discrepancy_majorant(
    spec: &CoefficientSpec,
    f_set: &PrimeSet,
    a: u64,
    q_max: u64,
    tables: &SieveTables,
) -> Result<f64> {
    tables.check_capacity(q_max)?;
    let sticky = sticky_parts(f_set.primes().iter().copied(), a);
    let mut bound = 0.0f64;
    for &(s, c_abs) in &sticky {
        if s == 1 {
            continue;
        }
        let g_abs = coeff_f64_of(spec, s).abs();
        if g_abs == 0.0 || c_abs == 0.0 {
            continue;
        }
        let lo = q_max / s; // r > Q/s  <=>  r >= floor(Q/s) + 1
        let mut span = KahanSum::new();
        for r in (lo + 1)..=q_max {
            if f_set.coprime_to(r) {
                let g = coeff_f64(spec, r, tables).abs();
                if g != 0.0 {
                    span.add(g * tables.phi(r) as f64);
                }
            }
        }
        bound += g_abs * c_abs * span.value();
    }
    Ok(bound)
}

/// All `s` built from the given primes with exponents up to `v_p(a) + 1`,
/// paired with `|c_s(a)|`; exactly the part of `S_F` where `c_s(a) != 0`.
fn sticky_parts<I: Iterator<Item = u64>>(primes: I, a: u64) -> Vec<(u64, f64)> {
    let mut parts: Vec<(u64, f64)> = vec![(1, 1.0)];
    for p in primes {
        let v = valuation(p, a);
        let mut next = Vec::with_capacity(parts.len() * (v as usize + 2));
        for &(s, c) in &parts {
            next.push((s, c));
            for j in 1..=(v + 1) {
                let Some(pj) = p.checked_pow(j) else { break };
                let Some(sp) = s.checked_mul(pj) else { break };
                let cj = c_prime_power(p, j, a).expect("prime input") as f64;
                next.push((sp, c * cj.abs()));
            }
        }
        parts = next;
    }
    parts
}

fn coeff_f64_of(spec: &CoefficientSpec, q: u64) -> f64 {
    arith::factorize(q)
        .iter()
        .map(|(p, e)| spec.at_prime_power_f64(p, e))
        .product()
}

fn valuation(p: u64, a: u64) -> u32 {
    let mut v = 0;
    let mut x = a;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

// ---------------------------------------------------------------------------
// Moebius-series identity
// ---------------------------------------------------------------------------

/// Both sides of `sum_q G(q) mu(q) = prod_{p|d} (1 - G(p)) * sum_{(r,d)=1} G(r) mu(r)`
/// at truncation `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusIdentityReport {
    pub d: u64,
    pub q_max: u64,
    pub mode: ArithMode,
    pub lhs_truncated: Scalar,
    /// Exact `prod_{p|d} (1 - G(p))`.
    pub product_factor: Rational,
    pub rhs_truncated: Scalar,
    pub product_times_rhs: Scalar,
    pub difference: f64,
}

pub fn mobius_identity_check(
    spec: &CoefficientSpec,
    d: u64,
    q_max: u64,
    opts: &EvalOptions,
    tables: &SieveTables,
) -> Result<MobiusIdentityReport> {
    assert!(d >= 1);
    let mode = opts.resolve(spec, q_max)?;
    let divisors = arith::prime_divisors(d);
    let lhs = series_partial_sums(
        spec,
        SeriesKernel::Mobius,
        &SeriesFilter::All,
        q_max,
        &[],
        mode,
        tables,
    )?
    .pop()
    .expect("final")
    .1;
    let rhs = series_partial_sums(
        spec,
        SeriesKernel::Mobius,
        &SeriesFilter::CoprimeTo(&divisors),
        q_max,
        &[],
        mode,
        tables,
    )?
    .pop()
    .expect("final")
    .1;
    let mut product_factor = Rational::one();
    for p in divisors.iter() {
        product_factor *= Rational::one() - spec.at_prime_power(p, 1);
    }
    let product_times_rhs = rhs.mul_rational(&product_factor);
    let difference = lhs.abs_diff(&product_times_rhs);
    Ok(MobiusIdentityReport {
        d,
        q_max,
        mode,
        lhs_truncated: lhs,
        product_factor,
        rhs_truncated: rhs,
        product_times_rhs,
        difference,
    })
}

// ---------------------------------------------------------------------------
// smooth-supported exact evaluation
// ---------------------------------------------------------------------------

/// Exact value of the full expansion of a smooth-supported spec: the product
/// of its Euler p-factors. Requires a declared smooth bound and finite
/// ladders (explicit overrides whose tails vanish).
pub fn smooth_exact_eval(spec: &CoefficientSpec, a: u64) -> Result<Rational> {
    assert!(a >= 1);
    let bound = spec.declared_smooth_bound().ok_or(Error::MissingSmoothBound)?;
    if !spec.has_sparse_support() {
        return Err(Error::NotSmoothlySupported(
            "base family is dense (support off the overrides)".into(),
        ));
    }
    for (&p, rule) in spec.overrides() {
        if p > bound {
            return Err(Error::NotSmoothlySupported(format!(
                "override prime {p} exceeds the declared bound {bound}"
            )));
        }
        match rule {
            PrimeRule::AllOnes => {
                return Err(Error::NotSmoothlySupported(format!(
                    "all-ones ladder at {p}: support is not finite"
                )))
            }
            PrimeRule::Explicit { tail, .. } => {
                // with a zero base both tails vanish, but keep the contract
                debug_assert!(matches!(tail, TailRule::Zero | TailRule::Family));
            }
        }
    }
    // primes without an override carry the zero ladder and contribute 1
    let mut acc = Rational::one();
    for &p in spec.overrides().keys() {
        acc *= euler::p_factor(spec, p, a).value;
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// infinite Euler product
// ---------------------------------------------------------------------------

/// Partial infinite Euler product `prod_{p <= p_max} sum_K G(p^K) c_{p^K}(a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerProductEval {
    pub a: u64,
    pub p_max: u64,
    /// Exact zero as soon as one factor vanishes exactly, float otherwise.
    pub value: Scalar,
    /// First prime whose factor is exactly zero, if any.
    pub zero_factor_at: Option<u64>,
    /// `(p, partial product through p)` for every prime scanned.
    pub trace: Vec<(u64, f64)>,
    /// The same product split as `prod_{p|a} (p-factor) * prod_{p not| a} (1 - G(p))`.
    pub dividing_part: f64,
    pub coprime_part: f64,
}

pub fn infinite_euler_product_eval(
    spec: &CoefficientSpec,
    a: u64,
    p_max: u64,
    tables: &SieveTables,
) -> Result<EulerProductEval> {
    assert!(a >= 1);
    if p_max < 2 {
        return Err(Error::InvalidArgument("p_max must be >= 2".into()));
    }
    tables.check_capacity(p_max)?;
    let mut product = 1.0f64;
    let mut zero_at = None;
    let mut trace = Vec::new();
    let mut dividing = 1.0f64;
    let mut coprime = 1.0f64;
    for p in tables.primes().take_while(|&p| p <= p_max) {
        let EulerFactorValue { value, v, .. } = euler::p_factor(spec, p, a);
        let f = rational::to_f64(&value);
        if value.is_zero() && zero_at.is_none() {
            zero_at = Some(p);
        }
        product *= f;
        if v > 0 {
            dividing *= f;
        } else {
            coprime *= f;
        }
        trace.push((p, product));
    }
    let value = if zero_at.is_some() {
        Scalar::Exact(Rational::zero())
    } else {
        Scalar::Float(product)
    };
    Ok(EulerProductEval {
        a,
        p_max,
        value,
        zero_factor_at: zero_at,
        trace,
        dividing_part: dividing,
        coprime_part: coprime,
    })
}

// ---------------------------------------------------------------------------
// coprime split
// ---------------------------------------------------------------------------

/// Two-factor split of the expansion along a partition of the primes.
#[derive(Debug, Clone, PartialEq)]
pub struct CoprimeSplitReport {
    pub a: u64,
    pub q_max: u64,
    pub p_max: u64,
    pub mode: ArithMode,
    /// Truncated sum over moduli with every prime divisor on the S side.
    pub s_factor_truncated: Scalar,
    /// Truncated sum over moduli coprime to the S side.
    pub r_factor_truncated: Scalar,
    pub product: Scalar,
    pub direct_truncated: Scalar,
    pub product_vs_direct: f64,
    /// The same two factors as Euler products over `p <= p_max`.
    pub s_euler_product: f64,
    pub r_euler_product: f64,
}

/// Evaluate both factors of the split defined by `in_s` (membership of a
/// prime on the S side), their product, and the direct sum, plus the
/// product-of-p-factors route over `p <= p_max`.
pub fn coprime_split_eval(
    spec: &CoefficientSpec,
    in_s: &dyn Fn(u64) -> bool,
    a: u64,
    q_max: u64,
    p_max: u64,
    opts: &EvalOptions,
    tables: &SieveTables,
) -> Result<CoprimeSplitReport> {
    assert!(a >= 1);
    if p_max < 2 {
        return Err(Error::InvalidArgument("p_max must be >= 2".into()));
    }
    tables.check_capacity(p_max)?;
    let mode = opts.resolve(spec, q_max)?;
    let kernel = SeriesKernel::Ramanujan { a };
    let s_factor = series_partial_sums(
        spec, kernel, &SeriesFilter::FactorsWithin(&in_s), q_max, &[], mode, tables,
    )?
    .pop()
    .expect("final")
    .1;
    let r_factor = series_partial_sums(
        spec, kernel, &SeriesFilter::FactorsOutside(&in_s), q_max, &[], mode, tables,
    )?
    .pop()
    .expect("final")
    .1;
    let direct = series_partial_sums(
        spec, kernel, &SeriesFilter::All, q_max, &[], mode, tables,
    )?
    .pop()
    .expect("final")
    .1;
    let product = match (&s_factor, &r_factor) {
        (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(x * y),
        (x, y) => Scalar::Float(x.to_f64() * y.to_f64()),
    };
    let product_vs_direct = product.abs_diff(&direct);

    let mut s_prod = 1.0f64;
    let mut r_prod = 1.0f64;
    for p in tables.primes().take_while(|&p| p <= p_max) {
        let f = rational::to_f64(&euler::p_factor(spec, p, a).value);
        if in_s(p) {
            s_prod *= f;
        } else {
            r_prod *= f;
        }
    }
    Ok(CoprimeSplitReport {
        a,
        q_max,
        p_max,
        mode,
        s_factor_truncated: s_factor,
        r_factor_truncated: r_factor,
        product,
        direct_truncated: direct,
        product_vs_direct,
        s_euler_product: s_prod,
        r_euler_product: r_prod,
    })
}

// ---------------------------------------------------------------------------
// absolute convergence
// ---------------------------------------------------------------------------

/// Partial sums of `sum |G(q) c_q(a)|` with a majorant tail when available.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsConvergenceReport {
    pub a: u64,
    pub q_max: u64,
    /// Partial absolute sums at doubling checkpoints (and at `q_max`).
    pub checkpoints: Vec<(u64, f64)>,
    pub final_sum: f64,
    /// Closed-form majorant for the tail, when the family admits one.
    pub tail_bound: Option<f64>,
    /// Human-readable description of the majorant, or `None` for
    /// "no majorant".
    pub majorant: Option<String>,
    /// Increments over successive doublings stopped shrinking: empirical
    /// signal of a divergent absolute series (only set without a majorant).
    pub diverging: bool,
}

pub fn abs_convergence_report(
    spec: &CoefficientSpec,
    a: u64,
    q_max: u64,
    tables: &SieveTables,
) -> Result<AbsConvergenceReport> {
    assert!(a >= 1);
    let mut marks = Vec::new();
    let mut m = 1u64;
    while m < q_max {
        marks.push(m);
        m = m.saturating_mul(2);
    }
    marks.push(q_max);

    // absolute series: sum |G(q)| |c_q(a)| in float
    let sums: Vec<(u64, f64)> = if let Some(support) = spec.support_up_to(q_max) {
        let mut acc = KahanSum::new();
        let mut out = Vec::new();
        let mut points = support.iter().peekable();
        for &mark in &marks {
            while let Some(pt) = points.peek() {
                if pt.q > mark {
                    break;
                }
                let c = kernel_of_factors(SeriesKernel::Ramanujan { a }, &pt.factors);
                acc.add((rational::to_f64(&pt.value) * c as f64).abs());
                points.next();
            }
            out.push((mark, acc.value()));
        }
        out
    } else {
        tables.check_capacity(q_max)?;
        let kernel = RamanujanKernel::new(a, tables);
        let mut acc = KahanSum::new();
        let mut out = Vec::new();
        let mut next = marks.iter().copied();
        let mut mark = next.next();
        for q in 1..=q_max {
            let c = kernel.c(q);
            if c != 0 {
                let g = coeff_f64(spec, q, tables);
                if g != 0.0 {
                    acc.add((g * c as f64).abs());
                }
            }
            while mark == Some(q) {
                out.push((q, acc.value()));
                mark = next.next();
            }
        }
        out
    };

    let final_sum = sums.last().expect("non-empty").1;
    let tail_bound = phi_majorant_tail(spec, a, q_max);
    let majorant = majorant_description(spec);
    let diverging = if majorant.is_none() && sums.len() >= 3 {
        let increments: Vec<f64> = sums.windows(2).map(|w| w[1].1 - w[0].1).collect();
        let last = *increments.last().unwrap();
        let peak = increments.iter().cloned().fold(0.0f64, f64::max);
        last > 0.5 * peak && last > 1e-9
    } else {
        false
    };
    Ok(AbsConvergenceReport {
        a,
        q_max,
        checkpoints: sums,
        final_sum,
        tail_bound,
        majorant,
        diverging,
    })
}

// ---------------------------------------------------------------------------
// phi-majorant tails
// ---------------------------------------------------------------------------

/// Tail bound `sum_{q > Q} |G(q) c_q(a)| <= ...` from `|c_q(a)| <= phi(q) <= q`,
/// for the families that admit a closed form:
///
/// - finitely supported specs: the exact (finite) absolute tail over the
///   support beyond `Q`;
/// - `G = q^{-s}` with `s >= 3`, possibly with all-ones ladders: splitting
///   `q = t*m` over the all-ones part `t` (only `v_p(a)+1` rungs carry a
///   non-vanishing `c`), the tail is
///   `sum_t |c_t(a)| * sum_{m > Q/t} m^{1-s}`.
///
/// Everything else has no certified tolerance (`None`).
pub fn phi_majorant_tail(spec: &CoefficientSpec, a: u64, q_max: u64) -> Option<f64> {
    if let Some(max_q) = finite_support_max(spec) {
        if max_q <= q_max {
            return Some(0.0);
        }
        let support = spec.support_up_to(max_q)?;
        let mut tail = 0.0f64;
        for pt in support.iter().filter(|pt| pt.q > q_max) {
            let c = kernel_of_factors(SeriesKernel::Ramanujan { a }, &pt.factors);
            tail += (rational::to_f64(&pt.value) * c as f64).abs();
        }
        return Some(tail);
    }
    let crate::coeff::BaseFamily::Power { s } = *spec.base() else {
        return None;
    };
    if s < 3 {
        return None; // sum m^{1-s} has no finite phi-majorant for s <= 2
    }
    let mut allones = Vec::new();
    for (&p, rule) in spec.overrides() {
        match rule {
            PrimeRule::AllOnes => allones.push(p),
            PrimeRule::Explicit { .. } => return None,
        }
    }
    let sticky = sticky_parts(allones.into_iter(), a);
    let k = (s - 1) as i32; // exponent of the majorant sum m^{-k}, k >= 2
    let mut tail = 0.0f64;
    for (t, c_abs) in sticky {
        let x = q_max / t; // integer floor of Q/t
        let span = if x >= 1 {
            // sum_{m > x} m^{-k} <= x^{-(k-1)} / (k-1)
            (x as f64).powi(-(k - 1)) / (k - 1) as f64
        } else {
            // all m >= 1: zeta(k) <= 1 + 1/(k-1)
            1.0 + 1.0 / (k - 1) as f64
        };
        tail += c_abs * span;
    }
    Some(tail)
}

fn majorant_description(spec: &CoefficientSpec) -> Option<String> {
    if finite_support_max(spec).is_some() {
        return Some("finite support: exact absolute tail over the support".into());
    }
    if let crate::coeff::BaseFamily::Power { s } = *spec.base() {
        if s >= 3 && spec.overrides().values().all(|r| matches!(r, PrimeRule::AllOnes)) {
            return Some(format!(
                "phi-majorant: sum_t |c_t(a)| * sum_{{m > Q/t}} m^{{1-{s}}} over all-ones parts t"
            ));
        }
    }
    None
}

/// Largest support point of a finitely supported spec, `None` when the
/// support is infinite or the spec is dense.
fn finite_support_max(spec: &CoefficientSpec) -> Option<u64> {
    if !spec.has_sparse_support() {
        return None;
    }
    let mut max = 1u64;
    for (&p, rule) in spec.overrides() {
        match rule {
            PrimeRule::AllOnes => return None,
            PrimeRule::Explicit { values, .. } => {
                let top = values
                    .iter()
                    .rposition(|v| !v.is_zero())
                    .map(|i| i as u32 + 1)
                    .unwrap_or(0);
                if top > 0 {
                    max = max.checked_mul(p.checked_pow(top)?)?;
                }
            }
        }
    }
    Some(max)
}

// ---------------------------------------------------------------------------
// non-vanishing product scan
// ---------------------------------------------------------------------------

/// Outcome of scanning `prod_{p <= p_max, p not in F} (1 - G(p))`.
#[derive(Debug, Clone, PartialEq)]
pub enum NonvanishingVerdict {
    /// No scanned partial product came near zero; the minimum modulus is
    /// reported. A scan-scale statement, not a proof.
    BoundedAwayFromZero { min_abs_partial: f64 },
    /// Some scanned prime outside `F` has `G(p) = 1`.
    HypothesisViolated { p: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonvanishingReport {
    pub f_set: PrimeSet,
    pub p_max: u64,
    pub verdict: NonvanishingVerdict,
    /// `(p, partial product)` over the scanned primes outside `F`.
    pub partial_products: Vec<(u64, f64)>,
    /// `sum |G(p)|` over the scanned primes outside `F`.
    pub abs_g_sum: f64,
}

pub fn nonvanishing_product_check(
    spec: &CoefficientSpec,
    f_set: &PrimeSet,
    p_max: u64,
    tables: &SieveTables,
) -> Result<NonvanishingReport> {
    if p_max < 2 {
        return Err(Error::InvalidArgument("p_max must be >= 2".into()));
    }
    tables.check_capacity(p_max)?;
    let mut partials = Vec::new();
    let mut product = 1.0f64;
    let mut abs_sum = KahanSum::new();
    let mut min_abs = f64::INFINITY;
    let one = Rational::one();
    for p in tables.primes().take_while(|&p| p <= p_max) {
        if f_set.contains(p) {
            continue;
        }
        let g = spec.at_prime_power(p, 1);
        if g == one {
            return Ok(NonvanishingReport {
                f_set: f_set.clone(),
                p_max,
                verdict: NonvanishingVerdict::HypothesisViolated { p },
                partial_products: partials,
                abs_g_sum: abs_sum.value(),
            });
        }
        let gf = rational::to_f64(&g);
        abs_sum.add(gf.abs());
        product *= 1.0 - gf;
        min_abs = min_abs.min(product.abs());
        partials.push((p, product));
    }
    Ok(NonvanishingReport {
        f_set: f_set.clone(),
        p_max,
        verdict: NonvanishingVerdict::BoundedAwayFromZero {
            min_abs_partial: if min_abs.is_finite() { min_abs } else { 1.0 },
        },
        partial_products: partials,
        abs_g_sum: abs_sum.value(),
    })
}
