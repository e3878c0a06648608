//! Trichotomy of multiplicative coefficient functions against the cloud of
//! the null function, driven by the fixed-point sets `F(G)` and `F0(G)`:
//!
//! - case C1: `F(G)` empty — membership is equivalent to the vanishing of
//!   `sum_q G(q) mu(q)`;
//! - case C2: `F0(G)` non-empty — membership holds outright (one Euler factor
//!   vanishes identically);
//! - case C3: `F(G)` non-empty, `F0(G)` empty — membership is equivalent to
//!   the vanishing of the `F(G)`-coprime Moebius series; the equivalence is
//!   recorded as conditional, never asserted.
//!
//! Numeric verdicts are three-valued: the governing series converge far too
//! slowly for finite truncations to certify membership, so evidence is either
//! a certified exclusion (value beyond its certified tail), a trend consistent
//! with vanishing, or uncertified.

use crate::arith::{PrimeSet, SieveTables};
use crate::coeff::{CoefficientSpec, FixedPointReport};
use crate::error::Error;
use crate::expansion::{
    abs_convergence_report, mobius_identity_check, phi_majorant_tail, AbsConvergenceReport,
    EvalOptions, MobiusIdentityReport, NonvanishingReport, NonvanishingVerdict,
};
use crate::numeric::{ArithMode, KahanSum, Scalar};
use crate::rational::Rational;
use crate::Result;

/// The three classification cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudCase {
    /// `F(G)` empty.
    C1,
    /// `F0(G)` non-empty.
    C2,
    /// `F(G)` non-empty, `F0(G)` empty.
    C3,
}

impl CloudCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            CloudCase::C1 => "C1",
            CloudCase::C2 => "C2",
            CloudCase::C3 => "C3",
        }
    }
}

/// One numeric evidence row.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceRow {
    pub series: String,
    pub q: u64,
    pub value: f64,
    /// Certified tail bound at this truncation, `None` when uncertified.
    pub tail_bound: Option<f64>,
}

/// Numeric standing of the governing series.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesAssessment {
    /// The truncated value exceeds its certified tail: the series cannot
    /// vanish, so the spec is not in the cloud.
    NotInCloudCertified { value: f64, tail_bound: f64 },
    /// Truncations trend toward zero; consistent with membership but not a
    /// certificate.
    ConsistentWithZeroUncertified,
    /// No certificate and no clear trend.
    Uncertified,
}

/// Membership verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum Membership {
    /// Case C2: a vanishing Euler factor makes the whole expansion vanish.
    InCloudCertain,
    /// Cases C1/C3: membership is equivalent to the vanishing of the named
    /// series (conditionally, for C3).
    InCloudIffSeriesVanishes { series: String, assessment: SeriesAssessment },
    Undetermined,
}

/// Full classification output.
#[derive(Debug, Clone, PartialEq)]
pub struct CloudClassification {
    pub case: CloudCase,
    pub fixed_points: FixedPointReport,
    pub membership: Membership,
    pub evidence: Vec<EvidenceRow>,
    /// Present for C3: the governing equivalence is conditional.
    pub conditional_note: Option<String>,
    /// Present when the fixed-point scan was not exhaustive and found nothing.
    pub scan_caveat: Option<String>,
    /// Analytic hypotheses assumed, not verified.
    pub assumptions: Vec<String>,
}

/// Classify a spec and gather numeric evidence at truncation `q_max`.
pub fn classify(
    spec: &CoefficientSpec,
    p_max: u64,
    k_max: u32,
    q_max: u64,
    tables: &SieveTables,
) -> Result<CloudClassification> {
    let fixed_points = spec.fixed_points(p_max, k_max);
    let case = if fixed_points.f_of_g.is_empty() {
        CloudCase::C1
    } else if !fixed_points.f0_of_g.is_empty() {
        CloudCase::C2
    } else {
        CloudCase::C3
    };

    let scan_caveat = if !fixed_points.exhaustive && fixed_points.f_of_g.is_empty() {
        Some(format!(
            "bounded scan: no fixed point found for p <= {p_max}, K <= {k_max}; \
             membership of larger primes is not settled"
        ))
    } else {
        None
    };

    let mut assumptions = Vec::new();
    if let Some(note) = spec.convergence_assumption() {
        assumptions.push(note.to_string());
    }

    let (membership, evidence) = match case {
        CloudCase::C2 => {
            let p = fixed_points.f0_of_g.primes()[0];
            let evidence = vec![EvidenceRow {
                series: format!("euler factor at p={p}: all rungs equal 1, factor vanishes identically"),
                q: q_max,
                value: 0.0,
                tail_bound: Some(0.0),
            }];
            (Membership::InCloudCertain, evidence)
        }
        CloudCase::C1 => {
            let series = "sum_q G(q) mu(q)".to_string();
            let (rows, assessment) =
                mobius_series_evidence(spec, &PrimeSet::empty(), &series, q_max, tables)?;
            (
                Membership::InCloudIffSeriesVanishes { series, assessment },
                rows,
            )
        }
        CloudCase::C3 => {
            let f = fixed_points.f_of_g.clone();
            let series = format!("sum over (r,{f})=1 of G(r) mu(r)");
            let (rows, assessment) =
                mobius_series_evidence(spec, &f, &series, q_max, tables)?;
            (
                Membership::InCloudIffSeriesVanishes { series, assessment },
                rows,
            )
        }
    };

    let conditional_note = (case == CloudCase::C3).then(|| {
        "the governing equivalence for this case is conditional; both sides are \
         reported, membership is not asserted"
            .to_string()
    });

    Ok(CloudClassification {
        case,
        fixed_points,
        membership,
        evidence,
        conditional_note,
        scan_caveat,
        assumptions,
    })
}

/// Float truncations of `sum_{(r,F)=1} G(r) mu(r)` at doubling checkpoints,
/// plus the three-valued assessment of the final value.
fn mobius_series_evidence(
    spec: &CoefficientSpec,
    f_set: &PrimeSet,
    series: &str,
    q_max: u64,
    tables: &SieveTables,
) -> Result<(Vec<EvidenceRow>, SeriesAssessment)> {
    tables.check_capacity(q_max)?;
    let mut rows = Vec::new();
    let mut acc = KahanSum::new();
    let mut next_mark = 1u64;
    for q in 1..=q_max {
        if f_set.coprime_to(q) {
            let mu = tables.mu(q);
            if mu != 0 {
                let g = coeff_f64(spec, q, tables);
                if g != 0.0 {
                    acc.add(g * mu as f64);
                }
            }
        }
        if q == next_mark || q == q_max {
            rows.push(EvidenceRow {
                series: series.to_string(),
                q,
                value: acc.value(),
                tail_bound: phi_majorant_tail(spec, 1, q),
            });
            while next_mark <= q {
                next_mark = next_mark.saturating_mul(2);
            }
        }
    }
    let last = rows.last().expect("non-empty");
    let assessment = match last.tail_bound {
        Some(tail) if last.value.abs() > tail => SeriesAssessment::NotInCloudCertified {
            value: last.value,
            tail_bound: tail,
        },
        Some(_) => SeriesAssessment::ConsistentWithZeroUncertified,
        None => {
            let peak = rows.iter().map(|r| r.value.abs()).fold(0.0f64, f64::max);
            if last.value.abs() < 0.05 && last.value.abs() < 0.5 * peak {
                SeriesAssessment::ConsistentWithZeroUncertified
            } else {
                SeriesAssessment::Uncertified
            }
        }
    };
    Ok((rows, assessment))
}

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
// vanishing transfer across coprimality classes
// ---------------------------------------------------------------------------

/// One transfer row: the `d`-coprime Moebius series against the full one.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferRow {
    pub d: u64,
    pub cofinite_truncated: Scalar,
    /// Exact `prod_{p|d} (1 - G(p))`; nonzero whenever `F(G)` is empty.
    pub product_factor: Rational,
    pub product_times_cofinite: Scalar,
    /// `|full series truncation - product * cofinite truncation|`.
    pub difference_from_full: f64,
}

/// Report linking `sum_q G(q) mu(q)` to its `d`-coprime restrictions.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub q_max: u64,
    pub mode: ArithMode,
    pub full_series: Scalar,
    pub rows: Vec<TransferRow>,
}

/// For a spec with empty `F(G)`, report for each `d` the truncated
/// `sum_{(r,d)=1} G(r) mu(r)`, the exact product `prod_{p|d} (1 - G(p))`, and
/// the truncation gap in the identity tying them to the full series.
///
/// If the full series vanishes, every restriction must vanish with it (the
/// product factor is nonzero); the rows record how the truncations track.
pub fn fact2_transfer_check(
    spec: &CoefficientSpec,
    d_set: &[u64],
    q_max: u64,
    p_max: u64,
    k_max: u32,
    opts: &EvalOptions,
    tables: &SieveTables,
) -> Result<TransferReport> {
    let fixed_points = spec.fixed_points(p_max, k_max);
    if !fixed_points.f_of_g.is_empty() {
        let case = if fixed_points.f0_of_g.is_empty() { "C3" } else { "C2" };
        return Err(Error::NotCaseC1 { case });
    }
    let mut rows = Vec::new();
    let mut full: Option<Scalar> = None;
    let mut mode = ArithMode::Float;
    for &d in d_set {
        let MobiusIdentityReport {
            lhs_truncated,
            product_factor,
            rhs_truncated,
            product_times_rhs,
            difference,
            mode: m,
            ..
        } = mobius_identity_check(spec, d, q_max, opts, tables)?;
        mode = m;
        full.get_or_insert(lhs_truncated);
        rows.push(TransferRow {
            d,
            cofinite_truncated: rhs_truncated,
            product_factor,
            product_times_cofinite: product_times_rhs,
            difference_from_full: difference,
        });
    }
    let full_series = match full {
        Some(s) => s,
        None => {
            // empty d_set: still report the full series
            mobius_identity_check(spec, 1, q_max, opts, tables)?.lhs_truncated
        }
    };
    Ok(TransferReport { q_max, mode, full_series, rows })
}

// ---------------------------------------------------------------------------
// exclusion by absolute convergence
// ---------------------------------------------------------------------------

/// Outcome of the absolute-convergence exclusion route.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExclusionOutcome {
    /// Certified absolutely convergent and the product over primes outside
    /// `F(G)` stays away from zero on the scan: not in the cloud.
    ExcludedFromCloud,
    /// Either no certified majorant or no usable product verdict.
    NoExclusionAtScanScale,
    /// Case C2: absolute convergence coexists with membership, so the route
    /// does not apply.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExclusionReport {
    pub case: CloudCase,
    pub outcome: ExclusionOutcome,
    /// A closed-form majorant certifies absolute convergence for every `a`.
    pub abs_certified: bool,
    pub abs_report: Option<AbsConvergenceReport>,
    pub nonvanishing: Option<NonvanishingReport>,
}

/// Try to exclude a C1/C3 spec from the cloud: certified absolute convergence
/// forces the expansion into an infinite Euler product whose factors over
/// primes outside `F(G)` cannot vanish.
pub fn absolute_convergence_exclusion(
    spec: &CoefficientSpec,
    q_max: u64,
    p_max: u64,
    k_max: u32,
    tables: &SieveTables,
) -> Result<ExclusionReport> {
    let fixed_points = spec.fixed_points(p_max.min(10_000), k_max);
    let case = if fixed_points.f_of_g.is_empty() {
        CloudCase::C1
    } else if !fixed_points.f0_of_g.is_empty() {
        CloudCase::C2
    } else {
        CloudCase::C3
    };
    if case == CloudCase::C2 {
        return Ok(ExclusionReport {
            case,
            outcome: ExclusionOutcome::NotApplicable,
            abs_certified: false,
            abs_report: None,
            nonvanishing: None,
        });
    }
    let abs = abs_convergence_report(spec, 1, q_max, tables)?;
    let abs_certified = abs.tail_bound.is_some();
    let nonvanishing =
        crate::expansion::nonvanishing_product_check(spec, &fixed_points.f_of_g, p_max, tables)?;
    let product_ok = matches!(
        nonvanishing.verdict,
        NonvanishingVerdict::BoundedAwayFromZero { min_abs_partial } if min_abs_partial > 0.0
    );
    let outcome = if abs_certified && product_ok {
        ExclusionOutcome::ExcludedFromCloud
    } else {
        ExclusionOutcome::NoExclusionAtScanScale
    };
    Ok(ExclusionReport {
        case,
        outcome,
        abs_certified,
        abs_report: Some(abs),
        nonvanishing: Some(nonvanishing),
    })
}
