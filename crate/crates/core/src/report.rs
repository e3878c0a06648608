//! JSON records and CSV tables for evaluation and classification results.
//!
//! One JSON record per evaluation; rationals travel as `"num/den"` strings and
//! floats as shortest round-trip decimals, so exact-mode records re-read
//! bit for bit. CSV carries checkpoint tables for plotting.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::classify::{
    CloudClassification, EvidenceRow, Membership, SeriesAssessment,
};
use crate::coeff::CoefficientSpec;
use crate::error::Error;
use crate::expansion::{
    CoprimeSplitReport, EulerProductEval, FactorizationResult, PartialSumSeries,
};
use crate::numeric::{ArithMode, Scalar};
use crate::rational::Rational;
use crate::Result;

/// One checkpoint of a truncated series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRow {
    pub q: u64,
    pub value: Scalar,
}

/// One sampled point of an Euler-product trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub p: u64,
    pub partial_product: f64,
}

/// One evaluation, in the shape of the method that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum EvalRecord {
    Direct {
        spec_digest: String,
        a: u64,
        q: u64,
        mode: ArithMode,
        checkpoints: Vec<CheckpointRow>,
        value: Scalar,
        tail_bound: Option<f64>,
        /// Set when no majorant certifies the truncation error.
        no_certified_tolerance: bool,
        assumptions: Vec<String>,
    },
    Factored {
        spec_digest: String,
        a: u64,
        q: u64,
        mode: ArithMode,
        f: Vec<u64>,
        #[serde(with = "crate::rational::serde_fraction")]
        finite_factor: Rational,
        cofinite: Scalar,
        product: Scalar,
        direct: Scalar,
        discrepancy: f64,
        assumptions: Vec<String>,
    },
    Local {
        spec_digest: String,
        a: u64,
        q: u64,
        mode: ArithMode,
        f: Vec<u64>,
        #[serde(with = "crate::rational::serde_fraction")]
        finite_factor: Rational,
        cofinite: Scalar,
        product: Scalar,
        direct: Scalar,
        discrepancy: f64,
        assumptions: Vec<String>,
    },
    Euler {
        spec_digest: String,
        a: u64,
        p_max: u64,
        value: Scalar,
        zero_factor_at: Option<u64>,
        dividing_part: f64,
        coprime_part: f64,
        /// Geometrically sampled partial products (always includes the last).
        trace: Vec<TraceRow>,
        assumptions: Vec<String>,
    },
    CoprimeSplit {
        spec_digest: String,
        a: u64,
        q: u64,
        p_max: u64,
        mode: ArithMode,
        s_primes: Vec<u64>,
        s_factor: Scalar,
        r_factor: Scalar,
        product: Scalar,
        direct: Scalar,
        product_vs_direct: f64,
        s_euler_product: f64,
        r_euler_product: f64,
        assumptions: Vec<String>,
    },
}

impl EvalRecord {
    pub fn direct(spec: &CoefficientSpec, series: &PartialSumSeries) -> Self {
        EvalRecord::Direct {
            spec_digest: spec.digest(),
            a: series.a,
            q: series.q_max(),
            mode: series.mode,
            checkpoints: series
                .checkpoints
                .iter()
                .map(|(q, value)| CheckpointRow { q: *q, value: value.clone() })
                .collect(),
            value: series.final_value().clone(),
            tail_bound: series.tail_bound,
            no_certified_tolerance: series.tail_bound.is_none(),
            assumptions: assumptions_of(spec),
        }
    }

    pub fn factored(spec: &CoefficientSpec, r: &FactorizationResult) -> Self {
        EvalRecord::Factored {
            spec_digest: spec.digest(),
            a: r.a,
            q: r.q_max,
            mode: r.mode,
            f: r.f_set.primes().to_vec(),
            finite_factor: r.finite_factor.clone(),
            cofinite: r.cofinite_truncated.clone(),
            product: r.product.clone(),
            direct: r.direct_truncated.clone(),
            discrepancy: r.discrepancy,
            assumptions: assumptions_of(spec),
        }
    }

    pub fn local(spec: &CoefficientSpec, r: &FactorizationResult) -> Self {
        match Self::factored(spec, r) {
            EvalRecord::Factored {
                spec_digest,
                a,
                q,
                mode,
                f,
                finite_factor,
                cofinite,
                product,
                direct,
                discrepancy,
                assumptions,
            } => EvalRecord::Local {
                spec_digest,
                a,
                q,
                mode,
                f,
                finite_factor,
                cofinite,
                product,
                direct,
                discrepancy,
                assumptions,
            },
            _ => unreachable!(),
        }
    }

    pub fn euler(spec: &CoefficientSpec, r: &EulerProductEval) -> Self {
        EvalRecord::Euler {
            spec_digest: spec.digest(),
            a: r.a,
            p_max: r.p_max,
            value: r.value.clone(),
            zero_factor_at: r.zero_factor_at,
            dividing_part: r.dividing_part,
            coprime_part: r.coprime_part,
            trace: sample_trace(&r.trace),
            assumptions: assumptions_of(spec),
        }
    }

    pub fn coprime_split(
        spec: &CoefficientSpec,
        s_primes: Vec<u64>,
        r: &CoprimeSplitReport,
    ) -> Self {
        EvalRecord::CoprimeSplit {
            spec_digest: spec.digest(),
            a: r.a,
            q: r.q_max,
            p_max: r.p_max,
            mode: r.mode,
            s_primes,
            s_factor: r.s_factor_truncated.clone(),
            r_factor: r.r_factor_truncated.clone(),
            product: r.product.clone(),
            direct: r.direct_truncated.clone(),
            product_vs_direct: r.product_vs_direct,
            s_euler_product: r.s_euler_product,
            r_euler_product: r.r_euler_product,
            assumptions: assumptions_of(spec),
        }
    }

    pub fn a(&self) -> u64 {
        match self {
            EvalRecord::Direct { a, .. }
            | EvalRecord::Factored { a, .. }
            | EvalRecord::Local { a, .. }
            | EvalRecord::Euler { a, .. }
            | EvalRecord::CoprimeSplit { a, .. } => *a,
        }
    }

    /// Checkpoint rows for the CSV table (`(a, q, value)` triples).
    pub fn csv_rows(&self) -> Vec<(u64, u64, String)> {
        match self {
            EvalRecord::Direct { a, checkpoints, .. } => checkpoints
                .iter()
                .map(|c| (*a, c.q, c.value.to_string()))
                .collect(),
            EvalRecord::Euler { a, trace, .. } => trace
                .iter()
                .map(|t| (*a, t.p, t.partial_product.to_string()))
                .collect(),
            EvalRecord::Factored { a, q, direct, .. }
            | EvalRecord::Local { a, q, direct, .. } => {
                vec![(*a, *q, direct.to_string())]
            }
            EvalRecord::CoprimeSplit { a, q, direct, .. } => {
                vec![(*a, *q, direct.to_string())]
            }
        }
    }
}

fn assumptions_of(spec: &CoefficientSpec) -> Vec<String> {
    spec.convergence_assumption()
        .map(|s| vec![s.to_string()])
        .unwrap_or_default()
}

/// Keep every trace point at a prime crossing a power of two, plus the last.
fn sample_trace(trace: &[(u64, f64)]) -> Vec<TraceRow> {
    let mut out = Vec::new();
    let mut threshold = 2u64;
    for &(p, partial) in trace {
        if p >= threshold {
            out.push(TraceRow { p, partial_product: partial });
            while threshold <= p {
                threshold = threshold.saturating_mul(2);
            }
        }
    }
    if let Some(&(p, partial)) = trace.last() {
        if out.last().map(|t| t.p) != Some(p) {
            out.push(TraceRow { p, partial_product: partial });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// classification record
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceRecord {
    pub series: String,
    pub q: u64,
    pub value: f64,
    pub tail_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MembershipRecord {
    InCloudCertain,
    InCloudIffSeriesVanishes {
        series: String,
        assessment: String,
        value: Option<f64>,
        tail_bound: Option<f64>,
    },
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub spec_digest: String,
    pub case: String,
    pub f_of_g: Vec<u64>,
    pub f0_of_g: Vec<u64>,
    pub exhaustive: bool,
    pub scan_p_max: u64,
    pub scan_k_max: u32,
    pub membership: MembershipRecord,
    pub evidence: Vec<EvidenceRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditional_note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan_caveat: Option<String>,
    pub assumptions: Vec<String>,
}

impl ClassificationRecord {
    pub fn new(spec: &CoefficientSpec, c: &CloudClassification) -> Self {
        let membership = match &c.membership {
            Membership::InCloudCertain => MembershipRecord::InCloudCertain,
            Membership::Undetermined => MembershipRecord::Undetermined,
            Membership::InCloudIffSeriesVanishes { series, assessment } => {
                let (label, value, tail) = match assessment {
                    SeriesAssessment::NotInCloudCertified { value, tail_bound } => (
                        "not_in_cloud_certified",
                        Some(*value),
                        Some(*tail_bound),
                    ),
                    SeriesAssessment::ConsistentWithZeroUncertified => {
                        ("consistent_with_zero_uncertified", None, None)
                    }
                    SeriesAssessment::Uncertified => ("uncertified", None, None),
                };
                MembershipRecord::InCloudIffSeriesVanishes {
                    series: series.clone(),
                    assessment: label.to_string(),
                    value,
                    tail_bound: tail,
                }
            }
        };
        ClassificationRecord {
            spec_digest: spec.digest(),
            case: c.case.as_str().to_string(),
            f_of_g: c.fixed_points.f_of_g.primes().to_vec(),
            f0_of_g: c.fixed_points.f0_of_g.primes().to_vec(),
            exhaustive: c.fixed_points.exhaustive,
            scan_p_max: c.fixed_points.scan_bounds.0,
            scan_k_max: c.fixed_points.scan_bounds.1,
            membership,
            evidence: c
                .evidence
                .iter()
                .map(|EvidenceRow { series, q, value, tail_bound }| EvidenceRecord {
                    series: series.clone(),
                    q: *q,
                    value: *value,
                    tail_bound: *tail_bound,
                })
                .collect(),
            conditional_note: c.conditional_note.clone(),
            scan_caveat: c.scan_caveat.clone(),
            assumptions: c.assumptions.clone(),
        }
    }
}

// ---------------------------------------------------------------------------
// emission
// ---------------------------------------------------------------------------

/// Pretty JSON for a single record.
pub fn to_json_pretty<T: Serialize>(record: &T) -> Result<String> {
    serde_json::to_string_pretty(record)
        .map_err(|e| Error::InvalidArgument(format!("serialization failed: {e}")))
}

/// One JSON object per line, records sorted by the caller.
pub fn write_json_lines<W: Write, T: Serialize>(mut w: W, records: &[T]) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r)
            .map_err(|e| Error::InvalidArgument(format!("serialization failed: {e}")))?;
        writeln!(w, "{line}").map_err(io_err)?;
    }
    Ok(())
}

/// Checkpoint tables as CSV: `a,q,value` (values never contain commas).
pub fn write_checkpoint_csv<W: Write>(mut w: W, records: &[EvalRecord]) -> Result<()> {
    writeln!(w, "a,q,value").map_err(io_err)?;
    for record in records {
        for (a, q, value) in record.csv_rows() {
            writeln!(w, "{a},{q},{value}").map_err(io_err)?;
        }
    }
    Ok(())
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("write failed: {e}"))
}
