//! Declarative multiplicative coefficient functions `G`.
//!
//! A spec fixes `G` on prime powers only: a base family gives `G(p^K)` for
//! every prime without an override, and per-prime overrides replace whole
//! ladders. The value at a composite is the product over its factorization,
//! so `G(1) = 1` and multiplicativity hold by construction.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, FactorizationMap, PrimeSet};
use crate::error::Error;
use crate::rational::{parse_fraction, rat_pow_u64, to_fraction_string, Rational};
use crate::Result;

/// Rule for every prime that has no override.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseFamily {
    /// `G(q) = q^{-s}` for a positive integer exponent `s`.
    Power { s: u32 },
    /// `G(q) = 1 / phi(q)`.
    TotientReciprocal,
    /// `G(p^K) = 0` for `K >= 1`: the spec is supported on its overrides only
    /// (the JSON family `"custom"`).
    Zero,
}

/// What an explicit ladder does beyond its listed values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailRule {
    /// Fall back to the base family.
    Family,
    /// Vanish.
    Zero,
}

/// Per-prime override of the base family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimeRule {
    /// `G(p^K) = 1` for every `K >= 0`.
    AllOnes,
    /// `G(p^K) = values[K-1]` for `K = 1..=values.len()`, then the tail rule.
    Explicit { values: Vec<Rational>, tail: TailRule },
}

/// A multiplicative coefficient function, defined on prime powers.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSpec {
    base: BaseFamily,
    overrides: BTreeMap<u64, PrimeRule>,
    declared_smooth_bound: Option<u64>,
}

impl CoefficientSpec {
    /// `G(q) = q^{-s}`, `s >= 1`.
    pub fn power(s: u32) -> Self {
        assert!(s >= 1, "power exponent must be positive");
        Self {
            base: BaseFamily::Power { s },
            overrides: BTreeMap::new(),
            declared_smooth_bound: None,
        }
    }

    /// `G(q) = 1 / phi(q)`.
    pub fn totient_reciprocal() -> Self {
        Self {
            base: BaseFamily::TotientReciprocal,
            overrides: BTreeMap::new(),
            declared_smooth_bound: None,
        }
    }

    /// A spec supported only on its overrides.
    pub fn custom() -> Self {
        Self {
            base: BaseFamily::Zero,
            overrides: BTreeMap::new(),
            declared_smooth_bound: None,
        }
    }

    /// A spec given by explicit `(q, value)` pairs at prime powers, zero
    /// elsewhere, extended multiplicatively. `q = 1` entries must carry the
    /// value 1 and are otherwise ignored.
    pub fn zero_beyond<I>(support: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, Rational)>,
    {
        let mut ladders: BTreeMap<u64, Vec<(u32, Rational)>> = BTreeMap::new();
        for (q, value) in support {
            if q == 1 {
                if !value.is_one() {
                    return Err(Error::SpecSchema("support value at q=1 must be 1".into()));
                }
                continue;
            }
            let f = arith::factorize(q);
            let [(p, k)] = f.entries() else {
                return Err(Error::SpecSchema(format!(
                    "support point {q} is not a prime power"
                )));
            };
            ladders.entry(*p).or_default().push((*k, value));
        }
        let mut spec = Self::custom();
        for (p, mut points) in ladders {
            points.sort_by_key(|&(k, _)| k);
            let top = points.last().map(|&(k, _)| k).unwrap_or(0);
            let mut values = vec![Rational::zero(); top as usize];
            for (k, v) in points {
                values[(k - 1) as usize] = v;
            }
            spec.overrides
                .insert(p, PrimeRule::Explicit { values, tail: TailRule::Zero });
        }
        Ok(spec)
    }

    /// Attach or replace the rule for one prime.
    pub fn with_override(mut self, p: u64, rule: PrimeRule) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        self.overrides.insert(p, rule);
        Ok(self)
    }

    /// Declare `supp(G)` to lie in the `bound`-smooth numbers.
    pub fn with_smooth_bound(mut self, bound: u64) -> Self {
        self.declared_smooth_bound = Some(bound);
        self
    }

    pub fn base(&self) -> &BaseFamily {
        &self.base
    }

    pub fn overrides(&self) -> &BTreeMap<u64, PrimeRule> {
        &self.overrides
    }

    pub fn declared_smooth_bound(&self) -> Option<u64> {
        self.declared_smooth_bound
    }

    pub fn rule_for(&self, p: u64) -> Option<&PrimeRule> {
        self.overrides.get(&p)
    }

    fn base_value(&self, p: u64, k: u32) -> Rational {
        match self.base {
            BaseFamily::Power { s } => rat_pow_u64(p, s * k).recip(),
            BaseFamily::TotientReciprocal => {
                // phi(p^k) = p^(k-1) (p - 1)
                (rat_pow_u64(p, k - 1) * rat_pow_u64(p - 1, 1)).recip()
            }
            BaseFamily::Zero => Rational::zero(),
        }
    }

    /// `G(p^K)`, exact. `K = 0` gives 1 for every spec.
    pub fn at_prime_power(&self, p: u64, k: u32) -> Rational {
        debug_assert!(arith::is_prime(p));
        if k == 0 {
            return Rational::one();
        }
        match self.overrides.get(&p) {
            Some(PrimeRule::AllOnes) => Rational::one(),
            Some(PrimeRule::Explicit { values, tail }) => {
                if let Some(v) = values.get((k - 1) as usize) {
                    v.clone()
                } else {
                    match tail {
                        TailRule::Family => self.base_value(p, k),
                        TailRule::Zero => Rational::zero(),
                    }
                }
            }
            None => self.base_value(p, k),
        }
    }

    /// `G(p^K)` as a double, avoiding big-rational traffic in dense scans.
    pub fn at_prime_power_f64(&self, p: u64, k: u32) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let base = |spec: &Self| match spec.base {
            BaseFamily::Power { s } => (p as f64).powi(-((s * k) as i32)),
            BaseFamily::TotientReciprocal => {
                1.0 / ((p as f64).powi(k as i32 - 1) * (p - 1) as f64)
            }
            BaseFamily::Zero => 0.0,
        };
        match self.overrides.get(&p) {
            Some(PrimeRule::AllOnes) => 1.0,
            Some(PrimeRule::Explicit { values, tail }) => match values.get((k - 1) as usize) {
                Some(v) => crate::rational::to_f64(v),
                None => match tail {
                    TailRule::Family => base(self),
                    TailRule::Zero => 0.0,
                },
            },
            None => base(self),
        }
    }

    /// `G` at the number with the given factorization.
    pub fn value_of_factors(&self, factors: &FactorizationMap) -> Rational {
        let mut acc = Rational::one();
        for (p, e) in factors.iter() {
            let g = self.at_prime_power(p, e);
            if g.is_zero() {
                return Rational::zero();
            }
            acc *= g;
        }
        acc
    }

    /// `G(q)`, exact, by factorizing `q`.
    pub fn value(&self, q: u64) -> Rational {
        self.value_of_factors(&arith::factorize(q))
    }

    /// True iff all primes without an override carry the zero ladder, so the
    /// support of `G` is enumerable from the overrides alone.
    pub fn has_sparse_support(&self) -> bool {
        self.base == BaseFamily::Zero
    }

    /// Sorted support of `G` up to `q_max` (with factorizations and values),
    /// or `None` when the spec is not sparse.
    pub fn support_up_to(&self, q_max: u64) -> Option<Vec<SupportPoint>> {
        if !self.has_sparse_support() {
            return None;
        }
        // nonzero ladder positions per override prime, within q_max
        let mut ladders: Vec<(u64, Vec<(u32, Rational)>)> = Vec::new();
        for &p in self.overrides.keys() {
            let mut ladder = Vec::new();
            let mut pk = p;
            let mut k = 1u32;
            while pk <= q_max {
                let v = self.at_prime_power(p, k);
                if !v.is_zero() {
                    ladder.push((k, v));
                }
                match pk.checked_mul(p) {
                    Some(next) => pk = next,
                    None => break,
                }
                k += 1;
            }
            if !ladder.is_empty() {
                ladders.push((p, ladder));
            }
        }
        let mut out = vec![SupportPoint {
            q: 1,
            factors: Vec::new(),
            value: Rational::one(),
        }];
        // depth-first product of the ladders
        fn extend(
            ladders: &[(u64, Vec<(u32, Rational)>)],
            idx: usize,
            q: u64,
            factors: &mut Vec<(u64, u32)>,
            value: &Rational,
            q_max: u64,
            out: &mut Vec<SupportPoint>,
        ) {
            if idx == ladders.len() {
                return;
            }
            extend(ladders, idx + 1, q, factors, value, q_max, out);
            let (p, ladder) = &ladders[idx];
            for (k, v) in ladder {
                let Some(pk) = p.checked_pow(*k) else { break };
                let Some(nq) = q.checked_mul(pk) else { break };
                if nq > q_max {
                    break;
                }
                factors.push((*p, *k));
                let nv = value * v;
                out.push(SupportPoint {
                    q: nq,
                    factors: factors.clone(),
                    value: nv.clone(),
                });
                extend(ladders, idx + 1, nq, factors, &nv, q_max, out);
                factors.pop();
            }
        }
        let mut factors = Vec::new();
        extend(
            &ladders,
            0,
            1,
            &mut factors,
            &Rational::one(),
            q_max,
            &mut out,
        );
        out.sort_by_key(|s| s.q);
        for p in &mut out {
            p.factors.sort_by_key(|&(p, _)| p);
        }
        Some(out)
    }

    /// Convergence of the defining series cannot be decided mechanically for
    /// non-finitely-supported specs; reports carry this assumption.
    pub fn convergence_assumption(&self) -> Option<&'static str> {
        let finite = self.has_sparse_support()
            && self.overrides.values().all(|r| {
                matches!(r, PrimeRule::Explicit { tail: TailRule::Zero, .. })
                    || matches!(r, PrimeRule::Explicit { tail: TailRule::Family, .. })
            });
        if finite {
            None
        } else {
            Some("pointwise convergence of the full and co-finite series is assumed, not verified")
        }
    }

    /// Fixed-point prime sets `F(G) = {p : G(p) = 1}` and
    /// `F0(G) = {p : G(p^K) = 1 for all K}`.
    ///
    /// Family members are added analytically where the family form proves
    /// `G(p) != 1` beyond the scan (power, totient reciprocal); otherwise the
    /// scan is bounded by `p_max` and the report is flagged non-exhaustive.
    /// Explicit ladders are scanned to `max(k_max, ladder length + 1)` so a
    /// ladder's own tail always participates in the `F0` decision.
    pub fn fixed_points(&self, p_max: u64, k_max: u32) -> FixedPointReport {
        assert!(p_max >= 2 && k_max >= 1);
        let mut f: Vec<u64> = Vec::new();
        let one = Rational::one();

        // overrides are explicit data: account for all of them, any size
        for (&p, rule) in &self.overrides {
            let member = match rule {
                PrimeRule::AllOnes => true,
                PrimeRule::Explicit { .. } => self.at_prime_power(p, 1) == one,
            };
            if member {
                f.push(p);
            }
        }

        // base-family members and whether the family covers p > p_max
        let base_exhaustive = match self.base {
            BaseFamily::Power { .. } => true, // p^{-s} < 1 for every prime
            BaseFamily::TotientReciprocal => {
                // G(p) = 1/(p-1): equals 1 exactly at p = 2
                if !self.overrides.contains_key(&2) {
                    f.push(2);
                }
                true
            }
            BaseFamily::Zero => {
                // scan only; nothing beyond p_max is certified
                let mut p = 2u64;
                while p <= p_max {
                    if arith::is_prime(p) && !self.overrides.contains_key(&p)
                        && self.base_value(p, 1) == one
                    {
                        f.push(p);
                    }
                    p += 1;
                }
                false
            }
        };

        f.sort_unstable();
        f.dedup();

        let mut f0: Vec<u64> = Vec::new();
        let mut scan_based_f0 = false;
        for &p in &f {
            match self.overrides.get(&p) {
                Some(PrimeRule::AllOnes) => f0.push(p),
                rule => {
                    let depth = match rule {
                        Some(PrimeRule::Explicit { values, .. }) => {
                            k_max.max(values.len() as u32 + 1)
                        }
                        _ => k_max,
                    };
                    if (1..=depth).all(|k| self.at_prime_power(p, k) == one) {
                        f0.push(p);
                        scan_based_f0 = true;
                    }
                }
            }
        }

        FixedPointReport {
            f_of_g: PrimeSet::new(f).expect("members are prime"),
            f0_of_g: PrimeSet::new(f0).expect("members are prime"),
            exhaustive: base_exhaustive && !scan_based_f0,
            scan_bounds: (p_max, k_max),
        }
    }

    /// Canonical JSON form (the CLI spec schema).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SpecJson::from(self)).expect("spec serializes")
    }

    /// Stable hex digest of the canonical JSON form.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let canon = serde_json::to_string(&SpecJson::from(self)).expect("spec serializes");
        let hash = Sha256::digest(canon.as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Parse and validate a spec from its JSON schema.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: SpecJson = serde_json::from_str(s)
            .map_err(|e| Error::SpecSchema(format!("{e} (line {}, col {})", e.line(), e.column())))?;
        raw.try_into()
    }
}

/// One element of a sparse support: the number, its factorization, its value.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportPoint {
    pub q: u64,
    pub factors: Vec<(u64, u32)>,
    pub value: Rational,
}

/// Result of fixed-point detection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointReport {
    pub f_of_g: PrimeSet,
    pub f0_of_g: PrimeSet,
    /// True when membership beyond the scan bounds is settled analytically.
    pub exhaustive: bool,
    pub scan_bounds: (u64, u32),
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SpecJson {
    family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    overrides: Vec<OverrideJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    declared_smooth_bound: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct OverrideJson {
    p: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tail: Option<String>,
}

impl From<&CoefficientSpec> for SpecJson {
    fn from(spec: &CoefficientSpec) -> Self {
        let (family, s) = match spec.base {
            BaseFamily::Power { s } => ("power".to_string(), Some(s)),
            BaseFamily::TotientReciprocal => ("totient_reciprocal".to_string(), None),
            BaseFamily::Zero => ("custom".to_string(), None),
        };
        let overrides = spec
            .overrides
            .iter()
            .map(|(&p, rule)| match rule {
                PrimeRule::AllOnes => OverrideJson {
                    p,
                    mode: Some("all_ones".into()),
                    values: None,
                    tail: None,
                },
                PrimeRule::Explicit { values, tail } => OverrideJson {
                    p,
                    mode: None,
                    values: Some(values.iter().map(to_fraction_string).collect()),
                    tail: Some(
                        match tail {
                            TailRule::Family => "family",
                            TailRule::Zero => "zero",
                        }
                        .into(),
                    ),
                },
            })
            .collect();
        SpecJson {
            family,
            s,
            overrides,
            declared_smooth_bound: spec.declared_smooth_bound,
        }
    }
}

impl TryFrom<SpecJson> for CoefficientSpec {
    type Error = Error;

    fn try_from(raw: SpecJson) -> Result<Self> {
        let base = match raw.family.as_str() {
            "power" => {
                let s = raw.s.ok_or_else(|| {
                    Error::SpecSchema("family \"power\" requires field \"s\"".into())
                })?;
                if s == 0 {
                    return Err(Error::SpecSchema("field \"s\" must be >= 1".into()));
                }
                BaseFamily::Power { s }
            }
            "totient_reciprocal" => BaseFamily::TotientReciprocal,
            "custom" => BaseFamily::Zero,
            other => {
                return Err(Error::SpecSchema(format!(
                    "unknown family {other:?} (expected power | totient_reciprocal | custom)"
                )))
            }
        };
        let mut overrides = BTreeMap::new();
        for o in raw.overrides {
            if !arith::is_prime(o.p) {
                return Err(Error::SpecSchema(format!("override key {} is not prime", o.p)));
            }
            let rule = match (o.mode.as_deref(), o.values, o.tail.as_deref()) {
                (Some("all_ones"), None, None) => PrimeRule::AllOnes,
                (None, Some(values), tail) => {
                    let values = values
                        .iter()
                        .map(|v| parse_fraction(v))
                        .collect::<Result<Vec<_>>>()?;
                    let tail = match tail {
                        Some("family") | None => TailRule::Family,
                        Some("zero") => TailRule::Zero,
                        Some(other) => {
                            return Err(Error::SpecSchema(format!(
                                "unknown tail {other:?} (expected family | zero)"
                            )))
                        }
                    };
                    PrimeRule::Explicit { values, tail }
                }
                (Some(other), _, _) if other != "all_ones" => {
                    return Err(Error::SpecSchema(format!(
                        "unknown override mode {other:?} at p={}",
                        o.p
                    )))
                }
                _ => {
                    return Err(Error::SpecSchema(format!(
                        "override at p={} must set either \"mode\" or \"values\"",
                        o.p
                    )))
                }
            };
            if overrides.insert(o.p, rule).is_some() {
                return Err(Error::SpecSchema(format!("duplicate override at p={}", o.p)));
            }
        }
        Ok(CoefficientSpec {
            base,
            overrides,
            declared_smooth_bound: raw.declared_smooth_bound,
        })
    }
}
