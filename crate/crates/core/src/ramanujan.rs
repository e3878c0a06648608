//! Ramanujan sums `c_q(a)` by three independent routes: the Hoelder closed
//! form, the prime-power three-case formula, and a floating-point oracle that
//! sums the defining exponential sum directly. A batch evaluator produces
//! whole rows `c_1(a)..c_Q(a)` from sieve tables.

use num_integer::Integer;

use crate::arith::{self, FactorizationMap, SieveTables};
use crate::error::Error;
use crate::Result;

/// Largest modulus accepted by [`c_definition_oracle`]; float error grows
/// with the phi(q) summed terms, and the oracle is only a desk-scale referee.
pub const ORACLE_MAX_Q: u64 = 10_000;

/// Default oracle tolerance on imaginary and rounding residuals.
pub const ORACLE_DEFAULT_TOL: f64 = 1e-6;

/// One row of Ramanujan sums for fixed `a`: `values[q] = c_q(a)`, `1 <= q <= Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamanujanSumRow {
    a: u64,
    values: Vec<i64>,
}

impl RamanujanSumRow {
    pub fn a(&self) -> u64 {
        self.a
    }

    /// Largest modulus in the row.
    pub fn q_max(&self) -> u64 {
        self.values.len() as u64
    }

    /// `c_q(a)` for `1 <= q <= q_max`.
    pub fn value(&self, q: u64) -> i64 {
        self.values[(q - 1) as usize]
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }
}

/// `c_q(a)` by the Hoelder closed form `phi(q) mu(q/(q,a)) / phi(q/(q,a))`.
pub fn c_holder(q: u64, a: u64) -> i64 {
    assert!(q >= 1 && a >= 1);
    let d = q.gcd(&a);
    let e = q / d;
    let (mu_e, phi_e) = arith::mobius_phi(e);
    if mu_e == 0 {
        return 0;
    }
    let (_, phi_q) = arith::mobius_phi(q);
    debug_assert_eq!(phi_q % phi_e, 0);
    (phi_q / phi_e) as i64 * mu_e
}

/// `c_{p^K}(a)` by the three-case formula: `phi(p^K)` for `K <= v_p(a)`,
/// `-p^{v_p(a)}` at `K = v_p(a) + 1`, and 0 beyond.
pub fn c_prime_power(p: u64, k: u32, a: u64) -> Result<i64> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k == 0 {
        return Ok(1);
    }
    let v = arith::p_adic_valuation(p, a)?;
    Ok(if k <= v {
        (p.pow(k) - p.pow(k - 1)) as i64
    } else if k == v + 1 {
        -(p.pow(v) as i64)
    } else {
        0
    })
}

/// Evaluate the defining sum `sum_{j<=q, (j,q)=1} e^{2 pi i j a / q}` in
/// double precision and round to the nearest integer.
///
/// Both the imaginary residual and the distance to the nearest integer must
/// stay below `tol`, otherwise the oracle refuses to certify (the signal that
/// `q` is too large for float accuracy).
pub fn c_definition_oracle(q: u64, a: u64, tol: f64) -> Result<i64> {
    assert!(q >= 1 && a >= 1);
    if !(tol > 0.0 && tol < 0.5) {
        return Err(Error::OracleTolerance(tol));
    }
    if q > ORACLE_MAX_Q {
        return Err(Error::OracleRange { q, max: ORACLE_MAX_Q });
    }
    let mut re = 0.0f64;
    let mut im = 0.0f64;
    let step = std::f64::consts::TAU / q as f64;
    let a_mod = a % q;
    for j in 1..=q {
        if j.gcd(&q) == 1 {
            // reduce j*a mod q first so the angle stays small and accurate
            let r = (j % q) * a_mod % q;
            let (s, c) = (step * r as f64).sin_cos();
            re += c;
            im += s;
        }
    }
    let nearest = re.round();
    let residual = im.abs().max((re - nearest).abs());
    if residual >= tol {
        return Err(Error::OraclePrecision { q, a, residual, tol });
    }
    Ok(nearest as i64)
}

/// Hoelder evaluation of gcd and c against precomputed tables, reusing the
/// factorization of a fixed `a` instead of a per-q gcd.
pub(crate) struct RamanujanKernel<'t> {
    tables: &'t SieveTables,
    a_factors: FactorizationMap,
}

impl<'t> RamanujanKernel<'t> {
    pub fn new(a: u64, tables: &'t SieveTables) -> Self {
        Self {
            tables,
            a_factors: arith::factorize(a),
        }
    }

    /// `gcd(q, a)` as the product of `p^min(v_p(q), v_p(a))` over `p | a`.
    #[inline]
    fn gcd_with_a(&self, q: u64) -> u64 {
        let mut d = 1u64;
        for (p, va) in self.a_factors.iter() {
            let mut x = q;
            let mut vq = 0u32;
            while vq < va && x % p == 0 {
                x /= p;
                vq += 1;
            }
            d *= p.pow(vq);
        }
        d
    }

    /// `c_q(a)` with table lookups; requires `q <= tables.limit()`.
    #[inline]
    pub fn c(&self, q: u64) -> i64 {
        let e = q / self.gcd_with_a(q);
        let mu_e = self.tables.mu(e);
        if mu_e == 0 {
            return 0;
        }
        (self.tables.phi(q) / self.tables.phi(e)) as i64 * mu_e
    }
}

/// Row of `c_q(a)` for `q <= q_max`, computed in O(q_max log q_max).
pub fn c_batch(a: u64, q_max: u64, tables: &SieveTables) -> Result<RamanujanSumRow> {
    assert!(a >= 1 && q_max >= 1);
    tables.check_capacity(q_max)?;
    let kernel = RamanujanKernel::new(a, tables);
    let values = (1..=q_max).map(|q| kernel.c(q)).collect();
    Ok(RamanujanSumRow { a, values })
}
