//! Integer number-theory primitives: factorization, Moebius and totient,
//! p-adic valuation, smoothness, prime-divisor sets, and batch sieves.
//!
//! Everything here is exact and pure. [`SieveTables`] is immutable after
//! construction and safe for concurrent reads.

use crate::error::Error;
use crate::Result;

/// Largest sieve limit accepted by [`build_sieve`].
///
/// Tables cost 9 bytes per entry (spf and phi as `u32`, mu as `i8`) plus the
/// prime list, so the default cap of 2^31 - 1 corresponds to ~19 GiB; actual
/// use stays at desk scale (10^6..10^7, well inside the required 10^7).
pub const MAX_SIEVE_LIMIT: u64 = (1 << 31) - 1;

/// Prime factorization as an ordered list of `(prime, exponent)` pairs.
///
/// Primes are strictly increasing, exponents >= 1, and the product of
/// `p^e` reconstructs the input; the empty list encodes 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationMap {
    entries: Vec<(u64, u32)>,
}

impl FactorizationMap {
    pub fn entries(&self) -> &[(u64, u32)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.entries.iter().copied()
    }

    /// Exponent of `p` in the factored number (0 when `p` does not divide it).
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.entries
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// Reconstruct the factored number.
    pub fn value(&self) -> u64 {
        self.entries
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * p.pow(e))
    }

    pub fn is_one(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Finite sorted set of primes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrimeSet {
    primes: Vec<u64>,
}

impl PrimeSet {
    /// Empty set.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build from arbitrary values, rejecting non-primes. Duplicates collapse.
    pub fn new<I: IntoIterator<Item = u64>>(values: I) -> Result<Self> {
        let mut primes: Vec<u64> = Vec::new();
        for v in values {
            if !is_prime(v) {
                return Err(Error::NotPrime(v));
            }
            primes.push(v);
        }
        primes.sort_unstable();
        primes.dedup();
        Ok(Self { primes })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }

    /// True iff no member of the set divides `r`; vacuously true when empty.
    pub fn coprime_to(&self, r: u64) -> bool {
        self.primes.iter().all(|&p| r % p != 0)
    }
}

impl std::fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.primes.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// Smallest-prime-factor, Moebius, and totient tables for `2..=limit`.
#[derive(Debug, Clone)]
pub struct SieveTables {
    limit: u64,
    spf: Vec<u32>,
    mu: Vec<i8>,
    phi: Vec<u32>,
    primes: Vec<u32>,
}

/// Linear (smallest-prime-factor) sieve; O(limit) time and one pass for
/// spf, mu, and phi together.
pub fn build_sieve(limit: u64) -> Result<SieveTables> {
    if !(2..=MAX_SIEVE_LIMIT).contains(&limit) {
        return Err(Error::SieveLimit {
            limit,
            min: 2,
            max: MAX_SIEVE_LIMIT,
        });
    }
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    let mut mu = vec![0i8; n + 1];
    let mut phi = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    mu[1] = 1;
    phi[1] = 1;
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            mu[i] = -1;
            phi[i] = (i - 1) as u32;
            primes.push(i as u32);
        }
        for &p in &primes {
            let p = p as usize;
            if p > spf[i] as usize || i * p > n {
                break;
            }
            let ip = i * p;
            spf[ip] = p as u32;
            if i % p == 0 {
                mu[ip] = 0;
                phi[ip] = phi[i] * p as u32;
            } else {
                mu[ip] = -mu[i];
                phi[ip] = phi[i] * (p - 1) as u32;
            }
        }
    }
    Ok(SieveTables {
        limit,
        spf,
        mu,
        phi,
        primes,
    })
}

impl SieveTables {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Ensure `needed <= limit`, with a capacity error otherwise.
    pub fn check_capacity(&self, needed: u64) -> Result<()> {
        if needed > self.limit {
            Err(Error::Capacity {
                needed,
                available: self.limit,
            })
        } else {
            Ok(())
        }
    }

    /// Smallest prime factor of `n`, for `2 <= n <= limit`.
    pub fn spf(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    /// Moebius function lookup, `1 <= n <= limit`.
    pub fn mu(&self, n: u64) -> i64 {
        self.mu[n as usize] as i64
    }

    /// Euler totient lookup, `1 <= n <= limit`.
    pub fn phi(&self, n: u64) -> u64 {
        self.phi[n as usize] as u64
    }

    /// Primes `<= limit` in increasing order.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().map(|&p| p as u64)
    }

    /// Factorize via spf walks when in range, trial division otherwise.
    pub fn factorize(&self, n: u64) -> FactorizationMap {
        if n <= self.limit {
            let mut entries = Vec::new();
            let mut x = n as usize;
            while x > 1 {
                let p = self.spf[x];
                let mut e = 0u32;
                while self.spf[x] == p {
                    x /= p as usize;
                    e += 1;
                    if x == 1 {
                        break;
                    }
                }
                entries.push((p as u64, e));
            }
            FactorizationMap { entries }
        } else {
            factorize(n)
        }
    }
}

/// Deterministic primality for desk-scale `n` (trial division by 6k+-1).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Prime factorization by trial division; `n = 1` gives the empty product.
pub fn factorize(n: u64) -> FactorizationMap {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut entries = Vec::new();
    let mut x = n;
    let mut push = |p: u64, x: &mut u64| {
        let mut e = 0u32;
        while *x % p == 0 {
            *x /= p;
            e += 1;
        }
        if e > 0 {
            entries.push((p, e));
        }
    };
    push(2, &mut x);
    push(3, &mut x);
    let mut d = 5u64;
    while d * d <= x {
        push(d, &mut x);
        push(d + 2, &mut x);
        d += 6;
    }
    if x > 1 {
        entries.push((x, 1));
    }
    FactorizationMap { entries }
}

/// Largest `K` with `p^K | a`. Errors when `p` is not prime.
pub fn p_adic_valuation(p: u64, a: u64) -> Result<u32> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    assert!(a >= 1, "valuation requires a >= 1");
    let mut v = 0u32;
    let mut x = a;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Ok(v)
}

/// Point computation of `(mu(n), phi(n))` from the factorization of `n`.
pub fn mobius_phi(n: u64) -> (i64, u64) {
    let f = factorize(n);
    let mut mu = 1i64;
    let mut phi = 1u64;
    for (p, e) in f.iter() {
        if e > 1 {
            mu = 0;
        } else {
            mu = -mu;
        }
        phi *= p.pow(e - 1) * (p - 1);
    }
    (mu, phi)
}

/// The set of prime divisors of `n`; empty for `n = 1`.
pub fn prime_divisors(n: u64) -> PrimeSet {
    PrimeSet {
        primes: factorize(n).iter().map(|(p, _)| p).collect(),
    }
}

/// True iff no prime of `set` divides `r`.
pub fn is_coprime_to_set(r: u64, set: &PrimeSet) -> bool {
    set.coprime_to(r)
}

/// True iff every prime divisor of `n` is `<= q_bound`; true for `n = 1`.
pub fn is_smooth(n: u64, q_bound: u64) -> bool {
    assert!(n >= 1 && q_bound >= 2);
    let mut x = n;
    let strip = |p: u64, x: &mut u64| {
        while *x % p == 0 {
            *x /= p;
        }
    };
    for p in 2..=3u64 {
        if p > q_bound {
            break;
        }
        strip(p, &mut x);
    }
    let mut d = 5u64;
    while d <= q_bound && d * d <= x {
        strip(d, &mut x);
        if d + 2 <= q_bound {
            strip(d + 2, &mut x);
        }
        d += 6;
    }
    // whatever survives is either 1 or has all prime factors > sqrt(x);
    // x itself prime-like must still be <= q_bound
    x == 1 || x <= q_bound && is_prime(x)
}
