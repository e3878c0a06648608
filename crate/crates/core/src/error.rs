use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Requested sieve limit is outside the supported range.
    #[error("sieve limit {limit} out of range (allowed {min}..={max})")]
    SieveLimit { limit: u64, min: u64, max: u64 },

    /// An evaluation needs table entries beyond the sieve limit.
    #[error("requested bound {needed} exceeds sieve capacity {available}")]
    Capacity { needed: u64, available: u64 },

    /// An argument required to be prime is not.
    #[error("{0} is not prime")]
    NotPrime(u64),

    /// The floating-point definition oracle cannot certify its result.
    #[error("definition oracle residual {residual:.3e} >= tolerance {tol:.3e} for q={q}, a={a}")]
    OraclePrecision { q: u64, a: u64, residual: f64, tol: f64 },

    /// The definition oracle is restricted to small moduli.
    #[error("definition oracle restricted to q <= {max}, got q={q}")]
    OracleRange { q: u64, max: u64 },

    /// Oracle tolerance must be a positive value below one half.
    #[error("oracle tolerance must satisfy 0 < tol < 1/2, got {0}")]
    OracleTolerance(f64),

    /// Factored evaluation over an empty prime set; use the direct sum instead.
    #[error("factored evaluation requires a non-empty prime set; use the direct partial sum")]
    EmptyPrimeSet,

    /// Float mode requested where the spec supports an exact evaluation.
    #[error("float mode refused: spec declares smooth support and Q={q} <= exact threshold {threshold}")]
    FloatRefused { q: u64, threshold: u64 },

    /// Smooth exact evaluation needs a declared smooth bound.
    #[error("coefficient spec declares no smooth support bound")]
    MissingSmoothBound,

    /// The spec is not actually supported on smooth numbers as declared.
    #[error("spec not smoothly supported: {0}")]
    NotSmoothlySupported(String),

    /// Operation requires the spec to fall in the empty-fixed-point case.
    #[error("operation requires an empty fixed-point set F(G); spec classified {case}")]
    NotCaseC1 { case: &'static str },

    /// Malformed coefficient-spec JSON or failed schema validation.
    #[error("spec schema error: {0}")]
    SpecSchema(String),

    /// Invalid numeric argument (bounds, ranges).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
