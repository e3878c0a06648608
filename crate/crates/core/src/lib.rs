//! Exact computation with Ramanujan expansions `sum_q G(q) c_q(a)` for
//! multiplicative coefficient functions `G`.
//!
//! The crate provides:
//!
//! - [`arith`]: integer number-theory primitives (linear sieve, factorization,
//!   Moebius/totient, p-adic valuations, prime sets, smoothness),
//! - [`ramanujan`]: Ramanujan sums `c_q(a)` by three independent routes,
//! - [`coeff`]: declarative multiplicative coefficient functions `G` given by
//!   prime-power rules, with fixed-point prime-set detection,
//! - [`euler`]: exact Euler p-factors of an expansion and the zero-factor test,
//! - [`expansion`]: truncated series, finite/co-finite factorizations, infinite
//!   Euler products, coprime splits, and convergence reports,
//! - [`classify`]: the trichotomy of coefficient functions against the cloud of
//!   the null function, with numeric membership evidence,
//! - [`report`]: JSON/CSV emission of evaluation records.
//!
//! All series are summed in natural increasing order of the modulus; exact mode
//! uses arbitrary-precision rationals, float mode compensated summation.

#![allow(clippy::manual_is_multiple_of)]

pub mod arith;
pub mod classify;
pub mod coeff;
pub mod error;
pub mod euler;
pub mod expansion;
pub mod numeric;
pub mod ramanujan;
pub mod rational;
pub mod report;

pub use arith::{FactorizationMap, PrimeSet, SieveTables};
pub use coeff::{CoefficientSpec, FixedPointReport};
pub use error::Error;
pub use numeric::{ArithMode, Scalar};
pub use rational::Rational;

/// Shorthand for results with the crate error type.
pub type Result<T> = std::result::Result<T, Error>;
