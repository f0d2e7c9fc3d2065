//! Valuation oracles: black-box probability assignments `v(n)` on rays.
//!
//! An oracle only answers ray queries. Values on larger subspaces come from
//! additivity over an orthonormal spanning set ([`subspace_measure`]), and
//! off-diagonal matrix elements come from polarization ([`sesquilinear`]).

mod exact;
mod noisy;
mod tabulated;

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;

use crate::error::{GleasonError, Result};
use crate::hilbert::{c, CVector, FieldMode, Subspace, UnitVector};

pub use exact::ExactOracle;
pub use noisy::{NoisyOracle, DEFAULT_SHOTS};
pub use tabulated::{TabulatedOracle, TableRecord, RAY_MATCH_TOL};

/// A probability valuation restricted to rays of a `dim`-dimensional space.
///
/// Implementations count every call to [`value`](Self::value); the counter is
/// atomic so oracles can be shared across threads.
pub trait ValuationOracle: Send + Sync {
    fn dim(&self) -> usize;

    fn field(&self) -> FieldMode;

    /// `v(n)` in `[0, 1]`.
    fn value(&self, n: &UnitVector) -> Result<f64>;

    /// Total number of [`value`](Self::value) calls so far.
    fn query_count(&self) -> u64;
}

/// Monotone, thread-safe query counter.
#[derive(Debug, Default)]
pub struct QueryCounter(AtomicU64);

impl QueryCounter {
    /// Records one query and returns its zero-based index.
    pub fn tick(&self) -> u64 {
        self.0.fetch_add(1, Ordering::Relaxed)
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

pub(crate) fn check_query(dim: usize, field: FieldMode, n: &UnitVector) -> Result<()> {
    if n.dim() != dim {
        return Err(GleasonError::DimensionMismatch { expected: dim, found: n.dim() });
    }
    if field == FieldMode::Real && !n.is_real() {
        return Err(GleasonError::FieldMismatch { expected: FieldMode::Complex, found: FieldMode::Real });
    }
    Ok(())
}

/// Quadratic extension `f(x) = |x|^2 v(x / |x|)`, with `f(0) = 0`.
pub fn extend(oracle: &dyn ValuationOracle, x: &CVector) -> Result<f64> {
    if x.len() != oracle.dim() {
        return Err(GleasonError::DimensionMismatch { expected: oracle.dim(), found: x.len() });
    }
    let norm = x.norm();
    if norm < 1e-14 {
        return Ok(0.0);
    }
    Ok(norm * norm * oracle.value(&UnitVector::normalize(x)?)?)
}

/// `<x|rho|y>` by polarization of the extended valuation:
///
/// `[f(x+y) - f(x-y)]/4 - i [f(x+iy) - f(x-iy)]/4`.
///
/// Real-mode oracles use only the first bracket, which is the symmetric form
/// `<x|rho|y>` for real `x`, `y`.
pub fn sesquilinear(oracle: &dyn ValuationOracle, x: &CVector, y: &CVector) -> Result<Complex64> {
    if y.len() != x.len() {
        return Err(GleasonError::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    let real_part = (extend(oracle, &(x + y))? - extend(oracle, &(x - y))?) / 4.0;
    if oracle.field() == FieldMode::Real {
        return Ok(c(real_part, 0.0));
    }
    let iy = y.map(|z| z * Complex64::i());
    let imag_part = -(extend(oracle, &(x + &iy))? - extend(oracle, &(x - &iy))?) / 4.0;
    Ok(c(real_part, imag_part))
}

/// `v(A) = sum_i v(s_i)` over the orthonormal spanning set of `A`.
pub fn subspace_measure(oracle: &dyn ValuationOracle, a: &Subspace) -> Result<f64> {
    if a.ambient_dim() != oracle.dim() {
        return Err(GleasonError::DimensionMismatch { expected: oracle.dim(), found: a.ambient_dim() });
    }
    a.spanning_set().iter().map(|s| oracle.value(s)).sum()
}
