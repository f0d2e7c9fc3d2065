//! Polarization reconstruction from the valuation on a fixed set of rays.
//!
//! For an orthonormal basis `{n_j}` the matrix elements are
//!
//! ```text
//! <n_j|rho|n_j> = v(n_j)
//! <n_j|rho|n_k> = 1/2 [v((n_j + n_k)/√2) - v((n_j - n_k)/√2)]
//!               - i/2 [v((n_j + i n_k)/√2) - v((n_j - i n_k)/√2)]
//! ```
//!
//! so `rho` is fixed by `d + 4 d(d-1)/2 = 2d² - d` ray values. Over a real
//! Hilbert space the imaginary bracket is absent and `d²` values suffice.

use super::ReconstructionReport;
use crate::error::{GleasonError, Result};
use crate::hilbert::{c, hermitian_part, CMatrix, FieldMode, OrthonormalBasis};
use crate::valuation::{sesquilinear, ValuationOracle};

pub const EXPLICIT: &str = "explicit";
pub const EXPLICIT_REAL: &str = "explicit-real";

/// Number of ray queries used by [`explicit_reconstruct`].
pub fn complex_query_budget(dim: usize) -> u64 {
    (2 * dim * dim - dim) as u64
}

/// Number of ray queries used by [`explicit_reconstruct_real`].
pub fn real_query_budget(dim: usize) -> u64 {
    (dim * dim) as u64
}

fn check_inputs(oracle: &dyn ValuationOracle, basis: &OrthonormalBasis, field: FieldMode) -> Result<()> {
    if basis.dim() != oracle.dim() {
        return Err(GleasonError::DimensionMismatch { expected: oracle.dim(), found: basis.dim() });
    }
    if oracle.field() != field {
        return Err(GleasonError::FieldMismatch { expected: field, found: oracle.field() });
    }
    if field == FieldMode::Real && !basis.is_real() {
        return Err(GleasonError::FieldMismatch { expected: FieldMode::Real, found: FieldMode::Complex });
    }
    Ok(())
}

/// Matrix of `<n_j|rho|n_k>` in the given basis; only `j <= k` is queried.
fn basis_matrix(oracle: &dyn ValuationOracle, basis: &OrthonormalBasis) -> Result<CMatrix> {
    let n = basis.vectors();
    let d = n.len();
    let mut m = CMatrix::zeros(d, d);
    for j in 0..d {
        m[(j, j)] = c(oracle.value(&n[j])?, 0.0);
        for k in j + 1..d {
            let z = sesquilinear(oracle, n[j].as_vector(), n[k].as_vector())?;
            m[(j, k)] = z;
            m[(k, j)] = z.conj();
        }
    }
    Ok(m)
}

fn reconstruct_in_basis(
    method: &str,
    oracle: &dyn ValuationOracle,
    basis: &OrthonormalBasis,
) -> Result<ReconstructionReport> {
    if oracle.dim() == 1 {
        return Ok(ReconstructionReport::trivial(method));
    }
    let before = oracle.query_count();
    let m = basis_matrix(oracle, basis)?;
    let u = basis.unitary();
    let estimate = hermitian_part(&(&u * m * u.adjoint()));
    ReconstructionReport::from_estimate(method, estimate, oracle.query_count() - before)
}

/// Complex-Hilbert-space reconstruction from `2d² - d` ray values.
pub fn explicit_reconstruct(oracle: &dyn ValuationOracle, basis: &OrthonormalBasis) -> Result<ReconstructionReport> {
    check_inputs(oracle, basis, FieldMode::Complex)?;
    reconstruct_in_basis(EXPLICIT, oracle, basis)
}

/// Real-Hilbert-space reconstruction from `d²` ray values; the estimate is
/// real symmetric.
pub fn explicit_reconstruct_real(
    oracle: &dyn ValuationOracle,
    basis: &OrthonormalBasis,
) -> Result<ReconstructionReport> {
    check_inputs(oracle, basis, FieldMode::Real)?;
    reconstruct_in_basis(EXPLICIT_REAL, oracle, basis)
}
