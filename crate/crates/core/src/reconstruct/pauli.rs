//! Qubit reconstruction in Bloch form.
//!
//! In a basis `{x, y}`, `rho = (c0 I + r_x X + r_y Y + r_z Z) / 2` with
//! `c0 = v(x) + v(y)`, `r_z = v(x) - v(y)`,
//! `r_x = v((x+y)/√2) - v((x-y)/√2)` and `r_y = v((x+iy)/√2) - v((x-iy)/√2)`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{BlochVector, ReconstructionReport};
use crate::error::{GleasonError, Result};
use crate::hilbert::{c, hermitian_part, CMatrix, FieldMode, OrthonormalBasis, UnitVector};
use crate::valuation::ValuationOracle;

pub const PAULI_2D: &str = "pauli2d";

fn combine(x: &UnitVector, y: &UnitVector, phase: Complex64) -> Result<UnitVector> {
    UnitVector::new((x.as_vector() + y.as_vector() * phase).scale(FRAC_1_SQRT_2))
}

/// `(c0 I + r . sigma) / 2` in the computational frame.
pub fn bloch_matrix(c0: f64, r: &BlochVector) -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            c((c0 + r.r_z) / 2.0, 0.0),
            c(r.r_x / 2.0, -r.r_y / 2.0),
            c(r.r_x / 2.0, r.r_y / 2.0),
            c((c0 - r.r_z) / 2.0, 0.0),
        ],
    )
}

/// Six ray values for a complex qubit, four for a real one (`r_y = 0`).
/// One-dimensional oracles return `[1]`.
pub fn pauli_reconstruct_2d(oracle: &dyn ValuationOracle, basis: &OrthonormalBasis) -> Result<ReconstructionReport> {
    let d = oracle.dim();
    if d == 1 && basis.dim() == 1 {
        return Ok(ReconstructionReport::trivial(PAULI_2D));
    }
    if d != 2 {
        return Err(GleasonError::UnsupportedDimension { method: PAULI_2D, required: 2, found: d });
    }
    if basis.dim() != 2 {
        return Err(GleasonError::DimensionMismatch { expected: 2, found: basis.dim() });
    }
    let real = oracle.field() == FieldMode::Real;
    if real && !basis.is_real() {
        return Err(GleasonError::FieldMismatch { expected: FieldMode::Real, found: FieldMode::Complex });
    }
    let before = oracle.query_count();
    let (x, y) = (&basis.vectors()[0], &basis.vectors()[1]);
    let vx = oracle.value(x)?;
    let vy = oracle.value(y)?;
    let r_x = oracle.value(&combine(x, y, c(1.0, 0.0))?)? - oracle.value(&combine(x, y, c(-1.0, 0.0))?)?;
    let r_y = if real {
        0.0
    } else {
        oracle.value(&combine(x, y, c(0.0, 1.0))?)? - oracle.value(&combine(x, y, c(0.0, -1.0))?)?
    };
    let bloch = BlochVector { r_x, r_y, r_z: vx - vy };
    let u = basis.unitary();
    let estimate = hermitian_part(&(&u * bloch_matrix(vx + vy, &bloch) * u.adjoint()));
    let mut report = ReconstructionReport::from_estimate(PAULI_2D, estimate, oracle.query_count() - before)?;
    report.bloch = Some(bloch);
    Ok(report)
}
