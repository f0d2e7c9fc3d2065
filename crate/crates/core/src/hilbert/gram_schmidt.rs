use super::{CVector, UnitVector};
use crate::error::{GleasonError, Result};

/// Relative residual below which a vector counts as dependent.
const DEPENDENCE_TOL: f64 = 1e-10;

fn project_out(v: &mut CVector, onto: &[CVector]) {
    // Two passes of modified Gram-Schmidt keep orthogonality at machine
    // precision even for mildly ill-conditioned input.
    for _ in 0..2 {
        for q in onto {
            let overlap = q.dotc(v);
            v.axpy(-overlap, q, num_complex::Complex64::new(1.0, 0.0));
        }
    }
}

/// Orthonormalizes `vectors` in order.
///
/// The output spans the same space, and its first vector is the first input
/// rescaled. Fewer than `dim` inputs yield a partial orthonormal set.
pub fn gram_schmidt(vectors: &[CVector]) -> Result<Vec<UnitVector>> {
    let dim = vectors.first().ok_or(GleasonError::EmptyInput)?.len();
    if dim == 0 {
        return Err(GleasonError::ZeroDimension);
    }
    let mut out: Vec<CVector> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        if v.len() != dim {
            return Err(GleasonError::DimensionMismatch { expected: dim, found: v.len() });
        }
        let scale = v.norm();
        let mut w = v.clone();
        project_out(&mut w, &out);
        let residual = w.norm();
        if index >= dim || scale == 0.0 || residual <= DEPENDENCE_TOL * scale {
            return Err(GleasonError::RankDeficient { index });
        }
        out.push(w.unscale(residual));
    }
    Ok(out.into_iter().map(UnitVector::from_raw).collect())
}

/// Orthonormal vectors completing `partial` to a basis of the ambient space.
///
/// Standard basis vectors are added greedily, always picking the one with the
/// largest component outside the current span. Real input gives real output.
pub fn orthonormal_completion(partial: &[UnitVector], dim: usize) -> Vec<UnitVector> {
    let mut span: Vec<CVector> = partial.iter().map(|v| v.as_vector().clone()).collect();
    let mut added = Vec::new();
    while span.len() < dim {
        let (residual, norm) = (0..dim)
            .map(|k| {
                let mut e = UnitVector::basis(dim, k).into_vector();
                project_out(&mut e, &span);
                let n = e.norm();
                (e, n)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("dim > 0");
        let q = residual.unscale(norm);
        span.push(q.clone());
        added.push(UnitVector::from_raw(q));
    }
    added
}
