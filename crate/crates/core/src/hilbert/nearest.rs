use super::{hermitian_eigen, hermitian_part, projector_of, CMatrix, DensityMatrix};
use crate::error::{GleasonError, Result};

/// Euclidean projection of `v` onto the probability simplex.
pub fn project_onto_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Frobenius-nearest density matrix to the Hermitian part of `m`.
pub fn nearest_density_matrix(m: &CMatrix) -> Result<DensityMatrix> {
    if !m.is_square() {
        return Err(GleasonError::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    if m.nrows() == 0 {
        return Err(GleasonError::ZeroDimension);
    }
    let (values, vectors) = hermitian_eigen(m);
    let clipped = project_onto_simplex(&values);
    let d = m.nrows();
    let out = clipped
        .iter()
        .zip(&vectors)
        .fold(CMatrix::zeros(d, d), |acc, (&p, v)| acc + projector_of(v).matrix().scale(p));
    Ok(DensityMatrix::from_raw(hermitian_part(&out)))
}
