use nalgebra::DMatrix;

use crate::error::{GleasonError, Result};
use crate::hilbert::{projector_of, CMatrix, DensityMatrix, OrthonormalBasis};
use crate::valuation::ValuationOracle;

/// `S_ij = |<q_i|p_j>|^2` between two orthonormal bases.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    entries: DMatrix<f64>,
}

impl TransitionMatrix {
    /// Wraps arbitrary entries, e.g. to feed a checker.
    pub fn from_entries(entries: DMatrix<f64>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `w_j = sum_i u_i S_ij`: maps valuations on `q` to valuations on `p`.
    pub fn push_forward(&self, weights: &[f64]) -> Vec<f64> {
        (0..self.entries.ncols())
            .map(|j| weights.iter().enumerate().map(|(i, w)| w * self.entries[(i, j)]).sum())
            .collect()
    }
}

pub fn transition_matrix(q_basis: &OrthonormalBasis, p_basis: &OrthonormalBasis) -> Result<TransitionMatrix> {
    if q_basis.dim() != p_basis.dim() {
        return Err(GleasonError::DimensionMismatch { expected: q_basis.dim(), found: p_basis.dim() });
    }
    let (q, p) = (q_basis.vectors(), p_basis.vectors());
    let entries = DMatrix::from_fn(q.len(), p.len(), |i, j| q[i].inner(&p[j]).norm_sqr());
    Ok(TransitionMatrix { entries })
}

fn check_dims(expected: usize, basis: &OrthonormalBasis) -> Result<()> {
    if basis.dim() != expected {
        return Err(GleasonError::DimensionMismatch { expected, found: basis.dim() });
    }
    Ok(())
}

/// `rho_P = sum_i v(P_i) P_i`, from oracle queries.
///
/// With an exact oracle this is a density matrix; with a noisy one the
/// trace is only 1 in expectation, so the raw matrix is returned.
pub fn decohere(oracle: &dyn ValuationOracle, basis: &OrthonormalBasis) -> Result<CMatrix> {
    check_dims(oracle.dim(), basis)?;
    let d = basis.dim();
    basis.vectors().iter().try_fold(CMatrix::zeros(d, d), |acc, n| {
        Ok(acc + projector_of(n).matrix().scale(oracle.value(n)?))
    })
}

/// `sum_i P_i <n_i|m|n_i> `: the part of `m` diagonal in `basis`.
pub fn decohere_matrix(m: &CMatrix, basis: &OrthonormalBasis) -> Result<CMatrix> {
    check_dims(m.nrows(), basis)?;
    let d = basis.dim();
    Ok(basis.vectors().iter().fold(CMatrix::zeros(d, d), |acc, n| {
        let v = n.as_vector();
        acc + projector_of(n).matrix() * v.dotc(&(m * v))
    }))
}

/// Decoherence of a known state; the result is again a density matrix.
pub fn decohere_state(rho: &DensityMatrix, basis: &OrthonormalBasis) -> Result<DensityMatrix> {
    let m = decohere_matrix(rho.matrix(), basis)?;
    Ok(DensityMatrix::from_raw(crate::hilbert::hermitian_part(&m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{c, frobenius_distance, haar_random_basis, random_density_matrix, UnitVector, IDENTITY_TOL};
    use crate::valuation::ExactOracle;

    #[test]
    fn identical_bases_give_identity() {
        let b = haar_random_basis(4, 1).unwrap();
        let s = transition_matrix(&b, &b).unwrap();
        assert!((s.entries() - DMatrix::<f64>::identity(4, 4)).norm() < IDENTITY_TOL);
    }

    #[test]
    fn bases_at_45_degrees() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let p = OrthonormalBasis::new(vec![
            UnitVector::from_real(&[h, h]).unwrap(),
            UnitVector::from_real(&[h, -h]).unwrap(),
        ])
        .unwrap();
        let s = transition_matrix(&OrthonormalBasis::standard(2), &p).unwrap();
        assert!(s.entries().iter().all(|x| (x - 0.5).abs() < 1e-15));
    }

    #[test]
    fn dimension_mismatch() {
        let err = transition_matrix(&OrthonormalBasis::standard(2), &OrthonormalBasis::standard(3));
        assert!(matches!(err, Err(GleasonError::DimensionMismatch { .. })));
    }

    #[test]
    fn push_forward_predicts_valuations() {
        let rho = random_density_matrix(5, 5, 3).unwrap();
        let oracle = ExactOracle::new(rho.clone());
        let q = OrthonormalBasis::new(rho.spectral().eigenvectors).unwrap();
        let p = haar_random_basis(5, 4).unwrap();
        let s = transition_matrix(&q, &p).unwrap();
        let vq: Vec<f64> = q.vectors().iter().map(|n| oracle.value(n).unwrap()).collect();
        let predicted = s.push_forward(&vq);
        for (n, w) in p.vectors().iter().zip(predicted) {
            assert!((oracle.value(n).unwrap() - w).abs() < IDENTITY_TOL);
        }
        for i in 0..5 {
            assert!((s.entries().row(i).sum() - 1.0).abs() < IDENTITY_TOL);
            assert!((s.entries().column(i).sum() - 1.0).abs() < IDENTITY_TOL);
        }
    }

    #[test]
    fn decohere_diagonal_state_unchanged() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let oracle = ExactOracle::new(rho.clone());
        let out = decohere(&oracle, &OrthonormalBasis::standard(3)).unwrap();
        assert!(frobenius_distance(&out, rho.matrix()) < IDENTITY_TOL);
    }

    #[test]
    fn decohere_erases_coherence() {
        // (I + 0.8 X) / 2
        let m = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.4, 0.0), c(0.4, 0.0), c(0.5, 0.0)]);
        let oracle = ExactOracle::new(DensityMatrix::new(m).unwrap());
        let out = decohere(&oracle, &OrthonormalBasis::standard(2)).unwrap();
        assert!(frobenius_distance(&out, &CMatrix::identity(2, 2).scale(0.5)) < IDENTITY_TOL);
    }

    #[test]
    fn decohered_state_commutes_with_basis_projectors() {
        let rho = random_density_matrix(4, 3, 6).unwrap();
        let basis = haar_random_basis(4, 7).unwrap();
        let out = decohere(&ExactOracle::new(rho.clone()), &basis).unwrap();
        assert!((out.trace() - c(1.0, 0.0)).norm() < IDENTITY_TOL);
        for p in basis.projectors() {
            let comm = &out * p.matrix() - p.matrix() * &out;
            assert!(comm.norm() < IDENTITY_TOL);
        }
        // Idempotent.
        let twice = decohere_state(&decohere_state(&rho, &basis).unwrap(), &basis).unwrap();
        assert!(frobenius_distance(twice.matrix(), &out) < IDENTITY_TOL);
    }
}
