//! Finite-dimensional Hilbert-space primitives: unit vectors, projectors,
//! orthonormal bases, subspaces and density matrices.
//!
//! Everything is dense `nalgebra` storage over `Complex64`. Real-Hilbert-space
//! mode is a [`FieldMode`] flag on top of the same storage: real objects simply
//! have every imaginary part equal to zero.

mod gram_schmidt;
mod nearest;
mod random;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GleasonError, Result};

pub use gram_schmidt::{gram_schmidt, orthonormal_completion};
pub use nearest::{nearest_density_matrix, project_onto_simplex};
pub use random::{
    derive_seed, haar_random_basis, haar_random_basis_real, random_complex_gaussian,
    random_density_matrix, random_real_density_matrix, random_unit_vector, seeded_rng,
};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance for algebraic identities on exact inputs.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Smallest eigenvalue still accepted as nonnegative.
pub const EIGEN_TOL: f64 = 1e-10;

/// Real or complex Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldMode {
    Real,
    Complex,
}

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Frobenius norm of `a - b`.
pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

/// `(m + m^dagger) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entry of `|m - m^dagger|`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_real_matrix(m: &CMatrix) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// Eigenvalues (non-increasing) and canonically phased eigenvectors of the
/// Hermitian part of `m`.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, Vec<UnitVector>) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let col: CVector = eig.eigenvectors.column(i).into_owned();
            UnitVector::from_raw(col.unscale(col.norm())).with_canonical_phase()
        })
        .collect();
    (values, vectors)
}

/// A unit vector in `C^d` (or `R^d`), representing a ray.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector {
    components: CVector,
}

impl UnitVector {
    /// Accepts `components` if its norm is 1 within [`IDENTITY_TOL`].
    pub fn new(components: CVector) -> Result<Self> {
        if components.is_empty() {
            return Err(GleasonError::ZeroDimension);
        }
        let norm = components.norm();
        if (norm - 1.0).abs() > IDENTITY_TOL {
            return Err(GleasonError::NotNormalized { norm });
        }
        Ok(Self { components })
    }

    /// Rescales `v` to unit norm; fails on (numerically) zero vectors.
    pub fn normalize(v: &CVector) -> Result<Self> {
        if v.is_empty() {
            return Err(GleasonError::ZeroDimension);
        }
        let norm = v.norm();
        if norm < 1e-14 || !norm.is_finite() {
            return Err(GleasonError::NotNormalized { norm });
        }
        Ok(Self { components: v.unscale(norm) })
    }

    pub fn from_real(components: &[f64]) -> Result<Self> {
        Self::new(CVector::from_iterator(components.len(), components.iter().map(|&x| c(x, 0.0))))
    }

    /// The `k`-th standard basis vector `e_k` (zero-based).
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[k] = c(1.0, 0.0);
        Self { components: v }
    }

    pub(crate) fn from_raw(components: CVector) -> Self {
        Self { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn as_vector(&self) -> &CVector {
        &self.components
    }

    pub fn into_vector(self) -> CVector {
        self.components
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &UnitVector) -> Complex64 {
        self.components.dotc(&other.components)
    }

    pub fn is_real(&self) -> bool {
        self.components.iter().all(|z| z.im == 0.0)
    }

    pub fn field(&self) -> FieldMode {
        if self.is_real() {
            FieldMode::Real
        } else {
            FieldMode::Complex
        }
    }

    /// Same ray, rotated so the first non-negligible component is positive real.
    pub fn with_canonical_phase(mut self) -> Self {
        if let Some(first) = self.components.iter().find(|z| z.norm() > 1e-12).copied() {
            let phase = first.conj() / first.norm();
            self.components.apply(|z| *z *= phase);
            // Exact zero imaginary part on the pivot keeps real vectors real.
            if let Some(pivot) = self.components.iter_mut().find(|z| z.norm() > 1e-12) {
                pivot.im = 0.0;
            }
        }
        self
    }

    /// Phase-invariant distance `min_phi |self - e^{i phi} other|`.
    pub fn ray_distance(&self, other: &UnitVector) -> f64 {
        let overlap = other.inner(self);
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { c(1.0, 0.0) };
        (&self.components - other.components.map(|z| z * phase)).norm()
    }

    pub fn projector(&self) -> Projector {
        projector_of(self)
    }
}

/// An orthogonal projector onto a subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    matrix: CMatrix,
    rank: usize,
}

impl Projector {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// `|v><v|`.
pub fn projector_of(v: &UnitVector) -> Projector {
    let u = v.as_vector();
    Projector { matrix: u * u.adjoint(), rank: 1 }
}

fn orthonormality_deviation(vectors: &[UnitVector]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.inner(b) - c(target, 0.0)).norm());
        }
    }
    worst
}

fn check_common_dim(vectors: &[UnitVector]) -> Result<usize> {
    let dim = vectors.first().ok_or(GleasonError::EmptyInput)?.dim();
    if let Some(bad) = vectors.iter().find(|v| v.dim() != dim) {
        return Err(GleasonError::DimensionMismatch { expected: dim, found: bad.dim() });
    }
    Ok(dim)
}

/// Exactly `dim` mutually orthonormal unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    vectors: Vec<UnitVector>,
}

impl OrthonormalBasis {
    pub fn new(vectors: Vec<UnitVector>) -> Result<Self> {
        let dim = check_common_dim(&vectors)?;
        if vectors.len() != dim {
            return Err(GleasonError::IncompleteBasis { dim, found: vectors.len() });
        }
        let deviation = orthonormality_deviation(&vectors);
        if deviation > IDENTITY_TOL {
            return Err(GleasonError::NotOrthonormal { deviation });
        }
        Ok(Self { vectors })
    }

    pub fn standard(dim: usize) -> Self {
        Self { vectors: (0..dim).map(|k| UnitVector::basis(dim, k)).collect() }
    }

    /// Columns of `u` as a basis.
    pub fn from_unitary(u: &CMatrix) -> Result<Self> {
        let vectors = u
            .column_iter()
            .map(|col| UnitVector::new(col.into_owned()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vectors)
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[UnitVector] {
        &self.vectors
    }

    /// Unitary whose `k`-th column is the `k`-th basis vector.
    pub fn unitary(&self) -> CMatrix {
        let cols: Vec<CVector> = self.vectors.iter().map(|v| v.as_vector().clone()).collect();
        CMatrix::from_columns(&cols)
    }

    pub fn projectors(&self) -> Vec<Projector> {
        self.vectors.iter().map(projector_of).collect()
    }

    pub fn is_real(&self) -> bool {
        self.vectors.iter().all(UnitVector::is_real)
    }
}

/// A closed subspace given by an orthonormal spanning set.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    spanning_set: Vec<UnitVector>,
}

impl Subspace {
    pub fn new(spanning_set: Vec<UnitVector>) -> Result<Self> {
        let dim = check_common_dim(&spanning_set)?;
        if spanning_set.len() > dim {
            return Err(GleasonError::RankDeficient { index: dim });
        }
        let deviation = orthonormality_deviation(&spanning_set);
        if deviation > IDENTITY_TOL {
            return Err(GleasonError::NotOrthonormal { deviation });
        }
        Ok(Self { spanning_set })
    }

    pub fn full(dim: usize) -> Self {
        Self { spanning_set: OrthonormalBasis::standard(dim).vectors }
    }

    pub fn ambient_dim(&self) -> usize {
        self.spanning_set[0].dim()
    }

    pub fn rank(&self) -> usize {
        self.spanning_set.len()
    }

    pub fn spanning_set(&self) -> &[UnitVector] {
        &self.spanning_set
    }

    /// `P_A = sum_i |s_i><s_i|`.
    pub fn projector(&self) -> Projector {
        let d = self.ambient_dim();
        let matrix = self
            .spanning_set
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, s| acc + projector_of(s).matrix);
        Projector { matrix, rank: self.rank() }
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace within [`IDENTITY_TOL`] and
    /// eigenvalues `>= -EIGEN_TOL`.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(GleasonError::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        if matrix.nrows() == 0 {
            return Err(GleasonError::ZeroDimension);
        }
        let herm = hermiticity_deviation(&matrix);
        if herm > IDENTITY_TOL {
            return Err(GleasonError::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr - c(1.0, 0.0)).norm() > IDENTITY_TOL {
            return Err(GleasonError::InvalidState(format!("trace {tr} != 1")));
        }
        let (values, _) = hermitian_eigen(&matrix);
        let min = values.last().copied().unwrap_or(0.0);
        if min < -EIGEN_TOL {
            return Err(GleasonError::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_raw(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim, dim).unscale(dim as f64) }
    }

    pub fn pure(v: &UnitVector) -> Self {
        Self { matrix: projector_of(v).matrix }
    }

    /// Diagonal state; `probabilities` must form a probability vector.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        let diag = CVector::from_iterator(probabilities.len(), probabilities.iter().map(|&p| c(p, 0.0)));
        Self::new(CMatrix::from_diagonal(&diag))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `<n|rho|n>`.
    pub fn expectation(&self, n: &UnitVector) -> f64 {
        let v = n.as_vector();
        v.dotc(&(&self.matrix * v)).re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn is_real(&self) -> bool {
        is_real_matrix(&self.matrix)
    }

    pub fn field(&self) -> FieldMode {
        if self.is_real() {
            FieldMode::Real
        } else {
            FieldMode::Complex
        }
    }

    pub fn spectral(&self) -> SpectralDecomposition {
        let (eigenvalues, eigenvectors) = hermitian_eigen(&self.matrix);
        SpectralDecomposition { eigenvalues, eigenvectors }
    }
}

/// `rho = sum_i lambda_i Q_i` with eigenvalues in non-increasing order.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<UnitVector>,
}

impl SpectralDecomposition {
    pub fn eigenprojectors(&self) -> Vec<Projector> {
        self.eigenvectors.iter().map(projector_of).collect()
    }

    pub fn reassemble(&self) -> CMatrix {
        let d = self.eigenvectors.first().map_or(0, UnitVector::dim);
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .fold(CMatrix::zeros(d, d), |acc, (&l, v)| acc + projector_of(v).matrix.scale(l))
    }

    /// Eigenvalue groups closer than `gap`, each with its spectral projector.
    pub fn groups(&self, gap: f64) -> Vec<EigenGroup> {
        spectral_groups(&self.eigenvalues, &self.eigenvectors, gap)
    }
}

/// Consecutive eigenvalues within `gap` of each other and the projector onto
/// their joint eigenspace.
#[derive(Debug, Clone)]
pub struct EigenGroup {
    pub indices: std::ops::Range<usize>,
    pub mean_value: f64,
    pub projector: CMatrix,
}

/// Groups sorted `values` (non-increasing) whose neighbours differ by less
/// than `gap`.
pub fn spectral_groups(values: &[f64], vectors: &[UnitVector], gap: f64) -> Vec<EigenGroup> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || (values[i - 1] - values[i]).abs() >= gap {
            groups.push(group_of(values, vectors, start..i));
            start = i;
        }
    }
    groups
}

/// Projector and mean eigenvalue of an explicit index range.
pub fn group_of(values: &[f64], vectors: &[UnitVector], indices: std::ops::Range<usize>) -> EigenGroup {
    let d = vectors[indices.start].dim();
    let projector = vectors[indices.clone()]
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, v| acc + projector_of(v).matrix);
    let mean_value = values[indices.clone()].iter().sum::<f64>() / indices.len() as f64;
    EigenGroup { indices, mean_value, projector }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projector_of_basis_vector() {
        let p = projector_of(&UnitVector::basis(3, 0));
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]));
        assert_eq!(p.matrix(), &expected);
        assert_eq!(p.rank(), 1);
    }

    #[test]
    fn projector_of_diagonal_superposition() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let p = projector_of(&UnitVector::from_real(&[h, h]).unwrap());
        for z in p.matrix().iter() {
            assert!((z - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn random_projector_is_idempotent() {
        let mut rng = seeded_rng(3);
        for d in 1..6 {
            let v = random_unit_vector(d, FieldMode::Complex, &mut rng);
            let p = projector_of(&v);
            let m = p.matrix();
            assert!(frobenius_distance(&(m * m), m) < IDENTITY_TOL);
            assert!((m.trace() - c(1.0, 0.0)).norm() < IDENTITY_TOL);
            assert!((m * v.as_vector() - v.as_vector()).norm() < IDENTITY_TOL);
        }
    }

    #[test]
    fn unit_vector_rejects_unnormalized() {
        assert!(matches!(
            UnitVector::from_real(&[1.0, 1.0]),
            Err(GleasonError::NotNormalized { .. })
        ));
    }

    #[test]
    fn canonical_phase_makes_first_component_positive() {
        let v = UnitVector::new(CVector::from_vec(vec![c(0.0, 0.0), c(0.0, -0.6), c(0.8, 0.0)])).unwrap();
        let w = v.clone().with_canonical_phase();
        assert_eq!(w.as_vector()[1], c(0.6, 0.0));
        assert!((w.as_vector()[2] - c(0.0, 0.8)).norm() < 1e-15);
        assert!(w.ray_distance(&v) < 1e-15);
    }

    #[test]
    fn basis_rejects_non_orthogonal() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let vs = vec![UnitVector::basis(2, 0), UnitVector::from_real(&[h, h]).unwrap()];
        assert!(matches!(OrthonormalBasis::new(vs), Err(GleasonError::NotOrthonormal { .. })));
        assert!(matches!(
            OrthonormalBasis::new(vec![UnitVector::basis(2, 0)]),
            Err(GleasonError::IncompleteBasis { dim: 2, found: 1 })
        ));
    }

    #[test]
    fn basis_projectors_resolve_identity() {
        for d in 1..=6 {
            let b = haar_random_basis(d, 11 + d as u64).unwrap();
            let sum = b.projectors().iter().fold(CMatrix::zeros(d, d), |acc, p| acc + p.matrix());
            assert!(frobenius_distance(&sum, &CMatrix::identity(d, d)) < IDENTITY_TOL);
        }
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(CMatrix::identity(2, 2)).is_err());
        let bad = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.1, 0.0), c(-0.1, 0.0)]));
        assert!(matches!(DensityMatrix::new(bad), Err(GleasonError::InvalidState(_))));
        assert!(DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).is_ok());
    }

    #[test]
    fn spectral_decomposition_reassembles() {
        let rho = random_density_matrix(5, 5, 9).unwrap();
        let s = rho.spectral();
        assert!((s.eigenvalues.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        assert!(frobenius_distance(&s.reassemble(), rho.matrix()) < 1e-10);
        assert!(s.eigenprojectors().iter().all(|p| p.rank() == 1));
    }

    #[test]
    fn degenerate_spectrum_groups() {
        let rho = DensityMatrix::diagonal(&[0.4, 0.4, 0.2]).unwrap();
        let groups = rho.spectral().groups(1e-6);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].indices, 0..2);
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]));
        assert!(frobenius_distance(&groups[0].projector, &expected) < 1e-12);
    }

    #[test]
    fn subspace_projector_has_rank_trace() {
        let b = haar_random_basis(4, 2).unwrap();
        let a = Subspace::new(b.vectors()[..2].to_vec()).unwrap();
        let p = a.projector();
        assert_eq!(p.rank(), 2);
        assert!((p.matrix().trace() - c(2.0, 0.0)).norm() < IDENTITY_TOL);
        assert!(frobenius_distance(&(p.matrix() * p.matrix()), p.matrix()) < IDENTITY_TOL);
    }
}
