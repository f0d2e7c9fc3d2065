//! Seeded sampling of Haar-random bases, random states and random vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{c, gram_schmidt, CMatrix, CVector, DensityMatrix, FieldMode, OrthonormalBasis, UnitVector};
use crate::error::{GleasonError, Result};

/// Deterministic generator for a 64-bit seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes `seed` and `index` into an independent child seed (splitmix64).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Vector of i.i.d. standard complex Gaussians (`E|z|^2 = 1`).
pub fn random_complex_gaussian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CVector::from_fn(dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re * s, im * s)
    })
}

fn random_real_gaussian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    CVector::from_fn(dim, |_, _| c(rng.sample(StandardNormal), 0.0))
}

/// Uniformly distributed unit vector on the real or complex sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, field: FieldMode, rng: &mut R) -> UnitVector {
    loop {
        let g = match field {
            FieldMode::Complex => random_complex_gaussian(dim, rng),
            FieldMode::Real => random_real_gaussian(dim, rng),
        };
        if let Ok(v) = UnitVector::normalize(&g) {
            return v;
        }
    }
}

fn gaussian_basis(dim: usize, seed: u64, field: FieldMode) -> Result<OrthonormalBasis> {
    if dim == 0 {
        return Err(GleasonError::ZeroDimension);
    }
    let mut rng = seeded_rng(seed);
    loop {
        let cols: Vec<CVector> = (0..dim)
            .map(|_| match field {
                FieldMode::Complex => random_complex_gaussian(dim, &mut rng),
                FieldMode::Real => random_real_gaussian(dim, &mut rng),
            })
            .collect();
        // Gram-Schmidt is QR with a positive real diagonal in R, which is the
        // phase convention that makes the Q factor exactly Haar distributed.
        // A singular draw has probability zero; redraw if it happens.
        if let Ok(vectors) = gram_schmidt(&cols) {
            return OrthonormalBasis::new(vectors);
        }
    }
}

/// Haar-random orthonormal basis of `C^dim`.
pub fn haar_random_basis(dim: usize, seed: u64) -> Result<OrthonormalBasis> {
    gaussian_basis(dim, seed, FieldMode::Complex)
}

/// Haar-random orthonormal basis of `R^dim` (orthogonal group).
pub fn haar_random_basis_real(dim: usize, seed: u64) -> Result<OrthonormalBasis> {
    gaussian_basis(dim, seed, FieldMode::Real)
}

fn gaussian_state(dim: usize, rank: usize, seed: u64, field: FieldMode) -> Result<DensityMatrix> {
    if dim == 0 {
        return Err(GleasonError::ZeroDimension);
    }
    if rank == 0 || rank > dim {
        return Err(GleasonError::RankOutOfRange { rank, dim });
    }
    let mut rng = seeded_rng(seed);
    let cols: Vec<CVector> = (0..rank)
        .map(|_| match field {
            FieldMode::Complex => random_complex_gaussian(dim, &mut rng),
            FieldMode::Real => random_real_gaussian(dim, &mut rng),
        })
        .collect();
    let g = CMatrix::from_columns(&cols);
    let mut m = &g * g.adjoint();
    let tr = m.trace().re;
    m.unscale_mut(tr);
    // Exact Hermiticity; the product is only Hermitian to rounding.
    let m = (&m + m.adjoint()).scale(0.5);
    DensityMatrix::new(m)
}

/// `G G^dagger / tr(G G^dagger)` with `G` a `dim x rank` complex Gaussian.
pub fn random_density_matrix(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    gaussian_state(dim, rank, seed, FieldMode::Complex)
}

/// Real symmetric variant of [`random_density_matrix`].
pub fn random_real_density_matrix(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    gaussian_state(dim, rank, seed, FieldMode::Real)
}
