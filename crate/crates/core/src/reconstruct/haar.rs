//! Reconstruction by averaging decoherence over Haar-random bases.
//!
//! Averaging `rho_P = sum_i v(P_i) P_i` uniformly over bases gives
//! `<rho_P> = (rho + I) / (d + 1)`, hence `rho = (d + 1) <rho_P> - I`.
//! Each sample `(d + 1) rho_P - I` has unit trace whenever the valuation is
//! normalized, so the raw estimate has unit trace at every sample count.

use rayon::prelude::*;

use super::ReconstructionReport;
use crate::error::{GleasonError, Result};
use crate::hilbert::{derive_seed, haar_random_basis, projector_of, CMatrix, FieldMode};
use crate::valuation::ValuationOracle;

pub const HAAR_AVERAGE: &str = "haar-average";

/// Bases per work unit. Partial sums are formed per chunk and then combined
/// by a fixed pairwise tree, so results depend only on the seed.
const CHUNK: usize = 256;

#[derive(Clone)]
struct Partial {
    sum: CMatrix,
    /// Sum of squared Frobenius norms of the samples.
    sum_sq: f64,
}

impl Partial {
    fn merge(self, other: Partial) -> Partial {
        Partial { sum: self.sum + other.sum, sum_sq: self.sum_sq + other.sum_sq }
    }
}

fn pairwise_reduce(mut parts: Vec<Partial>) -> Partial {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a.merge(b),
                None => a,
            });
        }
        parts = next;
    }
    parts.pop().expect("at least one chunk")
}

/// One sample `(d + 1) rho_P - I` for basis number `index`.
fn sample(oracle: &dyn ValuationOracle, seed: u64, index: u64) -> Result<CMatrix> {
    let d = oracle.dim();
    let basis = haar_random_basis(d, derive_seed(seed, index))?;
    let mut rho_p = CMatrix::zeros(d, d);
    for n in basis.vectors() {
        rho_p += projector_of(n).matrix().scale(oracle.value(n)?);
    }
    Ok(rho_p.scale((d + 1) as f64) - CMatrix::identity(d, d))
}

/// `(d + 1) <rho_P> - I` over `num_bases` Haar-random bases.
///
/// Also reports the Frobenius standard error of the mean when
/// `num_bases >= 2`.
pub fn haar_average_reconstruct(
    oracle: &dyn ValuationOracle,
    num_bases: usize,
    seed: u64,
) -> Result<ReconstructionReport> {
    if num_bases == 0 {
        return Err(GleasonError::EmptyInput);
    }
    if oracle.field() != FieldMode::Complex {
        return Err(GleasonError::FieldMismatch { expected: FieldMode::Complex, found: oracle.field() });
    }
    let d = oracle.dim();
    if d == 1 {
        return Ok(ReconstructionReport::trivial(HAAR_AVERAGE));
    }
    let before = oracle.query_count();
    let chunks = num_bases.div_ceil(CHUNK);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut part = Partial { sum: CMatrix::zeros(d, d), sum_sq: 0.0 };
            for index in chunk * CHUNK..((chunk + 1) * CHUNK).min(num_bases) {
                let x = sample(oracle, seed, index as u64)?;
                part.sum_sq += x.norm_squared();
                part.sum += x;
            }
            Ok(part)
        })
        .collect::<Result<Vec<_>>>()?;
    let total = pairwise_reduce(parts);
    let n = num_bases as f64;
    let estimate = total.sum.unscale(n);
    let standard_error = (num_bases > 1).then(|| {
        let variance = ((total.sum_sq - n * estimate.norm_squared()) / (n - 1.0)).max(0.0);
        (variance / n).sqrt()
    });
    let mut report = ReconstructionReport::from_estimate(HAAR_AVERAGE, estimate, oracle.query_count() - before)?;
    report.standard_error = standard_error;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{c, frobenius_distance, random_density_matrix, DensityMatrix};
    use crate::valuation::ExactOracle;

    #[test]
    fn maximally_mixed_is_exact() {
        let oracle = ExactOracle::new(DensityMatrix::maximally_mixed(3));
        let r = haar_average_reconstruct(&oracle, 10, 1).unwrap();
        assert!(frobenius_distance(&r.estimate, oracle.hidden_state().matrix()) < 1e-12);
        assert_eq!(r.query_count, 30);
    }

    #[test]
    fn single_basis_has_unit_trace() {
        let oracle = ExactOracle::new(random_density_matrix(4, 2, 3).unwrap());
        for seed in 0..20 {
            let r = haar_average_reconstruct(&oracle, 1, seed).unwrap();
            assert!((r.estimate.trace() - c(1.0, 0.0)).norm() < 1e-10);
            assert!(r.standard_error.is_none());
        }
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let oracle = ExactOracle::new(random_density_matrix(3, 3, 5).unwrap());
        let a = haar_average_reconstruct(&oracle, 1000, 7).unwrap();
        let b = haar_average_reconstruct(&oracle, 1000, 7).unwrap();
        assert_eq!(a.estimate, b.estimate);
    }

    #[test]
    fn error_tracks_standard_error() {
        let rho = random_density_matrix(3, 3, 8).unwrap();
        let oracle = ExactOracle::new(rho.clone());
        let r = haar_average_reconstruct(&oracle, 4000, 9).unwrap();
        let se = r.standard_error.unwrap();
        let err = frobenius_distance(&r.estimate, rho.matrix());
        assert!(err <= 5.0 * se, "err {err} se {se}");
        // SE of N samples shrinks like 1/sqrt(N); a single sample has
        // Frobenius spread of order one.
        assert!(se > 0.001 && se < 0.05, "se {se}");
    }

    #[test]
    fn rejects_zero_bases_and_real_mode() {
        let oracle = ExactOracle::new(DensityMatrix::maximally_mixed(2));
        assert!(haar_average_reconstruct(&oracle, 0, 1).is_err());
        let real = ExactOracle::real(DensityMatrix::maximally_mixed(2)).unwrap();
        assert!(matches!(haar_average_reconstruct(&real, 5, 1), Err(GleasonError::FieldMismatch { .. })));
    }
}
