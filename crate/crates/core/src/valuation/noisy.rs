use std::collections::HashMap;
use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::{check_query, QueryCounter, ValuationOracle};
use crate::error::{GleasonError, Result};
use crate::hilbert::{DensityMatrix, FieldMode, UnitVector};

pub const DEFAULT_SHOTS: u64 = 10_000;

/// Simulated finite-shot measurement: each query returns `k / shots` with
/// `k ~ Binomial(shots, <n|rho|n>)`.
///
/// Query `i` draws from ChaCha stream `i` of the oracle seed, so a
/// single-threaded sequence of queries is reproducible. Under concurrent use
/// the assignment of streams to queries follows arrival order; marginal
/// distributions are unaffected.
#[derive(Debug)]
pub struct NoisyOracle {
    state: DensityMatrix,
    field: FieldMode,
    shots: u64,
    seed: u64,
    memo: Option<Mutex<HashMap<Vec<u64>, f64>>>,
    counter: QueryCounter,
}

impl NoisyOracle {
    pub fn new(state: DensityMatrix, shots: u64, seed: u64) -> Self {
        assert!(shots > 0, "shots must be positive");
        Self { state, field: FieldMode::Complex, shots, seed, memo: None, counter: QueryCounter::default() }
    }

    /// Restricts queries to real vectors; the state must be real.
    pub fn in_real_mode(mut self) -> Result<Self> {
        if !self.state.is_real() {
            return Err(GleasonError::FieldMismatch { expected: FieldMode::Real, found: FieldMode::Complex });
        }
        self.field = FieldMode::Real;
        Ok(self)
    }

    /// Repeated queries of the same ray return the first sample.
    pub fn with_memoization(mut self, on: bool) -> Self {
        self.memo = on.then(|| Mutex::new(HashMap::new()));
        self
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn hidden_state(&self) -> &DensityMatrix {
        &self.state
    }

    fn sample(&self, n: &UnitVector, index: u64) -> f64 {
        let p = self.state.expectation(n).clamp(0.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let k = Binomial::new(self.shots, p).expect("p in [0, 1]").sample(&mut rng);
        k as f64 / self.shots as f64
    }
}

fn ray_key(n: &UnitVector) -> Vec<u64> {
    n.clone()
        .with_canonical_phase()
        .as_vector()
        .iter()
        .flat_map(|z| [z.re.to_bits(), z.im.to_bits()])
        .collect()
}

impl ValuationOracle for NoisyOracle {
    fn dim(&self) -> usize {
        self.state.dim()
    }

    fn field(&self) -> FieldMode {
        self.field
    }

    fn value(&self, n: &UnitVector) -> Result<f64> {
        check_query(self.dim(), self.field, n)?;
        let index = self.counter.tick();
        match &self.memo {
            None => Ok(self.sample(n, index)),
            Some(memo) => {
                let mut memo = memo.lock().expect("memo lock");
                Ok(*memo.entry(ray_key(n)).or_insert_with(|| self.sample(n, index)))
            }
        }
    }

    fn query_count(&self) -> u64 {
        self.counter.get()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{haar_random_basis, random_density_matrix};

    #[test]
    fn values_are_shot_fractions() {
        let oracle = NoisyOracle::new(random_density_matrix(3, 3, 1).unwrap(), 100, 9);
        for k in 0..3 {
            let v = oracle.value(&UnitVector::basis(3, k)).unwrap();
            assert!((0.0..=1.0).contains(&v));
            assert!((v * 100.0 - (v * 100.0).round()).abs() < 1e-9);
        }
    }

    #[test]
    fn sequence_is_reproducible() {
        let rho = random_density_matrix(2, 2, 4).unwrap();
        let a = NoisyOracle::new(rho.clone(), DEFAULT_SHOTS, 5);
        let b = NoisyOracle::new(rho, DEFAULT_SHOTS, 5);
        let n = UnitVector::basis(2, 0);
        let xs: Vec<f64> = (0..10).map(|_| a.value(&n).unwrap()).collect();
        let ys: Vec<f64> = (0..10).map(|_| b.value(&n).unwrap()).collect();
        assert_eq!(xs, ys);
        // Fresh samples without memoization.
        assert!(xs.windows(2).any(|w| w[0] != w[1]));
    }

    #[test]
    fn memoization_repeats_first_sample() {
        let rho = random_density_matrix(2, 2, 4).unwrap();
        let oracle = NoisyOracle::new(rho, 1000, 6).with_memoization(true);
        let n = UnitVector::basis(2, 1);
        let first = oracle.value(&n).unwrap();
        assert!((0..5).all(|_| oracle.value(&n).unwrap() == first));
        assert_eq!(oracle.query_count(), 6);
    }

    #[test]
    fn completeness_holds_in_expectation() {
        // Sum over a basis of d independent binomial fractions: mean 1,
        // standard deviation at most sqrt(d) / (2 sqrt(n)).
        let d = 3;
        let shots = DEFAULT_SHOTS;
        let oracle = NoisyOracle::new(random_density_matrix(d, d, 12).unwrap(), shots, 13);
        let reps = 400;
        let mean: f64 = (0..reps)
            .map(|r| {
                let b = haar_random_basis(d, r).unwrap();
                b.vectors().iter().map(|n| oracle.value(n).unwrap()).sum::<f64>()
            })
            .sum::<f64>()
            / reps as f64;
        let sigma = (d as f64).sqrt() / (2.0 * (shots as f64).sqrt()) / (reps as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn averaged_queries_respect_binomial_bound() {
        let rho = random_density_matrix(2, 2, 40).unwrap();
        let n = UnitVector::basis(2, 0);
        let p = rho.expectation(&n);
        let (shots, m, reps) = (1000u64, 16usize, 300usize);
        let oracle = NoisyOracle::new(rho, shots, 41);
        let means: Vec<f64> =
            (0..reps).map(|_| (0..m).map(|_| oracle.value(&n).unwrap()).sum::<f64>() / m as f64).collect();
        let var = means.iter().map(|x| (x - p).powi(2)).sum::<f64>() / reps as f64;
        let bound = 1.0 / (2.0 * ((shots as usize * m) as f64).sqrt());
        // Sample sd of 300 draws is within ~10% of the true sd.
        assert!(var.sqrt() <= 1.15 * bound, "sd {} bound {bound}", var.sqrt());
    }
}
