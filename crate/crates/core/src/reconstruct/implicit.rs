//! Reconstruction from the extrema of the valuation.
//!
//! `n_1` maximizes `v` over the unit sphere, `n_2` maximizes it over the
//! sphere orthogonal to `n_1`, and so on; the last vector is forced. Then
//! `rho = sum_i v(n_i) |n_i><n_i|`, the `n_i` being eigenvectors and the
//! `v(n_i)` eigenvalues in non-increasing order.
//!
//! Each maximization is a cyclic plane search. Restricted to the plane
//! spanned by the iterate `u` and a direction `w ⟂ u`, the valuation is
//! `<n|H|n>` for the 2x2 Hermitian matrix
//!
//! ```text
//! H = [ v(u)        <u|rho|w> ]
//!     [ <w|rho|u>   v(w)      ]
//! ```
//!
//! whose off-diagonal entry comes from four more ray values by polarization.
//! The top eigenvector of `H` is the exact maximizer in that plane. A sweep
//! runs over the directions of an orthonormal frame of the current search
//! space, followed by one step along the sweep's own displacement.

use num_complex::Complex64;

use super::{EigenPair, ReconstructionReport};
use crate::error::{GleasonError, NonConvergence, Result};
use crate::hilbert::{
    c, derive_seed, orthonormal_completion, projector_of, random_unit_vector, seeded_rng, CMatrix, CVector,
    UnitVector,
};
use crate::valuation::{sesquilinear, ValuationOracle};

pub const IMPLICIT: &str = "implicit";

/// Below this, plane couplings and value gaps are treated as rounding noise.
const NOISE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitConfig {
    /// A sweep moving the iterate less than this (phase-invariantly) ends
    /// the search.
    pub move_tolerance: f64,
    pub max_sweeps: usize,
    /// Independent random starts per sphere; the best maximum is kept.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for ImplicitConfig {
    fn default() -> Self {
        Self { move_tolerance: 1e-11, max_sweeps: 20_000, restarts: 3, seed: 0 }
    }
}

/// `w - u <u|w>`, normalized, or `None` if `w` is (nearly) parallel to `u`.
fn orthogonal_direction(u: &CVector, w: &CVector) -> Option<CVector> {
    let mut r = w.clone();
    for _ in 0..2 {
        let overlap = u.dotc(&r);
        r -= u * overlap;
    }
    let norm = r.norm();
    (norm > 1e-10 * w.norm().max(1e-300)).then(|| r.unscale(norm))
}

/// Exact maximizer of the valuation on the great circle/torus through `u`
/// and `w` (orthonormal). Returns the new iterate and its value.
fn plane_step(oracle: &dyn ValuationOracle, u: &CVector, w: &CVector) -> Result<(CVector, f64)> {
    let a = oracle.value(&UnitVector::from_raw(u.clone()))?;
    let b = oracle.value(&UnitVector::from_raw(w.clone()))?;
    let coupling = sesquilinear(oracle, u, w)?;
    if coupling.norm() <= NOISE_FLOOR && b - a <= NOISE_FLOOR {
        return Ok((u.clone(), a));
    }
    let half_gap = (a - b) / 2.0;
    let top = (a + b) / 2.0 + (half_gap * half_gap + coupling.norm_sqr()).sqrt();
    // Two algebraically equivalent eigenvector forms; take the better
    // conditioned one.
    let (alpha, beta): (Complex64, Complex64) =
        if a >= b { (c(top - b, 0.0), coupling.conj()) } else { (coupling, c(top - a, 0.0)) };
    let next = u * alpha + w * beta;
    let norm = next.norm();
    if norm == 0.0 || top < a {
        return Ok((u.clone(), a));
    }
    Ok((next.unscale(norm), top))
}

fn project_into(frame: &[UnitVector], u: &CVector) -> CVector {
    let v = frame.iter().fold(CVector::zeros(u.len()), |acc, f| {
        let coeff = f.as_vector().dotc(u);
        acc + f.as_vector() * coeff
    });
    v.unscale(v.norm())
}

struct Ascent {
    vector: UnitVector,
    value: f64,
    sweeps: usize,
    residual: f64,
    converged: bool,
}

fn ascend(oracle: &dyn ValuationOracle, frame: &[UnitVector], start: CVector, config: &ImplicitConfig) -> Result<Ascent> {
    let mut u = start;
    let mut value = oracle.value(&UnitVector::from_raw(u.clone()))?;
    let mut residual = f64::INFINITY;
    for sweep in 1..=config.max_sweeps {
        let previous = u.clone();
        for f in frame {
            if let Some(w) = orthogonal_direction(&u, f.as_vector()) {
                (u, value) = plane_step(oracle, &u, &w)?;
            }
        }
        if let Some(w) = orthogonal_direction(&u, &previous) {
            (u, value) = plane_step(oracle, &u, &w)?;
        }
        u = project_into(frame, &u);
        residual = UnitVector::from_raw(u.clone()).ray_distance(&UnitVector::from_raw(previous));
        if residual < config.move_tolerance {
            return Ok(Ascent { vector: UnitVector::from_raw(u), value, sweeps: sweep, residual, converged: true });
        }
    }
    Ok(Ascent { vector: UnitVector::from_raw(u), value, sweeps: config.max_sweeps, residual, converged: false })
}

/// Maximizes `v` over the unit sphere of `span(frame)`.
fn maximize(
    oracle: &dyn ValuationOracle,
    frame: &[UnitVector],
    stage: usize,
    config: &ImplicitConfig,
) -> Result<(UnitVector, f64)> {
    let field = oracle.field();
    let mut best: Option<Ascent> = None;
    for restart in 0..config.restarts.max(1) {
        let mut rng = seeded_rng(derive_seed(config.seed, (stage * 1000 + restart) as u64));
        let coeffs = random_unit_vector(frame.len(), field, &mut rng);
        let start = frame
            .iter()
            .zip(coeffs.as_vector().iter())
            .fold(CVector::zeros(oracle.dim()), |acc, (f, &z)| acc + f.as_vector() * z);
        let run = ascend(oracle, frame, start, config)?;
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");
    if !best.converged {
        return Err(GleasonError::NonConvergence(Box::new(NonConvergence {
            stage,
            sweeps: best.sweeps,
            best_vector: best.vector,
            best_value: best.value,
            residual: best.residual,
        })));
    }
    Ok((best.vector, best.value))
}

/// Eigen-reconstruction by nested maximization of the valuation.
pub fn implicit_reconstruct(oracle: &dyn ValuationOracle, config: &ImplicitConfig) -> Result<ReconstructionReport> {
    let d = oracle.dim();
    if d == 1 {
        return Ok(ReconstructionReport::trivial(IMPLICIT));
    }
    let before = oracle.query_count();
    let mut found: Vec<UnitVector> = Vec::with_capacity(d);
    let mut pairs = Vec::with_capacity(d);
    for stage in 0..d {
        let frame = orthonormal_completion(&found, d);
        let n = if frame.len() == 1 {
            frame.into_iter().next().expect("one vector")
        } else {
            maximize(oracle, &frame, stage, config)?.0
        };
        let n = n.with_canonical_phase();
        let value = oracle.value(&n)?;
        found.push(n.clone());
        pairs.push(EigenPair { value, vector: n });
    }
    let estimate = pairs
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, p| acc + projector_of(&p.vector).matrix().scale(p.value));
    let mut report = ReconstructionReport::from_estimate(IMPLICIT, estimate, oracle.query_count() - before)?;
    report.eigenpairs = Some(pairs);
    Ok(report)
}
