//! Checkers for the identities a valuation and its reconstructions obey.
//!
//! Each checker returns a [`CheckReport`]; failing a check is a result, not
//! an error. Errors are reserved for invalid arguments and failed oracle
//! queries.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{GleasonError, Result};
use crate::hilbert::{
    derive_seed, frobenius_distance, haar_random_basis, haar_random_basis_real, hermitian_eigen,
    hermiticity_deviation, seeded_rng, CMatrix, DensityMatrix, FieldMode, OrthonormalBasis, Subspace, UnitVector,
};
use crate::reconstruct::{explicit_reconstruct, explicit_reconstruct_real, transition_matrix, TransitionMatrix};
use crate::valuation::{subspace_measure, ExactOracle, ValuationOracle};

/// Gate for Monte Carlo checks, in standard errors.
pub const SIGMA_GATE: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub pass: bool,
    pub deviation: f64,
    pub tolerance: f64,
    pub context: Value,
}

impl CheckReport {
    /// `pass` is `deviation <= tolerance`; NaN deviations fail.
    pub fn new(check: &str, deviation: f64, tolerance: f64, context: Value) -> Self {
        Self { check: check.to_string(), pass: deviation <= tolerance, deviation, tolerance, context }
    }
}

/// Hermiticity, unit trace and nonnegative spectrum within `tol`.
pub fn check_density(m: &CMatrix, tol: f64) -> CheckReport {
    if !m.is_square() || m.nrows() == 0 {
        let ctx = json!({"error": format!("matrix is {}x{}", m.nrows(), m.ncols())});
        return CheckReport::new("density", f64::INFINITY, tol, ctx);
    }
    let hermiticity = hermiticity_deviation(m);
    let trace = m.trace();
    let trace_dev = (trace - Complex64::new(1.0, 0.0)).norm();
    let (values, _) = hermitian_eigen(m);
    let min_eigenvalue = values.last().copied().unwrap_or(0.0);
    let negativity = (-min_eigenvalue).max(0.0);
    CheckReport::new(
        "density",
        hermiticity.max(trace_dev).max(negativity),
        tol,
        json!({
            "dim": m.nrows(),
            "hermiticity": hermiticity,
            "trace_re": trace.re,
            "trace_im": trace.im,
            "min_eigenvalue": min_eigenvalue,
        }),
    )
}

/// Cut points of a composition of `d` into positive parts, each of the
/// `2^(d-1)` compositions equally likely.
fn random_composition<R: Rng>(d: usize, rng: &mut R) -> Vec<usize> {
    let mut parts = Vec::new();
    let mut size = 1;
    for _ in 1..d {
        if rng.random_bool(0.5) {
            parts.push(size);
            size = 1;
        } else {
            size += 1;
        }
    }
    parts.push(size);
    parts
}

/// Different orthonormal spanning set of the same subspace: the given one
/// mixed by a Haar-random `k x k` unitary (orthogonal in real mode).
fn respan(vectors: &[UnitVector], field: FieldMode, seed: u64) -> Result<Vec<UnitVector>> {
    let k = vectors.len();
    let mix = match field {
        FieldMode::Complex => haar_random_basis(k, seed)?,
        FieldMode::Real => haar_random_basis_real(k, seed)?,
    }
    .unitary();
    (0..k)
        .map(|col| {
            let v = vectors
                .iter()
                .enumerate()
                .fold(crate::hilbert::CVector::zeros(vectors[0].dim()), |acc, (row, s)| {
                    acc + s.as_vector() * mix[(row, col)]
                });
            UnitVector::normalize(&v)
        })
        .collect()
}

/// Orthogonal decompositions `H = A_1 ⊕ ... ⊕ A_m` must satisfy
/// `sum_i v(A_i) = 1`, and the merged first pair must satisfy
/// `v(A_1 ⊕ A_2) = v(A_1) + v(A_2)` when measured through an independent
/// spanning set.
pub fn check_additivity(oracle: &dyn ValuationOracle, trials: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    if trials == 0 {
        return Err(GleasonError::EmptyInput);
    }
    let d = oracle.dim();
    let field = oracle.field();
    let mut rng = seeded_rng(seed);
    let (mut worst_total, mut worst_pair): (f64, f64) = (0.0, 0.0);
    for t in 0..trials as u64 {
        let basis = match field {
            FieldMode::Complex => haar_random_basis(d, derive_seed(seed, 2 * t))?,
            FieldMode::Real => haar_random_basis_real(d, derive_seed(seed, 2 * t))?,
        };
        let mut groups = Vec::new();
        let mut start = 0;
        for size in random_composition(d, &mut rng) {
            groups.push(Subspace::new(basis.vectors()[start..start + size].to_vec())?);
            start += size;
        }
        let measures = groups.iter().map(|a| subspace_measure(oracle, a)).collect::<Result<Vec<_>>>()?;
        worst_total = worst_total.max((measures.iter().sum::<f64>() - 1.0).abs());
        if groups.len() >= 2 {
            let union: Vec<UnitVector> = groups[0].spanning_set().iter().chain(groups[1].spanning_set()).cloned().collect();
            let merged = Subspace::new(respan(&union, field, derive_seed(seed, 2 * t + 1))?)?;
            let joint = subspace_measure(oracle, &merged)?;
            worst_pair = worst_pair.max((joint - measures[0] - measures[1]).abs());
        }
    }
    Ok(CheckReport::new(
        "additivity",
        worst_total.max(worst_pair),
        tol,
        json!({"dim": d, "trials": trials, "max_total_deviation": worst_total, "max_pair_deviation": worst_pair}),
    ))
}

/// Row and column sums equal to one and entries in `[0, 1]`, within `tol`.
pub fn check_unistochastic(s: &TransitionMatrix, tol: f64) -> CheckReport {
    let e = s.entries();
    let rows = e.row_iter().map(|r| (r.sum() - 1.0).abs()).fold(0.0, f64::max);
    let cols = e.column_iter().map(|c| (c.sum() - 1.0).abs()).fold(0.0, f64::max);
    let below = e.iter().map(|&x| (-x).max(0.0)).fold(0.0, f64::max);
    let above = e.iter().map(|&x| (x - 1.0).max(0.0)).fold(0.0, f64::max);
    let square = e.is_square();
    let deviation = if square { rows.max(cols).max(below).max(above) } else { f64::INFINITY };
    CheckReport::new(
        "unistochastic",
        deviation,
        tol,
        json!({"dim": e.nrows(), "row_sum_deviation": rows, "column_sum_deviation": cols, "range_violation": below.max(above)}),
    )
}

/// Closed form of `<sum_i (P_i)_ab conj((P_i)_cd)>` over Haar-random bases.
///
/// Without the conjugate the complex average is `(δ_ad δ_bc + δ_ab δ_cd)/(d+1)`.
pub fn haar_moment_closed_form(d: usize, a: usize, b: usize, c: usize, e: usize) -> f64 {
    let delta = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
    (delta(a, c) * delta(b, e) + delta(a, b) * delta(c, e)) / (d + 1) as f64
}

struct MomentSums {
    sum: Vec<Complex64>,
    sum_sq_re: Vec<f64>,
    sum_sq_im: Vec<f64>,
}

impl MomentSums {
    fn zeros(n: usize) -> Self {
        Self { sum: vec![Complex64::new(0.0, 0.0); n], sum_sq_re: vec![0.0; n], sum_sq_im: vec![0.0; n] }
    }

    fn merge(mut self, other: MomentSums) -> Self {
        for i in 0..self.sum.len() {
            self.sum[i] += other.sum[i];
            self.sum_sq_re[i] += other.sum_sq_re[i];
            self.sum_sq_im[i] += other.sum_sq_im[i];
        }
        self
    }
}

/// Monte Carlo test of the Haar second moment of basis projectors (second
/// factor conjugated, see [`haar_moment_closed_form`]), entrywise
/// in units of the estimated standard error; passes at [`SIGMA_GATE`].
pub fn check_haar_moment(dim: usize, num_samples: usize, seed: u64) -> Result<CheckReport> {
    if num_samples < 100 {
        return Err(GleasonError::Parse(format!("need at least 100 samples, got {num_samples}")));
    }
    if dim == 0 {
        return Err(GleasonError::ZeroDimension);
    }
    const CHUNK: usize = 1024;
    let d = dim;
    let n4 = d * d * d * d;
    let idx = |a: usize, b: usize, c: usize, e: usize| ((a * d + b) * d + c) * d + e;
    let partials = (0..num_samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut acc = MomentSums::zeros(n4);
            let mut t = vec![Complex64::new(0.0, 0.0); n4];
            for s in chunk * CHUNK..((chunk + 1) * CHUNK).min(num_samples) {
                let basis = haar_random_basis(d, derive_seed(seed, s as u64))?;
                t.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                for n in basis.vectors() {
                    let v = n.as_vector();
                    for a in 0..d {
                        for b in 0..d {
                            let p_ab = v[a] * v[b].conj();
                            for c in 0..d {
                                for e in 0..d {
                                    t[idx(a, b, c, e)] += p_ab * v[c].conj() * v[e];
                                }
                            }
                        }
                    }
                }
                for (i, z) in t.iter().enumerate() {
                    acc.sum[i] += z;
                    acc.sum_sq_re[i] += z.re * z.re;
                    acc.sum_sq_im[i] += z.im * z.im;
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut parts = partials;
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(x) = it.next() {
            next.push(match it.next() {
                Some(y) => x.merge(y),
                None => x,
            });
        }
        parts = next;
    }
    let total = parts.pop().expect("one chunk");
    let n = num_samples as f64;
    let standard_error = |mean: f64, sum_sq: f64| (((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) / n).sqrt();
    let z_score = |mean: f64, sum_sq: f64, expected: f64| {
        let se = standard_error(mean, sum_sq);
        let diff = (mean - expected).abs();
        if se < 1e-13 {
            if diff < 1e-10 { 0.0 } else { f64::INFINITY }
        } else {
            diff / se
        }
    };
    let mut worst: f64 = 0.0;
    let mut worst_abs: f64 = 0.0;
    let mut worst_entry = [0usize; 4];
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    let i = idx(a, b, c, e);
                    let mean = total.sum[i] / n;
                    let expected = haar_moment_closed_form(d, a, b, c, e);
                    let z = z_score(mean.re, total.sum_sq_re[i], expected).max(z_score(mean.im, total.sum_sq_im[i], 0.0));
                    worst_abs = worst_abs.max((mean - Complex64::new(expected, 0.0)).norm());
                    if z > worst {
                        worst = z;
                        worst_entry = [a, b, c, e];
                    }
                }
            }
        }
    }
    let entry = |a, b, c, e| (total.sum[idx(a, b, c, e)] / n).re;
    let entry_se = |a, b, c, e| {
        let i = idx(a, b, c, e);
        standard_error(total.sum[i].re / n, total.sum_sq_re[i])
    };
    let mut context = json!({
        "dim": d,
        "samples": num_samples,
        "max_abs_deviation": worst_abs,
        "worst_entry": worst_entry,
        "entry_1111": entry(0, 0, 0, 0),
        "se_1111": entry_se(0, 0, 0, 0),
        "expected_1111": haar_moment_closed_form(d, 0, 0, 0, 0),
    });
    if d >= 2 {
        context["entry_1212"] = json!(entry(0, 1, 0, 1));
        context["se_1212"] = json!(entry_se(0, 1, 0, 1));
        context["expected_1212"] = json!(haar_moment_closed_form(d, 0, 1, 0, 1));
    }
    Ok(CheckReport::new("haar-moment", worst, SIGMA_GATE, context))
}

/// Explicit reconstructions in `num_bases` random bases must coincide.
pub fn check_basis_independence(
    oracle: &dyn ValuationOracle,
    num_bases: usize,
    seed: u64,
    tol: f64,
) -> Result<CheckReport> {
    if num_bases < 2 {
        return Err(GleasonError::Parse(format!("need at least 2 bases, got {num_bases}")));
    }
    let d = oracle.dim();
    let estimates = (0..num_bases as u64)
        .map(|k| {
            let s = derive_seed(seed, k);
            match oracle.field() {
                FieldMode::Complex => explicit_reconstruct(oracle, &haar_random_basis(d, s)?),
                FieldMode::Real => explicit_reconstruct_real(oracle, &haar_random_basis_real(d, s)?),
            }
            .map(|r| r.estimate)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for (i, a) in estimates.iter().enumerate() {
        for b in &estimates[i + 1..] {
            worst = worst.max(frobenius_distance(a, b));
        }
    }
    Ok(CheckReport::new("basis-independence", worst, tol, json!({"dim": d, "bases": num_bases})))
}

/// For the eigenbasis `Q` of `rho` and any basis `P`:
/// `v(p_j) = sum_i v(q_i) S_ij` with `S` doubly stochastic.
pub fn check_transition_relation(rho: &DensityMatrix, p_basis: &OrthonormalBasis, tol: f64) -> Result<CheckReport> {
    let oracle = ExactOracle::new(rho.clone());
    let q_basis = OrthonormalBasis::new(rho.spectral().eigenvectors)?;
    let s = transition_matrix(&q_basis, p_basis)?;
    let vq = q_basis.vectors().iter().map(|n| oracle.value(n)).collect::<Result<Vec<_>>>()?;
    let predicted = s.push_forward(&vq);
    let mut relation: f64 = 0.0;
    for (n, w) in p_basis.vectors().iter().zip(&predicted) {
        relation = relation.max((oracle.value(n)? - w).abs());
    }
    let stochastic = check_unistochastic(&s, tol);
    Ok(CheckReport::new(
        "transition",
        relation.max(stochastic.deviation),
        tol,
        json!({"dim": rho.dim(), "relation_deviation": relation, "stochastic_deviation": stochastic.deviation}),
    ))
}
