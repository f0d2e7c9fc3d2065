use serde::{Deserialize, Serialize};

use crate::error::{GleasonError, Result};
use crate::hilbert::{frobenius_distance, nearest_density_matrix, CMatrix, CVector, DensityMatrix, UnitVector};
use crate::serial::{MatrixJson, VectorJson};

/// Coefficients of `rho = (c0 I + r_x X + r_y Y + r_z Z) / 2` in a qubit basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub r_x: f64,
    pub r_y: f64,
    pub r_z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.r_x * self.r_x + self.r_y * self.r_y + self.r_z * self.r_z).sqrt()
    }
}

/// A located extremum `v(n_i)` at `n_i`.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: UnitVector,
}

/// Output of a reconstruction run.
#[derive(Debug, Clone)]
pub struct ReconstructionReport {
    pub method: String,
    /// Raw reconstruction, before any repair.
    pub estimate: CMatrix,
    /// Frobenius-nearest density matrix to `estimate`.
    pub repaired: DensityMatrix,
    pub query_count: u64,
    /// `|estimate - repaired|_F`.
    pub residual: f64,
    pub bloch: Option<BlochVector>,
    /// Frobenius standard error of a Monte Carlo estimate.
    pub standard_error: Option<f64>,
    pub eigenpairs: Option<Vec<EigenPair>>,
}

impl ReconstructionReport {
    pub fn from_estimate(method: &str, estimate: CMatrix, query_count: u64) -> Result<Self> {
        let repaired = nearest_density_matrix(&estimate)?;
        let residual = frobenius_distance(&estimate, repaired.matrix());
        Ok(Self {
            method: method.to_string(),
            estimate,
            repaired,
            query_count,
            residual,
            bloch: None,
            standard_error: None,
            eigenpairs: None,
        })
    }

    /// The one-dimensional answer `[1]`, produced without any query.
    pub fn trivial(method: &str) -> Self {
        let one = DensityMatrix::maximally_mixed(1);
        Self {
            method: method.to_string(),
            estimate: one.matrix().clone(),
            repaired: one,
            query_count: 0,
            residual: 0.0,
            bloch: None,
            standard_error: None,
            eigenpairs: Some(vec![EigenPair { value: 1.0, vector: UnitVector::basis(1, 0) }]),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ReportJson::from(self)).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: ReportJson = serde_json::from_str(s)?;
        Self::try_from(j)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReportJson {
    pub method: String,
    pub query_count: u64,
    pub residual: f64,
    pub estimate: MatrixJson,
    pub repaired: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<BlochVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standard_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvectors: Option<Vec<VectorJson>>,
}

impl From<&ReconstructionReport> for ReportJson {
    fn from(r: &ReconstructionReport) -> Self {
        ReportJson {
            method: r.method.clone(),
            query_count: r.query_count,
            residual: r.residual,
            estimate: MatrixJson::from(&r.estimate),
            repaired: MatrixJson::from(r.repaired.matrix()),
            bloch: r.bloch,
            standard_error: r.standard_error,
            eigenvalues: r.eigenpairs.as_ref().map(|ps| ps.iter().map(|p| p.value).collect()),
            eigenvectors: r
                .eigenpairs
                .as_ref()
                .map(|ps| ps.iter().map(|p| VectorJson::from(p.vector.as_vector())).collect()),
        }
    }
}

impl TryFrom<ReportJson> for ReconstructionReport {
    type Error = GleasonError;

    fn try_from(j: ReportJson) -> Result<Self> {
        let eigenpairs = match (j.eigenvalues, j.eigenvectors) {
            (Some(values), Some(vectors)) if values.len() == vectors.len() => Some(
                values
                    .into_iter()
                    .zip(&vectors)
                    .map(|(value, v)| Ok(EigenPair { value, vector: UnitVector::new(CVector::try_from(v)?)? }))
                    .collect::<Result<Vec<_>>>()?,
            ),
            (None, None) => None,
            _ => return Err(GleasonError::Parse("eigenvalues and eigenvectors disagree".into())),
        };
        Ok(Self {
            method: j.method,
            estimate: CMatrix::try_from(&j.estimate)?,
            repaired: DensityMatrix::new(CMatrix::try_from(&j.repaired)?)?,
            query_count: j.query_count,
            residual: j.residual,
            bloch: j.bloch,
            standard_error: j.standard_error,
            eigenpairs,
        })
    }
}
