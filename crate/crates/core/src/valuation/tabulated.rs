use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{check_query, QueryCounter, ValuationOracle};
use crate::error::{GleasonError, Result};
use crate::hilbert::{FieldMode, UnitVector};
use crate::serial::{vector_from_value, VectorJson};

/// Two rays match when their phase-aligned difference is below this.
pub const RAY_MATCH_TOL: f64 = 1e-9;

/// One `{"vector": {...}, "value": p}` entry of a tabulated-oracle file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableRecord {
    pub vector: VectorJson,
    pub value: f64,
}

/// Valuation given by a finite lookup table of rays.
///
/// Queries for rays absent from the table fail with
/// [`GleasonError::TableMiss`].
#[derive(Debug)]
pub struct TabulatedOracle {
    dim: usize,
    field: FieldMode,
    entries: Vec<(UnitVector, f64)>,
    counter: QueryCounter,
}

impl TabulatedOracle {
    pub fn new(entries: Vec<(UnitVector, f64)>) -> Result<Self> {
        let dim = entries.first().ok_or(GleasonError::EmptyInput)?.0.dim();
        for (n, p) in &entries {
            if n.dim() != dim {
                return Err(GleasonError::DimensionMismatch { expected: dim, found: n.dim() });
            }
            if !(0.0..=1.0).contains(p) {
                return Err(GleasonError::InvalidValuation { value: *p });
            }
        }
        let field = if entries.iter().all(|(n, _)| n.is_real()) { FieldMode::Real } else { FieldMode::Complex };
        Ok(Self { dim, field, entries, counter: QueryCounter::default() })
    }

    /// Records `source`'s value on each of `rays`.
    pub fn tabulate(source: &dyn ValuationOracle, rays: &[UnitVector]) -> Result<Self> {
        let entries = rays.iter().map(|n| Ok((n.clone(), source.value(n)?))).collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    /// Runs `run` against `source`, recording every distinct ray it queries.
    pub fn record<T>(
        source: &dyn ValuationOracle,
        run: impl FnOnce(&dyn ValuationOracle) -> Result<T>,
    ) -> Result<(T, Self)> {
        let recorder = Recorder { source, seen: Mutex::new(Vec::new()) };
        let out = run(&recorder)?;
        let entries = recorder.seen.into_inner().expect("recorder lock");
        Ok((out, Self::new(entries)?))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let records: Vec<Value> = serde_json::from_str(s)?;
        let entries = records
            .iter()
            .map(|r| {
                let v = vector_from_value(r.get("vector").ok_or_else(|| GleasonError::Parse("record without vector".into()))?)?;
                let value = r
                    .get("value")
                    .and_then(Value::as_f64)
                    .ok_or_else(|| GleasonError::Parse("record without numeric value".into()))?;
                let norm = v.norm();
                if (norm - 1.0).abs() > RAY_MATCH_TOL {
                    return Err(GleasonError::NotNormalized { norm });
                }
                Ok((UnitVector::normalize(&v)?, value))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn to_json(&self) -> String {
        let records: Vec<TableRecord> = self
            .entries
            .iter()
            .map(|(n, p)| TableRecord { vector: VectorJson::from(n.as_vector()), value: *p })
            .collect();
        serde_json::to_string_pretty(&records).expect("table serializes")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl ValuationOracle for TabulatedOracle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn field(&self) -> FieldMode {
        self.field
    }

    fn value(&self, n: &UnitVector) -> Result<f64> {
        check_query(self.dim, self.field, n)?;
        self.counter.tick();
        self.entries
            .iter()
            .find(|(m, _)| m.ray_distance(n) <= RAY_MATCH_TOL)
            .map(|(_, p)| *p)
            .ok_or_else(|| GleasonError::TableMiss { vector: n.clone() })
    }

    fn query_count(&self) -> u64 {
        self.counter.get()
    }
}

struct Recorder<'a> {
    source: &'a dyn ValuationOracle,
    seen: Mutex<Vec<(UnitVector, f64)>>,
}

impl ValuationOracle for Recorder<'_> {
    fn dim(&self) -> usize {
        self.source.dim()
    }

    fn field(&self) -> FieldMode {
        self.source.field()
    }

    fn value(&self, n: &UnitVector) -> Result<f64> {
        let p = self.source.value(n)?;
        let mut seen = self.seen.lock().expect("recorder lock");
        if !seen.iter().any(|(m, _)| m.ray_distance(n) <= RAY_MATCH_TOL) {
            seen.push((n.clone(), p));
        }
        Ok(p)
    }

    fn query_count(&self) -> u64 {
        self.source.query_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{c, haar_random_basis, random_density_matrix, CVector};
    use crate::valuation::ExactOracle;

    #[test]
    fn lookup_matches_up_to_phase() {
        let exact = ExactOracle::new(random_density_matrix(3, 2, 8).unwrap());
        let rays = haar_random_basis(3, 9).unwrap().vectors().to_vec();
        let table = TabulatedOracle::tabulate(&exact, &rays).unwrap();
        assert_eq!(table.field(), FieldMode::Complex);
        let rotated = UnitVector::new(rays[1].as_vector().map(|z| z * c(0.0, 1.0))).unwrap();
        assert_eq!(table.value(&rotated).unwrap(), exact.value(&rays[1]).unwrap());
    }

    #[test]
    fn miss_is_an_error() {
        let table = TabulatedOracle::new(vec![(UnitVector::basis(2, 0), 0.7)]).unwrap();
        assert!(matches!(table.value(&UnitVector::basis(2, 1)), Err(GleasonError::TableMiss { .. })));
        assert_eq!(table.field(), FieldMode::Real);
    }

    #[test]
    fn json_round_trip() {
        let exact = ExactOracle::new(random_density_matrix(2, 2, 1).unwrap());
        let rays = haar_random_basis(2, 2).unwrap().vectors().to_vec();
        let table = TabulatedOracle::tabulate(&exact, &rays).unwrap();
        let back = TabulatedOracle::from_json(&table.to_json()).unwrap();
        for n in &rays {
            assert_eq!(back.value(n).unwrap(), table.value(n).unwrap());
        }
    }

    #[test]
    fn file_format_parses() {
        let s = r#"[
            {"vector": {"dim": 2, "re": [1.0, 0.0], "im": [0.0, 0.0]}, "value": 0.25},
            {"vector": {"dim": 2, "re": [[0.0, 1.0]], "im": [[0.0, 0.0]]}, "value": 0.75}
        ]"#;
        let table = TabulatedOracle::from_json(s).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table.value(&UnitVector::basis(2, 1)).unwrap(), 0.75);
        // Within the matching tolerance.
        let near = CVector::from_vec(vec![c(1.0, 0.0), c(1e-10, 0.0)]);
        assert_eq!(table.value(&UnitVector::normalize(&near).unwrap()).unwrap(), 0.25);
    }

    #[test]
    fn invalid_tables_rejected() {
        let out_of_range = r#"[{"vector": {"dim": 1, "re": [1.0], "im": [0.0]}, "value": 1.5}]"#;
        assert!(matches!(TabulatedOracle::from_json(out_of_range), Err(GleasonError::InvalidValuation { .. })));
        let unnormalized = r#"[{"vector": {"dim": 2, "re": [1.0, 1.0], "im": [0.0, 0.0]}, "value": 0.5}]"#;
        assert!(matches!(TabulatedOracle::from_json(unnormalized), Err(GleasonError::NotNormalized { .. })));
        assert!(matches!(TabulatedOracle::from_json("[{]"), Err(GleasonError::Parse(_))));
    }

    #[test]
    fn recorded_table_replays_explicit_run() {
        use crate::reconstruct::explicit_reconstruct;
        use crate::hilbert::OrthonormalBasis;
        let exact = ExactOracle::new(random_density_matrix(3, 2, 4).unwrap());
        let basis = OrthonormalBasis::standard(3);
        let (direct, table) = TabulatedOracle::record(&exact, |o| explicit_reconstruct(o, &basis)).unwrap();
        assert_eq!(table.len(), 15);
        assert_eq!(table.field(), FieldMode::Complex);
        let replay = explicit_reconstruct(&TabulatedOracle::from_json(&table.to_json()).unwrap(), &basis).unwrap();
        assert_eq!(replay.estimate, direct.estimate);
    }
}
