use super::{check_query, QueryCounter, ValuationOracle};
use crate::error::{GleasonError, Result};
use crate::hilbert::{DensityMatrix, FieldMode, UnitVector};

/// `v(n) = <n|rho|n>` for a hidden density matrix.
#[derive(Debug)]
pub struct ExactOracle {
    state: DensityMatrix,
    field: FieldMode,
    counter: QueryCounter,
}

impl ExactOracle {
    /// Complex-mode oracle.
    pub fn new(state: DensityMatrix) -> Self {
        Self { state, field: FieldMode::Complex, counter: QueryCounter::default() }
    }

    /// Real-mode oracle; the state must have real entries.
    pub fn real(state: DensityMatrix) -> Result<Self> {
        if !state.is_real() {
            return Err(GleasonError::FieldMismatch { expected: FieldMode::Real, found: FieldMode::Complex });
        }
        Ok(Self { state, field: FieldMode::Real, counter: QueryCounter::default() })
    }

    pub fn with_field(state: DensityMatrix, field: FieldMode) -> Result<Self> {
        match field {
            FieldMode::Complex => Ok(Self::new(state)),
            FieldMode::Real => Self::real(state),
        }
    }

    /// The state behind the oracle, for test harnesses that grade results.
    pub fn hidden_state(&self) -> &DensityMatrix {
        &self.state
    }
}

impl ValuationOracle for ExactOracle {
    fn dim(&self) -> usize {
        self.state.dim()
    }

    fn field(&self) -> FieldMode {
        self.field
    }

    fn value(&self, n: &UnitVector) -> Result<f64> {
        check_query(self.dim(), self.field, n)?;
        self.counter.tick();
        Ok(self.state.expectation(n).clamp(0.0, 1.0))
    }

    fn query_count(&self) -> u64 {
        self.counter.get()
    }
}
