//! Density-matrix reconstruction strategies.
//!
//! Every method is a free function taking a [`ValuationOracle`]; each is also
//! wrapped as a [`Reconstructor`] trait object and registered by name in a
//! [`Registry`], so callers (the CLI in particular) select methods at runtime.

mod explicit;
mod haar;
mod implicit;
mod pauli;
mod report;
mod transition;

use std::collections::BTreeMap;

use crate::error::{GleasonError, Result};
use crate::hilbert::{haar_random_basis, haar_random_basis_real, FieldMode, OrthonormalBasis};
use crate::valuation::ValuationOracle;

pub use explicit::{
    complex_query_budget, explicit_reconstruct, explicit_reconstruct_real, real_query_budget, EXPLICIT,
    EXPLICIT_REAL,
};
pub use haar::{haar_average_reconstruct, HAAR_AVERAGE};
pub use implicit::{implicit_reconstruct, ImplicitConfig, IMPLICIT};
pub use pauli::{bloch_matrix, pauli_reconstruct_2d, PAULI_2D};
pub use report::{BlochVector, EigenPair, ReconstructionReport, ReportJson};
pub use transition::{decohere, decohere_matrix, decohere_state, transition_matrix, TransitionMatrix};

/// A reconstruction method, configured up front and run against an oracle.
pub trait Reconstructor: Send + Sync {
    fn name(&self) -> &'static str;

    fn reconstruct(&self, oracle: &dyn ValuationOracle) -> Result<ReconstructionReport>;
}

/// Which basis a basis-dependent method should query in.
#[derive(Debug, Clone, Default)]
pub enum BasisChoice {
    #[default]
    Standard,
    /// Haar-random (orthogonal-group random in real mode) from a seed.
    Haar { seed: u64 },
    Fixed(OrthonormalBasis),
}

impl BasisChoice {
    pub fn resolve(&self, dim: usize, field: FieldMode) -> Result<OrthonormalBasis> {
        match self {
            BasisChoice::Standard => Ok(OrthonormalBasis::standard(dim)),
            BasisChoice::Haar { seed } => match field {
                FieldMode::Complex => haar_random_basis(dim, *seed),
                FieldMode::Real => haar_random_basis_real(dim, *seed),
            },
            BasisChoice::Fixed(b) => Ok(b.clone()),
        }
    }
}

/// Settings shared by all registered factories; each method reads the
/// fields it needs.
#[derive(Debug, Clone)]
pub struct MethodSettings {
    pub basis: BasisChoice,
    pub num_bases: usize,
    pub seed: u64,
    pub implicit: ImplicitConfig,
}

impl Default for MethodSettings {
    fn default() -> Self {
        Self { basis: BasisChoice::Standard, num_bases: 1000, seed: 0, implicit: ImplicitConfig::default() }
    }
}

pub struct Explicit {
    pub basis: BasisChoice,
}

impl Reconstructor for Explicit {
    fn name(&self) -> &'static str {
        EXPLICIT
    }

    fn reconstruct(&self, oracle: &dyn ValuationOracle) -> Result<ReconstructionReport> {
        explicit_reconstruct(oracle, &self.basis.resolve(oracle.dim(), FieldMode::Complex)?)
    }
}

pub struct ExplicitReal {
    pub basis: BasisChoice,
}

impl Reconstructor for ExplicitReal {
    fn name(&self) -> &'static str {
        EXPLICIT_REAL
    }

    fn reconstruct(&self, oracle: &dyn ValuationOracle) -> Result<ReconstructionReport> {
        explicit_reconstruct_real(oracle, &self.basis.resolve(oracle.dim(), FieldMode::Real)?)
    }
}

pub struct Implicit {
    pub config: ImplicitConfig,
}

impl Reconstructor for Implicit {
    fn name(&self) -> &'static str {
        IMPLICIT
    }

    fn reconstruct(&self, oracle: &dyn ValuationOracle) -> Result<ReconstructionReport> {
        implicit_reconstruct(oracle, &self.config)
    }
}

pub struct HaarAverage {
    pub num_bases: usize,
    pub seed: u64,
}

impl Reconstructor for HaarAverage {
    fn name(&self) -> &'static str {
        HAAR_AVERAGE
    }

    fn reconstruct(&self, oracle: &dyn ValuationOracle) -> Result<ReconstructionReport> {
        haar_average_reconstruct(oracle, self.num_bases, self.seed)
    }
}

pub struct Pauli2d {
    pub basis: BasisChoice,
}

impl Reconstructor for Pauli2d {
    fn name(&self) -> &'static str {
        PAULI_2D
    }

    fn reconstruct(&self, oracle: &dyn ValuationOracle) -> Result<ReconstructionReport> {
        pauli_reconstruct_2d(oracle, &self.basis.resolve(oracle.dim(), oracle.field())?)
    }
}

pub type Factory = Box<dyn Fn(&MethodSettings) -> Box<dyn Reconstructor> + Send + Sync>;

/// Name-indexed reconstruction methods.
pub struct Registry {
    factories: BTreeMap<&'static str, Factory>,
}

impl Registry {
    pub fn empty() -> Self {
        Self { factories: BTreeMap::new() }
    }

    pub fn register(&mut self, name: &'static str, factory: Factory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    pub fn build(&self, name: &str, settings: &MethodSettings) -> Result<Box<dyn Reconstructor>> {
        let factory = self.factories.get(name).ok_or_else(|| GleasonError::UnknownMethod(name.to_string()))?;
        Ok(factory(settings))
    }
}

impl Default for Registry {
    /// All built-in methods.
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(EXPLICIT, Box::new(|s| Box::new(Explicit { basis: s.basis.clone() })));
        r.register(EXPLICIT_REAL, Box::new(|s| Box::new(ExplicitReal { basis: s.basis.clone() })));
        r.register(IMPLICIT, Box::new(|s| Box::new(Implicit { config: ImplicitConfig { seed: s.seed, ..s.implicit } })));
        r.register(HAAR_AVERAGE, Box::new(|s| Box::new(HaarAverage { num_bases: s.num_bases, seed: s.seed })));
        r.register(PAULI_2D, Box::new(|s| Box::new(Pauli2d { basis: s.basis.clone() })));
        r
    }
}
