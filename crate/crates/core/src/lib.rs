//! Reconstruction of a density matrix from a probability valuation on rays.
//!
//! A valuation `v(n)` assigns a probability to every unit vector `n` of a
//! finite-dimensional Hilbert space, additively over orthogonal families and
//! normalized to one on any orthonormal basis. Such a valuation is always of
//! the form `v(n) = <n|rho|n>` for a density matrix `rho`, and this crate
//! recovers `rho` by querying `v` as a black box:
//!
//! * [`reconstruct::explicit_reconstruct`]: polarization on `2d^2 - d` rays
//!   (or `d^2` rays over the reals).
//! * [`reconstruct::implicit_reconstruct`]: nested maximization of `v` over
//!   shrinking spheres, recovering the eigenbasis.
//! * [`reconstruct::haar_average_reconstruct`]: `(d+1) <rho_P> - I` averaged
//!   over Haar-random decoherence bases.
//! * [`reconstruct::pauli_reconstruct_2d`]: Bloch-vector form for qubits.
//!
//! Methods are also available by name through [`reconstruct::Registry`].

pub mod cli;
pub mod error;
pub mod hilbert;
pub mod serial;
pub mod valuation;
pub mod reconstruct;
pub mod verify;

pub use error::{GleasonError, Result};
pub use hilbert::{
    CMatrix, CVector, DensityMatrix, FieldMode, OrthonormalBasis, Projector, SpectralDecomposition,
    Subspace, UnitVector,
};
pub use reconstruct::{ReconstructionReport, Reconstructor, Registry};
pub use valuation::{ExactOracle, NoisyOracle, TabulatedOracle, ValuationOracle};
