//! Exact one-magnon-sector reference: dense chain Hamiltonian, its spectral
//! decomposition, the OTOC from the operator definition, and `g2(0)`.

mod blockade;
mod crosscheck;
mod exact;
mod hamiltonian;

pub use blockade::{g2_zero, FockState, G2};
pub use crosscheck::{
    cross_validate, cross_validate_chain, CrossValidationReport, CROSS_VALIDATION_TOLERANCE, MAX_DENSE_SITES,
};
pub use exact::{asymmetry_probe, otoc_exact, AsymmetryProbe, ExactChain, OtocObservables};
pub use hamiltonian::{
    build_chain_hamiltonian, spectral_decompose, OneMagnonHamiltonian, SpectralDecomposition, MIN_CHAIN_SITES,
};
