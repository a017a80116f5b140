//! Fixed-particle-number Fock sectors for bosons, spinless and spin-1/2
//! fermions and hard-core bosons.
//!
//! States of mixed particle number are direct sums of sector vectors and
//! each sector is evolved on its own. Fermionic signs come from counting
//! occupied modes ahead of the acted-on mode in the canonical order; no
//! Jordan-Wigner string is involved.

pub mod basis;
pub mod operators;
pub mod state;
pub mod transfer;

pub use basis::{
    apply_annihilation, apply_creation, enumerate_basis, FockBasis, FockModel, ModeIndex,
    OccupationState, Spin, Statistics,
};
pub use operators::{
    build_hopping, build_hopping_with_profiles, build_onsite_repulsion, build_quasi_l_fock,
    build_total_spin,
};
pub use state::{
    evolve_fock, state_from_function, Evolver, FockState, FockVector, Monomial, PolynomialFunction,
    Term,
};
pub use transfer::{
    best_transfer_fidelity, entangled_transfer_check, fit_transfer, function_transfer_check,
    hardcore_equivalence_check, no_init_transfer_check, qubit_transfer_check, TransferFit,
    TransferReport,
};
