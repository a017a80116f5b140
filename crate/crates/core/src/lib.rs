//! Engineered hopping lattices and exact transfer dynamics.
//!
//! Chains, 2D rectangles and 3D boxes with couplings `J * sqrt(j(M-j))/2`
//! behave as collections of commuting quasi-angular momenta, so the
//! single-particle propagator factorizes into Wigner small-d matrices and
//! the evolution at `t0 = pi/J` mirrors every site. This crate builds those
//! Hamiltonians, evolves single-particle and fixed-number Fock states
//! (bosons, spinless and spin-1/2 fermions, hard-core bosons) exactly, and
//! checks the analytic results against brute-force eigendecomposition.

pub mod dressing;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod lattice;
pub mod operator;
pub mod parallel;
pub mod verify;
pub mod wigner;

pub use error::{PftError, Result};
pub use lattice::{
    coupling_profile, magnetic_number, mirror_site, pst_time, signature, CouplingProfile, HalfInt,
    LatticeDims, SignaturePhase, SiteIndex,
};
pub use operator::{commutator_norm, propagator_numeric, DenseOperator, Role};
pub use parallel::ExecMode;
