//! Quantum-measurement coherence vs. incompatibility toolkit.
//!
//! The central objects are *coherence pattern matrices* (PSD, unit diagonal)
//! acting on observables by entry-wise (Hadamard) multiplication, and
//! *incoherent observables* (diagonal POVMs). The crate decides when a
//! coherence pattern `C` still sustains measurement incompatibility with a
//! given incoherent observable `P`:
//!
//! - entry-wise coherence and Hellinger-distance functionals ([`povm`]),
//! - closed-form witnesses and Schur-product certificates ([`witness`]),
//! - a feasibility solver for the genuinely-incoherent-instrument (GII)
//!   constraint system, with certified verdicts ([`gii`]),
//! - symmetry reduction of the problem by the pattern's equivalence classes
//!   and permutation group ([`symmetry`]),
//! - closed-form model families: uniform/noisy-MUB coherence ([`uniform`]),
//!   the centrosymmetric 3-dimensional family ([`centro3`]) and the N-qubit
//!   collective spin-boson reduction ([`spinboson`]).
//!
//! The crate is `no_std`-compatible (requires `alloc`); enable the `libm`
//! feature for builds without `std`.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod centro3;
pub mod eigen;
pub mod error;
pub(crate) mod fmath;
pub mod gii;
pub mod matrix;
pub mod povm;
pub mod spinboson;
pub mod symmetry;
pub mod uniform;
pub mod witness;

pub use error::{CohError, Result};
pub use matrix::{C64, CoherenceMatrix, ComplexMatrix};

/// Relative tolerance for accepting a matrix as Hermitian.
pub const TOL_HERM: f64 = 1e-10;
/// Relative tolerance for eigendecomposition reconstruction / orthonormality.
pub const TOL_EIG: f64 = 1e-10;
/// Default relative slack for positive-semidefiniteness tests.
pub const PSD_SLACK: f64 = 1e-9;
/// Absolute per-entry tolerance for POVM normalisation and probability tables.
pub const TOL_POVM: f64 = 1e-9;
/// A witness pair counts as violated only beyond this excess.
pub const WITNESS_TOL: f64 = 1e-8;
/// Hellinger affinities below this are treated as exactly zero
/// (the structure matrix becomes inapplicable).
pub const D2_ONE_THRESHOLD: f64 = 1e-12;
/// Absolute tolerance deciding `|c_nm| = 1` when forming coherence classes.
pub const CLASS_TOL: f64 = 1e-9;
/// Largest dimension for which the symmetry group is found by brute force.
pub const DMAX_SYM: usize = 8;
