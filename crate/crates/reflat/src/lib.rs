//! Exact-arithmetic toolkit for classifying rank-3 reflective lattices over
//! the ring of integers of a real quadratic field (primarily Z[√2]).
//!
//! The pipeline: enumerate candidate root configurations from good
//! factorizations, compute reflection-stable enlargements, filter to strongly
//! squarefree lattices, then decide reflectivity by "walking" the chamber
//! boundary with exact nearest-translate computations and restricted batch
//! searches, resolving stragglers with trace-polynomial certifications.

pub mod dataset;
pub mod endgame;
pub mod enumerate;
pub mod hypgeom;
pub mod lattice;
pub mod linalg;
pub mod qring;
pub mod walk;

pub use lattice::{DiscriminantModule, Enlargement, GramLattice, HullQuotient, LatticeError};
pub use linalg::{FMatrix, FVec};
pub use qring::{FElem, FieldDesc, OElem, QringError, Rat};
