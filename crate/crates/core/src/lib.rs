//! Exact-arithmetic toolkit for a family of affine toric varieties that are
//! defined set-theoretically by codim + 1 binomial equations.
//!
//! The crate constructs the varieties from their integer parameters, emits
//! the n+1 defining binomials, computes the full toric ideal via lattice
//! kernels and saturation, and machine-checks the set-theoretic definition
//! through Groebner radical-membership certificates, exhaustive finite-field
//! point enumeration, and constructive root-of-unity point lifting.

pub mod exactmath;
pub mod family;
pub mod groebner;
pub mod lattice;
pub mod polyring;
pub mod toricideal;
pub mod verify;

pub use exactmath::{FieldElement, Int, PrimeField, Rat};
pub use family::{EquationId, EquationSet, FamilyParams, PrimeWitness};
pub use groebner::{BuchbergerConfig, Ideal};
pub use lattice::{IntMatrix, LatticeBasis};
pub use polyring::{BinomialVector, CoeffField, Monomial, Polynomial, Ring, TermOrder};
pub use toricideal::ToricIdealResult;
