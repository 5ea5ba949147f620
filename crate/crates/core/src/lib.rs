//! Exact invariant theory of the jet reparametrization group `G_k`.
//!
//! Everything is computed over ℚ with arbitrary precision: the group of
//! truncated reparametrizations and its matrix realization, the Lie algebra
//! `g_k` with its adjoint structure, generic-stabilizer rank certificates for
//! the adjoint action and for the action on `k`-jets, the spaces `E_{k,m}` of
//! unipotent-invariant weighted-homogeneous polynomials, and the
//! Grassmannian/Plücker embedding of regular jets.

pub mod embed;
pub mod error;
pub mod group;
pub mod invariants;
pub mod jets;
pub mod lie;
pub mod linalg;
pub mod matrix;
pub mod poly;
pub mod rational;
pub mod sampling;

pub use error::{Error, Result};
pub use group::{GroupMatrix, Reparam};
pub use jets::Jet;
pub use lie::{LieElement, Subalgebra};
pub use matrix::ExactMatrix;
pub use poly::{Monomial, WeightedPoly};
pub use rational::Rational;
