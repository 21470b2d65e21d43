//! Confusability graphs and multigraphs of quantum channels, quantum
//! multi-relations on pairs of block algebras, and synthesis of completely
//! positive maps from symmetric decomposable multi-relations.

pub mod algebra;
pub mod channel;
pub mod confusability;
pub mod decomposable;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod multirelation;
pub mod selftest;
pub mod subspace;
pub mod tensor;
pub mod tolerance;

pub use algebra::{AlgebraElement, BlockAlgebra};
pub use error::{Axiom, Error, Result};
pub use subspace::OperatorSubspace;
pub use tensor::{CMatrix, CVector, LegShape};
pub use tolerance::Tolerances;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
pub struct ReadmeDoctests;
