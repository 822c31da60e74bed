//! Bratteli diagrams, their full groups, invariant measures on path spaces,
//! and the characters `χ(g) = ∏ μ_i(Fix g)^{α_i}` of those groups, computed in
//! exact rational arithmetic.

pub mod character;
pub mod clopen;
pub mod constructions;
pub mod diagram;
pub mod error;
pub mod files;
pub mod group;
pub mod matrix;
pub mod measure;
pub mod perm;
pub mod rperm;
pub mod value;

pub use character::{Alpha, CharacterSpec, PsdVerdict};
pub use clopen::{BoolOp, ClopenSet, Halving};
pub use diagram::{BratteliDiagram, Cuts, Edge, EvenTelescoping, Simplicity, Tail};
pub use error::{Error, Result};
pub use group::{Conjugacy, CycleData, GroupElement};
pub use matrix::IntMatrix;
pub use measure::InvariantMeasure;
pub use perm::Perm;
pub use value::{Rational, Value};
