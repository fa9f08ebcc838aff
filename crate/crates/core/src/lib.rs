//! Exact computations in Serre quotient categories of coherent modules on
//! affine charts over prime fields.

pub mod arith;
pub mod birgeom;
pub mod error;
pub mod fpmod;
pub mod limits;
pub mod matrix;
pub mod groebner;
mod polyparse;
pub mod random;
pub mod serrequot;

pub use arith::{FieldElem, Monomial, MonomialOrder, Poly, Ring};
pub use error::{Error, Result};
pub use groebner::{FreeVector, Ideal, Submodule};
pub use fpmod::{FPModule, ModuleMap};
pub use matrix::Matrix;
