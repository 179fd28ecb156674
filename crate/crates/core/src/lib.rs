//! Reflectionless multi-soliton potentials built by Darboux-Crum chains,
//! the intertwiners between pairs of them, and the nonlinear superalgebras
//! those intertwiners generate.
//!
//! Operators are never expanded symbolically. They are kept as expression
//! trees of first-order factors and evaluated pointwise on Taylor jets.

pub mod diffop;
pub mod numkern;
pub mod pauli;
pub mod soliton;
pub mod susy;
pub mod verify;
