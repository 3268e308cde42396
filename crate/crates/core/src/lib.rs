//! Weak-2-local derivations on matrix algebras.
//!
//! The crate decides the two-point feasibility condition exactly, certifies
//! black-box maps on `M_n`, reconstructs the implementing element `z` of an
//! inner derivation `x ↦ [z, x]` from local data, and runs the
//! projection-measure linear extension on `M_n` and on block algebras
//! `M_{n_1} ⊕ … ⊕ M_{n_m}`.

pub mod blockalg;
pub mod cli;
pub mod derlab;
pub mod matlin;
pub mod measure;
pub mod reconstruct;
pub mod report;

pub use matlin::{Backend, Functional, MatError, Matrix, Projection, Scalar, C64, CQ};
