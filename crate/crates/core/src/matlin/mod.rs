//! Dense complex matrix core over an exact Gaussian-rational or a float backend.

mod basis;
mod functional;
mod json;
pub mod linsolve;
mod matrix;
mod projection;
pub mod random;
mod scalar;
mod spectral;

pub use basis::{matrix_units, skew_from_coords, skew_hermitian_basis, skew_hermitian_weights, skew_pairings};
pub use functional::Functional;
pub use json::{matrix_from_json, matrix_to_json};
pub use matrix::Matrix;
pub use projection::{projection_spanning_basis, spanning_basis_label, Projection};
pub use scalar::{
    eps, format_scalar, merge_tolerance, parse_complex_literal, parse_rational_str, rational_string,
    set_eps, set_merge_tolerance, Backend, Scalar, C64, CQ,
};
pub use spectral::{spectral_resolution, SpectralResolution};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MatError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("rows must all have the matrix dimension")]
    NotSquare,
    #[error("expected {expected} entries, found {found}")]
    Length { expected: usize, found: usize },
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("matrix is not a projection (residual {residual:.3e})")]
    NotProjection { residual: f64 },
    #[error("singular system")]
    Singular,
    #[error("parse error: {0}")]
    Parse(String),
}
