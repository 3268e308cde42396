//! Recovering the element `z` of an inner derivation `x ↦ [z,x]` from the
//! values of a map on projections and matrix units.

mod constructive;
mod least_squares;
mod m2;
mod verify;

pub use constructive::reconstruct_mn_constructive;
pub use least_squares::{reconstruct_least_squares, LeastSquares};
pub use m2::reconstruct_m2;
pub use verify::{inner_samples, verify_inner, InnerResidual, SampleResidual};

use serde::{Serialize, Serializer};
use serde_json::{json, Value};
use thiserror::Error;

use crate::derlab::{Oracle, OracleError};
use crate::matlin::{matrix_to_json, Matrix, Scalar};
use crate::report::Citation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReconstructError {
    #[error("not a weak-2-local derivation: {citation} fails at {point}: {detail}")]
    Violation { citation: Citation, point: String, detail: String },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{method} reconstruction needs M_{expected}, the oracle acts on M_{found}")]
    Dimension { method: &'static str, expected: String, found: usize },
    #[error("constructive reconstruction on M_n is only available in star mode; use least squares")]
    NeedsStar,
    #[error("least-squares system has rank {rank} of {expected}: the basis does not generate M_n")]
    RankDeficient { rank: usize, expected: usize },
}

impl ReconstructError {
    pub fn citation(&self) -> Option<Citation> {
        match self {
            ReconstructError::Violation { citation, .. } => Some(*citation),
            _ => None,
        }
    }
}

/// Coefficient `λ_k^(j)`, the `(j,k)` entry of `Δ(p_j)` (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct Lambda<S> {
    pub j: usize,
    pub k: usize,
    pub value: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResidual {
    pub point: String,
    pub residual: f64,
}

/// Everything the constructive reconstructions read and built on the way to `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionTrace<S: Scalar> {
    pub method: &'static str,
    pub lambdas: Vec<Lambda<S>>,
    /// `δ` with `(Δ - [z_0,·])(e_12) = δ e_12` (M_2 only).
    pub delta: Option<S>,
    /// `(k, γ_kn)` with `(Δ - [z_0,·])(e_kn) = γ_kn e_kn`.
    pub gammas: Vec<(usize, S)>,
    pub z0: Matrix<S>,
    pub z1: Matrix<S>,
    /// `z_0 + z_1` before trace normalization.
    pub raw: Matrix<S>,
    /// `‖Δ(x) - [z,x]‖` at every point the reconstruction consumed or checked.
    pub residuals: Vec<PointResidual>,
}

impl<S: Scalar> ReconstructionTrace<S> {
    fn new(method: &'static str, n: usize) -> Self {
        ReconstructionTrace {
            method,
            lambdas: Vec::new(),
            delta: None,
            gammas: Vec::new(),
            z0: Matrix::zeros(n),
            z1: Matrix::zeros(n),
            raw: Matrix::zeros(n),
            residuals: Vec::new(),
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "method": self.method,
            "lambdas": self.lambdas.iter().map(|l| json!({"j": l.j, "k": l.k, "value": l.value.to_json()})).collect::<Vec<_>>(),
            "delta": self.delta.as_ref().map(Scalar::to_json),
            "gammas": self.gammas.iter().map(|(k, g)| json!({"k": k, "value": g.to_json()})).collect::<Vec<_>>(),
            "z0": matrix_to_json(&self.z0),
            "z1": matrix_to_json(&self.z1),
            "raw": matrix_to_json(&self.raw),
            "residuals": self.residuals.iter().map(|r| json!({"point": r.point, "residual": r.residual})).collect::<Vec<_>>(),
        })
    }

    /// Evaluate `‖Δ(x) - [z,x]‖` at each labelled point and store it.
    fn record_residuals<O: Oracle<S> + ?Sized>(
        &mut self,
        oracle: &O,
        z: &Matrix<S>,
        points: &[(String, Matrix<S>)],
    ) -> Result<(), ReconstructError> {
        for (label, x) in points {
            let diff = &oracle.eval(x)? - &z.commutator(x).map_err(OracleError::from)?;
            self.residuals.push(PointResidual { point: label.clone(), residual: diff.frobenius_norm() });
        }
        Ok(())
    }
}

impl<S: Scalar> Serialize for ReconstructionTrace<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        self.to_json().serialize(serializer)
    }
}

fn violation(citation: Citation, point: impl Into<String>, detail: impl Into<String>) -> ReconstructError {
    ReconstructError::Violation { citation, point: point.into(), detail: detail.into() }
}

/// Entries of `m` outside `keep` that are not negligible, as `(row, col)` 1-based.
fn off_pattern<S: Scalar>(m: &Matrix<S>, keep: impl Fn(usize, usize) -> bool) -> Option<(usize, usize)> {
    let n = m.n();
    let scale = m.max_abs();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| !keep(i, j) && !m[(i, j)].negligible(scale))
        .map(|(i, j)| (i + 1, j + 1))
}
