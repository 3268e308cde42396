use std::sync::Arc;

use thiserror::Error;

use super::oracle::{CornerFrame, MapOracle, Oracle};
use crate::matlin::{Backend, MatError, Matrix, Projection, Scalar, C64};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CornerError {
    #[error("not a projection: {0}")]
    NotProjection(MatError),
    #[error("projection acts on M_{found}, the oracle on M_{expected}")]
    Dimension { expected: usize, found: usize },
    #[error("an orthonormal frame of a non-diagonal projection needs square roots; use the float backend or a diagonal projection")]
    ExactNeedsDiagonal,
}

/// Orthonormal basis of the range of `p`, by Gram–Schmidt on its columns (float).
fn orthonormal_range(p: &Matrix<C64>, rank: usize) -> Vec<Vec<C64>> {
    let n = p.n();
    let mut frame: Vec<Vec<C64>> = Vec::with_capacity(rank);
    for j in 0..n {
        if frame.len() == rank {
            break;
        }
        let mut v: Vec<C64> = (0..n).map(|i| p[(i, j)]).collect();
        for _ in 0..2 {
            for w in &frame {
                let c: C64 = w.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, wi) in v.iter_mut().zip(w) {
                    *vi -= c * wi;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            frame.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    frame
}

/// The map `x ↦ pΔ(x)p` on the corner `pM_np`, written in an orthonormal
/// frame of the range of `p`, so it acts on `M_r` with `r = rank(p)`.
///
/// Diagonal projections use the coordinate frame on both backends.
pub fn restrict_corner<S: Scalar>(base: Arc<dyn Oracle<S>>, p: &Matrix<S>) -> Result<MapOracle<S>, CornerError> {
    let n = base.dim();
    if p.n() != n {
        return Err(CornerError::Dimension { expected: n, found: p.n() });
    }
    let p = Projection::new(p.clone()).map_err(CornerError::NotProjection)?;
    let frame = match p.coordinate_support() {
        Some(idx) => CornerFrame::Coordinates(idx),
        None => match S::BACKEND {
            Backend::Exact => return Err(CornerError::ExactNeedsDiagonal),
            Backend::Float => {
                let cols = orthonormal_range(&p.to_c64(), p.rank());
                CornerFrame::Columns(cols.into_iter().map(|v| v.into_iter().map(S::from_c64).collect()).collect())
            }
        },
    };
    if frame.rank() == 0 {
        return Ok(MapOracle::Zero { n: 0 });
    }
    Ok(MapOracle::Corner { base, frame })
}
