//! Finite-dimensional C*-algebras `M_{n_1} ⊕ … ⊕ M_{n_m}`, stored as
//! block-diagonal matrices in `M_N` with `N = Σ n_i`.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::derlab::{restrict_corner, CornerError, Oracle, OracleError};
use crate::matlin::random::random_hermitian;
use crate::matlin::{Matrix, Projection, Scalar};
use crate::reconstruct::{
    reconstruct_m2, reconstruct_mn_constructive, verify_inner, InnerResidual, ReconstructError, ReconstructionTrace,
};
use crate::report::{CheckBuilder, CheckOutcome, Citation, Status};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlockError {
    #[error("a block algebra needs at least one block, each of size at least 1")]
    Empty,
    #[error("entry ({row},{col}) lies outside the block diagonal of {dims:?}")]
    OffBlock { row: usize, col: usize, dims: Vec<usize> },
    #[error("matrix is {found}x{found}, the algebra lives in M_{expected}")]
    Dimension { expected: usize, found: usize },
    #[error("block reconstruction needs star mode")]
    NeedsStar,
    #[error("the map does not preserve blocks: {0}")]
    Preservation(String),
    #[error("block {index}: {source}")]
    Block { index: usize, source: ReconstructError },
    #[error("block {index}: {source}")]
    Corner { index: usize, source: CornerError },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockAlgebra {
    pub dims: Vec<usize>,
}

impl BlockAlgebra {
    pub fn new(dims: Vec<usize>) -> Result<Self, BlockError> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(BlockError::Empty);
        }
        Ok(BlockAlgebra { dims })
    }

    pub fn from_json(text: &str) -> Result<Self, BlockError> {
        let raw: BlockAlgebra = serde_json::from_str(text).map_err(|_| BlockError::Empty)?;
        BlockAlgebra::new(raw.dims)
    }

    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn offset(&self, block: usize) -> usize {
        self.dims[..block].iter().sum()
    }

    /// Block index of every row.
    pub fn owners(&self) -> Vec<usize> {
        self.dims.iter().enumerate().flat_map(|(k, &d)| std::iter::repeat_n(k, d)).collect()
    }

    pub fn central_projection<S: Scalar>(&self, block: usize) -> Projection<S> {
        let start = self.offset(block);
        let idx: Vec<usize> = (start..start + self.dims[block]).collect();
        Projection::coordinate(self.total(), &idx)
    }

    pub fn central_projections<S: Scalar>(&self) -> Vec<Projection<S>> {
        (0..self.dims.len()).map(|k| self.central_projection(k)).collect()
    }

    /// The block-mask check applied to every element entering the algebra.
    pub fn check_mask<S: Scalar>(&self, x: &Matrix<S>) -> Result<(), BlockError> {
        let n = self.total();
        if x.n() != n {
            return Err(BlockError::Dimension { expected: n, found: x.n() });
        }
        let owner = self.owners();
        for i in 0..n {
            for j in 0..n {
                if owner[i] != owner[j] && !x[(i, j)].is_zero() {
                    return Err(BlockError::OffBlock { row: i + 1, col: j + 1, dims: self.dims.clone() });
                }
            }
        }
        Ok(())
    }

    /// `x` placed in block `block` of the direct sum.
    pub fn embed<S: Scalar>(&self, block: usize, x: &Matrix<S>) -> Matrix<S> {
        let parts: Vec<Matrix<S>> = self
            .dims
            .iter()
            .enumerate()
            .map(|(k, &d)| if k == block { x.clone() } else { Matrix::zeros(d) })
            .collect();
        Matrix::direct_sum(&parts)
    }

    pub fn block_of<S: Scalar>(&self, x: &Matrix<S>, block: usize) -> Matrix<S> {
        x.principal_block(self.offset(block), self.dims[block])
    }

    /// Random self-adjoint element with one component per block.
    pub fn random_hermitian<S: Scalar, R: Rng + ?Sized>(&self, rng: &mut R) -> Matrix<S> {
        let parts: Vec<Matrix<S>> = self.dims.iter().map(|&d| random_hermitian(d, rng)).collect();
        Matrix::direct_sum(&parts)
    }

    fn block_pair(&self, row: usize, col: usize) -> (usize, usize) {
        let owner = self.owners();
        (owner[row] + 1, owner[col] + 1)
    }
}

/// `‖Δ(a) - q_iΔ(a)q_i‖` for `a` in each block: the matrix units of the block
/// and `samples` random self-adjoint elements.
pub fn check_block_preservation<S: Scalar, O: Oracle<S> + ?Sized, R: Rng + ?Sized>(
    oracle: &O,
    alg: &BlockAlgebra,
    samples: usize,
    rng: &mut R,
) -> CheckOutcome {
    let mut check = CheckBuilder::new("block_preservation", Citation::BlockPreservation);
    if oracle.dim() != alg.total() {
        check.inconclusive(|| format!("oracle acts on M_{}, the algebra lives in M_{}", oracle.dim(), alg.total()));
        return check.finish();
    }
    for (k, &d) in alg.dims.iter().enumerate() {
        let q = alg.central_projection::<S>(k);
        let mut inputs: Vec<(String, Matrix<S>)> = Vec::new();
        for i in 0..d {
            for j in 0..d {
                inputs.push((format!("e_{}_{} of block {}", i + 1, j + 1, k + 1), alg.embed(k, &Matrix::unit(d, i, j))));
            }
        }
        for s in 0..samples {
            let h = random_hermitian::<S, _>(d, rng);
            inputs.push((format!("random self-adjoint #{} of block {}: {h}", s + 1, k + 1), alg.embed(k, &h)));
        }
        for (label, a) in inputs {
            let image = match oracle.eval(&a) {
                Ok(v) => v,
                Err(e) => {
                    check.inconclusive(|| format!("{label}: {e}"));
                    continue;
                }
            };
            let leak = &image - &image.compress(q.matrix()).expect("same dimension");
            let ok = leak.is_negligible(image.max_abs());
            check.record(ok, leak.frobenius_norm(), || {
                let n = leak.n();
                let (r, c) = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .max_by(|&x, &y| leak[x].modulus().total_cmp(&leak[y].modulus()))
                    .unwrap_or((0, 0));
                let (bi, bj) = alg.block_pair(r, c);
                format!("{label}: Δ(a) leaks into block pair ({bi},{bj}) at entry ({},{})", r + 1, c + 1)
            });
        }
    }
    check.finish()
}

/// `‖Δ((a_i)) - Σ_i Δ(a_i)‖` for random self-adjoint block tuples.
pub fn check_block_additivity<S: Scalar, O: Oracle<S> + ?Sized, R: Rng + ?Sized>(
    oracle: &O,
    alg: &BlockAlgebra,
    samples: usize,
    rng: &mut R,
) -> CheckOutcome {
    let mut check = CheckBuilder::new("block_additivity", Citation::BlockAdditivity);
    for s in 0..samples {
        let a = alg.random_hermitian::<S, _>(rng);
        let parts: Vec<Matrix<S>> = (0..alg.dims.len()).map(|k| alg.embed(k, &alg.block_of(&a, k))).collect();
        let result = (|| -> Result<(Matrix<S>, Matrix<S>), OracleError> {
            let whole = oracle.eval(&a)?;
            let mut sum = Matrix::zeros(a.n());
            for p in &parts {
                sum = &sum + &oracle.eval(p)?;
            }
            Ok((whole, sum))
        })();
        match result {
            Ok((whole, sum)) => {
                let diff = &whole - &sum;
                let ok = diff.is_negligible(whole.max_abs().max(sum.max_abs()));
                check.record(ok, diff.frobenius_norm(), || format!("random tuple #{}: {a}", s + 1));
            }
            Err(e) => check.inconclusive(|| format!("random tuple #{}: {e}", s + 1)),
        }
    }
    check.finish()
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockReconstruction<S: Scalar> {
    /// Trace-zero `z_i` for every block.
    pub blocks: Vec<Matrix<S>>,
    pub traces: Vec<Option<ReconstructionTrace<S>>>,
    /// `z_1 ⊕ … ⊕ z_m`.
    pub z: Matrix<S>,
    pub preservation: CheckOutcome,
    pub verification: InnerResidual,
}

/// Reconstruct `z_i` on every block from the corner map `q_iΔq_i`, after
/// confirming that `Δ` preserves blocks. `M_1` blocks carry `z_i = 0`.
pub fn reconstruct_blockwise<S: Scalar, R: Rng + ?Sized>(
    oracle: Arc<dyn Oracle<S>>,
    alg: &BlockAlgebra,
    star: bool,
    samples: usize,
    rng: &mut R,
) -> Result<BlockReconstruction<S>, BlockError> {
    if !star {
        return Err(BlockError::NeedsStar);
    }
    if oracle.dim() != alg.total() {
        return Err(BlockError::Dimension { expected: alg.total(), found: oracle.dim() });
    }
    let preservation = check_block_preservation(oracle.as_ref(), alg, samples, rng);
    if preservation.status != Status::Pass {
        return Err(BlockError::Preservation(
            preservation.counterexample.clone().unwrap_or_else(|| preservation.status.to_string()),
        ));
    }

    let mut blocks = Vec::with_capacity(alg.dims.len());
    let mut traces = Vec::with_capacity(alg.dims.len());
    for (k, &d) in alg.dims.iter().enumerate() {
        let index = k + 1;
        if d == 1 {
            blocks.push(Matrix::zeros(1));
            traces.push(None);
            continue;
        }
        let q = alg.central_projection::<S>(k);
        let corner = restrict_corner(oracle.clone(), q.matrix()).map_err(|source| BlockError::Corner { index, source })?;
        let (z, trace) = if d == 2 {
            reconstruct_m2(&corner)
        } else {
            reconstruct_mn_constructive(&corner, true)
        }
        .map_err(|source| BlockError::Block { index, source })?;
        blocks.push(z);
        traces.push(Some(trace));
    }

    let z = Matrix::direct_sum(&blocks);
    let mut points: Vec<(String, Matrix<S>)> = Vec::new();
    for (k, &d) in alg.dims.iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                points.push((format!("e_{}_{} of block {}", i + 1, j + 1, k + 1), alg.embed(k, &Matrix::unit(d, i, j))));
            }
        }
    }
    for s in 0..samples {
        let h = alg.random_hermitian::<S, _>(rng);
        points.push((format!("random element #{}", s + 1), h));
    }
    let verification = verify_inner(oracle.as_ref(), &z, &points)?;
    Ok(BlockReconstruction { blocks, traces, z, preservation, verification })
}
