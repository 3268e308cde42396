use serde::Serialize;

use super::ReconstructError;
use crate::derlab::{Oracle, OracleError};
use crate::matlin::linsolve::{echelon, solve_square, Dense};
use crate::matlin::{matrix_units, skew_hermitian_basis, Matrix, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeastSquares<S: Scalar> {
    pub z: Matrix<S>,
    /// `(Σ_b ‖Δ(b) - [z,b]‖²)^(1/2)` at the minimizer.
    pub residual: f64,
    pub points: usize,
}

/// Minimize `Σ_b ‖Δ(b) - [z,b]‖²` over `z` with `trace z = 0` (and `z* = -z`
/// when `star`), through the normal equations.
///
/// In star mode `z` is written over the real skew-Hermitian basis, so the
/// normal matrix is the real part of the complex one.
pub fn reconstruct_least_squares<S: Scalar, O: Oracle<S> + ?Sized>(
    oracle: &O,
    basis: &[Matrix<S>],
    star: bool,
) -> Result<LeastSquares<S>, ReconstructError> {
    let n = oracle.dim();
    let params: Vec<Matrix<S>> = if star {
        skew_hermitian_basis(n).into_iter().map(|(m, _)| m).collect()
    } else {
        matrix_units(n)
    };
    let k = params.len();
    let mut gram = Dense::<S>::zeros(k, k);
    let mut rhs = vec![S::zero(); k];

    let mut images = Vec::with_capacity(basis.len());
    for b in basis {
        let y = oracle.eval(b)?;
        let cols: Vec<Matrix<S>> =
            params.iter().map(|p| p.commutator(b)).collect::<Result<_, _>>().map_err(OracleError::from)?;
        for r in 0..n * n {
            let (i, j) = (r / n, r % n);
            let nz: Vec<(usize, &S)> =
                cols.iter().enumerate().map(|(c, m)| (c, &m[(i, j)])).filter(|(_, v)| !v.is_zero()).collect();
            for &(a, va) in &nz {
                let ca = va.conj();
                for &(c, vc) in &nz {
                    let g = gram.at(a, c).clone() + ca.clone() * vc.clone();
                    *gram.at_mut(a, c) = g;
                }
                rhs[a] = rhs[a].clone() + ca * y[(i, j)].clone();
            }
        }
        images.push(y);
    }
    let traces: Vec<S> = params.iter().map(Matrix::trace).collect();
    for a in 0..k {
        for c in 0..k {
            let g = gram.at(a, c).clone() + traces[a].conj() * traces[c].clone();
            *gram.at_mut(a, c) = g;
        }
    }
    if star {
        for v in gram.data.iter_mut().chain(rhs.iter_mut()) {
            *v = v.re();
        }
    }

    let t = solve_square(&gram, &rhs)
        .map_err(|_| ReconstructError::RankDeficient { rank: echelon(&gram).rank(), expected: k })?;
    let z = params
        .iter()
        .zip(&t)
        .fold(Matrix::zeros(n), |acc, (p, c)| &acc + &p.scale(c))
        .trace_normalized();

    let mut sum_sq = 0.0;
    for (b, y) in basis.iter().zip(&images) {
        let d = (y - &z.commutator(b).map_err(OracleError::from)?).frobenius_norm();
        sum_sq += d * d;
    }
    Ok(LeastSquares { z, residual: sum_sq.sqrt(), points: basis.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derlab::{MapOracle, Perturbation};
    use crate::matlin::random::{random_matrix, random_trace_zero_skew};
    use crate::matlin::{C64, CQ};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recovers_inner_modulo_center_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for n in 1..=4 {
            let z = random_matrix::<CQ, _>(n, &mut rng);
            let fit = reconstruct_least_squares(&MapOracle::inner(z.clone()), &matrix_units(n), false).unwrap();
            assert_eq!(fit.z, z.trace_normalized());
            assert_eq!(fit.residual, 0.0);
        }
    }

    #[test]
    fn star_parametrization() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let z = random_trace_zero_skew::<CQ, _>(3, &mut rng);
        let fit = reconstruct_least_squares(&MapOracle::inner_star(z.clone()).unwrap(), &matrix_units(3), true).unwrap();
        assert_eq!(fit.z, z);
        let fz = random_trace_zero_skew::<C64, _>(5, &mut rng);
        let ffit = reconstruct_least_squares(&MapOracle::inner_star(fz.clone()).unwrap(), &matrix_units(5), true).unwrap();
        assert!((&ffit.z - &fz).frobenius_norm() < 1e-10);
    }

    #[test]
    fn constant_offset_leaves_a_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let z = random_matrix::<C64, _>(3, &mut rng);
        let c = Matrix::<C64>::unit(3, 0, 0);
        let o = MapOracle::perturbed(z, C64::new(1.0, 0.0), Perturbation::Constant(c));
        let fit = reconstruct_least_squares(&o, &matrix_units(3), false).unwrap();
        assert!(fit.residual > 0.1, "{}", fit.residual);
    }

    #[test]
    fn zero_map_gives_zero() {
        let fit = reconstruct_least_squares(&MapOracle::<CQ>::Zero { n: 3 }, &matrix_units(3), false).unwrap();
        assert_eq!(fit.z, Matrix::zeros(3));
    }

    #[test]
    fn thin_basis_is_rank_deficient() {
        let basis = vec![Matrix::<CQ>::unit(3, 0, 0)];
        let err = reconstruct_least_squares(&MapOracle::inner(Matrix::zeros(3)), &basis, false).unwrap_err();
        assert!(matches!(err, ReconstructError::RankDeficient { expected: 9, .. }));
    }
}
