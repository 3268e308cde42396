use std::ops::Deref;

use super::matrix::Matrix;
use super::scalar::Scalar;
use super::MatError;

/// A Hermitian idempotent matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Projection<S: Scalar>(Matrix<S>);

impl<S: Scalar> Projection<S> {
    /// Validates `p² = p` and `p* = p` (literally on the exact backend, within ε on float).
    pub fn new(p: Matrix<S>) -> Result<Self, MatError> {
        let scale = p.max_abs().max(1.0);
        let idem = &(&p * &p) - &p;
        let herm = &p.adjoint() - &p;
        if !idem.is_negligible(scale) || !herm.is_negligible(scale) {
            return Err(MatError::NotProjection {
                residual: idem.frobenius_norm().max(herm.frobenius_norm()),
            });
        }
        Ok(Projection(p))
    }

    pub(crate) fn new_unchecked(p: Matrix<S>) -> Self {
        Projection(p)
    }

    pub fn zero(n: usize) -> Self {
        Projection(Matrix::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        Projection(Matrix::identity(n))
    }

    /// Diagonal projection `Σ_{k ∈ indices} e_kk` (0-based).
    pub fn coordinate(n: usize, indices: &[usize]) -> Self {
        let mut m = Matrix::zeros(n);
        for &k in indices {
            m[(k, k)] = S::one();
        }
        Projection(m)
    }

    /// `v v* / (v* v)` for a nonzero column vector.
    pub fn rank_one(v: &[S]) -> Result<Self, MatError> {
        let norm2 = v.iter().fold(S::zero(), |acc, x| acc + x.conj() * x.clone());
        if norm2.is_zero() {
            return Err(MatError::Singular);
        }
        let n = v.len();
        Ok(Projection(Matrix::from_fn(n, |i, j| {
            v[i].clone() * v[j].conj() / norm2.clone()
        })))
    }

    pub fn complement(&self) -> Self {
        Projection(&Matrix::identity(self.0.n()) - &self.0)
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.0
    }

    /// `trace(p)`, rounded to the nearest integer.
    pub fn rank(&self) -> usize {
        self.0.trace().to_c64().re.round().max(0.0) as usize
    }

    pub fn is_orthogonal_to(&self, other: &Self) -> bool {
        (&self.0 * &other.0).is_negligible(1.0)
    }

    /// When `p` is diagonal with 0/1 entries, the indices of its support.
    pub fn coordinate_support(&self) -> Option<Vec<usize>> {
        let n = self.0.n();
        let mut support = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let x = &self.0[(i, j)];
                if i != j && *x != S::zero() {
                    return None;
                }
            }
            let d = &self.0[(i, i)];
            if *d == S::one() {
                support.push(i);
            } else if *d != S::zero() {
                return None;
            }
        }
        Some(support)
    }
}

impl<S: Scalar> Deref for Projection<S> {
    type Target = Matrix<S>;
    fn deref(&self) -> &Matrix<S> {
        &self.0
    }
}

/// `n²` projections spanning `M_n` over ℂ (and `(M_n)_sa` over ℝ):
/// `p_i`, then `½(p_i + p_j + e_ij + e_ji)` and `½(p_i + p_j − i·e_ij + i·e_ji)` for `i < j`.
pub fn projection_spanning_basis<S: Scalar>(n: usize) -> Vec<Projection<S>> {
    let half = S::from_ratio(1, 2);
    let mut out: Vec<Projection<S>> = (0..n).map(|i| Projection::coordinate(n, &[i])).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut m = Matrix::zeros(n);
            m[(i, i)] = half.clone();
            m[(j, j)] = half.clone();
            m[(i, j)] = half.clone();
            m[(j, i)] = half.clone();
            out.push(Projection(m));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut m = Matrix::zeros(n);
            m[(i, i)] = half.clone();
            m[(j, j)] = half.clone();
            m[(i, j)] = -(half.clone() * S::i());
            m[(j, i)] = half.clone() * S::i();
            out.push(Projection(m));
        }
    }
    out
}

/// Human-readable label for the `k`-th element of [`projection_spanning_basis`] (1-based indices).
pub fn spanning_basis_label(n: usize, k: usize) -> String {
    if k < n {
        return format!("p_{}", k + 1);
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let m = pairs.len();
    if k < n + m {
        let (i, j) = pairs[k - n];
        format!("(p_{a}+p_{b}+e_{a}{b}+e_{b}{a})/2", a = i + 1, b = j + 1)
    } else {
        let (i, j) = pairs[k - n - m];
        format!("(p_{a}+p_{b}-i*e_{a}{b}+i*e_{b}{a})/2", a = i + 1, b = j + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::linsolve::rank;
    use crate::matlin::{C64, CQ};

    fn basis_rank(n: usize) -> usize {
        let rows: Vec<Vec<CQ>> = projection_spanning_basis::<CQ>(n)
            .into_iter()
            .map(|p| p.into_matrix().into_vec())
            .collect();
        rank(&rows)
    }

    #[test]
    fn spanning_basis_n1() {
        let b = projection_spanning_basis::<CQ>(1);
        assert_eq!(b.len(), 1);
        assert_eq!(*b[0].matrix(), Matrix::identity(1));
    }

    #[test]
    fn spanning_basis_full_rank() {
        assert_eq!(basis_rank(2), 4);
        assert_eq!(basis_rank(3), 9);
        assert_eq!(basis_rank(4), 16);
    }

    #[test]
    fn spanning_basis_members_are_projections() {
        for n in 1..=4 {
            let b = projection_spanning_basis::<CQ>(n);
            assert_eq!(b.len(), n * n);
            for p in b {
                Projection::new(p.into_matrix()).unwrap();
            }
        }
    }

    #[test]
    fn rejects_non_projection() {
        let m = Matrix::<C64>::scalar(2, C64::new(2.0, 0.0));
        assert!(matches!(Projection::new(m), Err(MatError::NotProjection { .. })));
    }

    #[test]
    fn rank_one_projection() {
        let v = [CQ::from_i64(1), CQ::i(), CQ::from_i64(2)];
        let p = Projection::rank_one(&v).unwrap();
        Projection::new(p.matrix().clone()).unwrap();
        assert_eq!(p.rank(), 1);
    }

    #[test]
    fn coordinate_support_detection() {
        let p = Projection::<CQ>::coordinate(4, &[1, 3]);
        assert_eq!(p.coordinate_support(), Some(vec![1, 3]));
        let q = Projection::rank_one(&[CQ::one(), CQ::one()]).unwrap();
        assert_eq!(q.coordinate_support(), None);
    }

    #[test]
    fn labels() {
        assert_eq!(spanning_basis_label(2, 0), "p_1");
        assert_eq!(spanning_basis_label(2, 2), "(p_1+p_2+e_12+e_21)/2");
        assert_eq!(spanning_basis_label(2, 3), "(p_1+p_2-i*e_12+i*e_21)/2");
    }
}
