use super::matrix::Matrix;
use super::scalar::Scalar;

/// Real basis of the skew-Hermitian matrices, orthogonal for `Re trace(x*y)`:
/// `i·e_kk`, then `e_kl − e_lk` and `i·(e_kl + e_lk)` for `k < l`.
///
/// Each element is paired with its squared Frobenius norm (1 or 2), so that
/// `‖Σ t_k B_k‖² = Σ w_k t_k²` for real `t`.
pub fn skew_hermitian_basis<S: Scalar>(n: usize) -> Vec<(Matrix<S>, S)> {
    let mut out = Vec::with_capacity(n * n);
    for k in 0..n {
        out.push((Matrix::unit(n, k, k).scale(&S::i()), S::one()));
    }
    for k in 0..n {
        for l in (k + 1)..n {
            let mut a = Matrix::zeros(n);
            a[(k, l)] = S::one();
            a[(l, k)] = -S::one();
            out.push((a, S::from_i64(2)));
            let mut b = Matrix::zeros(n);
            b[(k, l)] = S::i();
            b[(l, k)] = S::i();
            out.push((b, S::from_i64(2)));
        }
    }
    out
}

/// The squared norms recorded by [`skew_hermitian_basis`], without building the basis.
pub fn skew_hermitian_weights<S: Scalar>(n: usize) -> Vec<S> {
    let mut out = vec![S::one(); n];
    out.resize(n * n, S::from_i64(2));
    out
}

/// `trace(B_k·c)` for every element `B_k` of [`skew_hermitian_basis`], read off the entries of `c`.
pub fn skew_pairings<S: Scalar>(c: &Matrix<S>) -> Vec<S> {
    let n = c.n();
    let mut out = Vec::with_capacity(n * n);
    for k in 0..n {
        out.push(S::i() * c[(k, k)].clone());
    }
    for k in 0..n {
        for l in (k + 1)..n {
            out.push(c[(l, k)].clone() - c[(k, l)].clone());
            out.push(S::i() * (c[(l, k)].clone() + c[(k, l)].clone()));
        }
    }
    out
}

/// `Σ t_k B_k` over [`skew_hermitian_basis`] for real coordinates `t`.
pub fn skew_from_coords<S: Scalar>(n: usize, t: &[S]) -> Matrix<S> {
    assert_eq!(t.len(), n * n, "coordinate count");
    let mut z = Matrix::zeros(n);
    for k in 0..n {
        z[(k, k)] = S::i() * t[k].clone();
    }
    let mut idx = n;
    for k in 0..n {
        for l in (k + 1)..n {
            let (a, b) = (t[idx].clone(), t[idx + 1].clone());
            z[(k, l)] = a.clone() + S::i() * b.clone();
            z[(l, k)] = S::i() * b - a;
            idx += 2;
        }
    }
    z
}

/// Matrix units `e_ij` in row-major order.
pub fn matrix_units<S: Scalar>(n: usize) -> Vec<Matrix<S>> {
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| Matrix::unit(n, i, j))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::CQ;

    #[test]
    fn skew_basis_is_orthogonal_with_recorded_norms() {
        let b = skew_hermitian_basis::<CQ>(3);
        assert_eq!(b.len(), 9);
        for (i, (x, w)) in b.iter().enumerate() {
            assert_eq!(x.adjoint(), -x);
            for (j, (y, _)) in b.iter().enumerate() {
                let ip = x.inner(y).re();
                if i == j {
                    assert_eq!(ip, w.clone());
                } else {
                    assert_eq!(ip, CQ::zero());
                }
            }
        }
    }

    #[test]
    fn coordinate_shortcuts_follow_the_basis() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let c = crate::matlin::random::random_matrix::<CQ, _>(4, &mut rng);
        let basis = skew_hermitian_basis::<CQ>(4);
        let direct: Vec<CQ> = basis.iter().map(|(x, _)| (x * &c).trace()).collect();
        assert_eq!(skew_pairings(&c), direct);
        let weights: Vec<CQ> = basis.iter().map(|(_, w)| w.clone()).collect();
        assert_eq!(skew_hermitian_weights::<CQ>(4), weights);
        let t: Vec<CQ> = (0..16).map(|k| CQ::from_ratio(k as i64 - 7, 3)).collect();
        let mut z = Matrix::zeros(4);
        for ((x, _), tk) in basis.iter().zip(&t) {
            z.add_scaled(tk, x);
        }
        assert_eq!(skew_from_coords(4, &t), z);
    }
}
