//! Random generators shared by the batteries. All take a caller-owned rng.

use rand::Rng;

use super::matrix::Matrix;
use super::projection::Projection;
use super::scalar::{Scalar, C64};

pub fn random_matrix<S: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<S> {
    Matrix::from_fn(n, |_, _| S::sample(rng))
}

pub fn random_hermitian<S: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<S> {
    random_matrix::<S, _>(n, rng).real_part()
}

/// `(a − a*)/2` for a random `a`.
pub fn random_skew_hermitian<S: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<S> {
    let a = random_matrix::<S, _>(n, rng);
    (&a - &a.adjoint()).scale(&S::from_ratio(1, 2))
}

/// Skew-Hermitian with trace zero: the canonical generator of a `*`-derivation.
pub fn random_trace_zero_skew<S: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<S> {
    random_skew_hermitian::<S, _>(n, rng).trace_normalized()
}

/// Mutually orthogonal nonzero columns obtained by Gram–Schmidt on a random
/// matrix, left unnormalized so that the exact backend stays rational.
pub fn orthogonal_frame<S: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Vec<S>> {
    loop {
        let mut frame: Vec<Vec<S>> = Vec::with_capacity(n);
        let mut degenerate = false;
        for _ in 0..n {
            let mut v: Vec<S> = (0..n).map(|_| S::sample(rng)).collect();
            for w in &frame {
                let ww = dot(w, w);
                let coeff = dot(w, &v) / ww;
                for (vi, wi) in v.iter_mut().zip(w) {
                    *vi = vi.clone() - coeff.clone() * wi.clone();
                }
            }
            let scale = v.iter().map(|x| x.modulus()).fold(0.0, f64::max);
            if dot(&v, &v).negligible(1.0) || scale < 1e-6 {
                degenerate = true;
                break;
            }
            frame.push(v);
        }
        if !degenerate {
            return frame;
        }
    }
}

/// `Σ conj(u_i) v_i`
fn dot<S: Scalar>(u: &[S], v: &[S]) -> S {
    u.iter()
        .zip(v)
        .fold(S::zero(), |acc, (a, b)| acc + a.conj() * b.clone())
}

fn frame_projection<S: Scalar>(frame: &[Vec<S>], members: impl Iterator<Item = usize>, n: usize) -> Projection<S> {
    let mut m = Matrix::zeros(n);
    for k in members {
        let p = Projection::rank_one(&frame[k]).expect("nonzero frame vector");
        m = &m + p.matrix();
    }
    Projection::new_unchecked(m)
}

/// `U·diag(pattern)·U*` for a random unitary `U` (the orthonormalized random
/// frame): the sum of the rank-one frame projections selected by `pattern`.
pub fn projection_with_pattern<S: Scalar, R: Rng + ?Sized>(pattern: &[bool], rng: &mut R) -> Projection<S> {
    let n = pattern.len();
    let frame = orthogonal_frame::<S, _>(n, rng);
    frame_projection(&frame, (0..n).filter(|&k| pattern[k]), n)
}

/// Random projection with a uniformly random 0/1 diagonal pattern.
pub fn random_projection<S: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Projection<S> {
    let pattern: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    projection_with_pattern(&pattern, rng)
}

/// Random projection of exactly the given rank.
pub fn random_projection_of_rank<S: Scalar, R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Projection<S> {
    let pattern: Vec<bool> = (0..n).map(|k| k < rank).collect();
    projection_with_pattern(&pattern, rng)
}

/// A random family of `parts` mutually orthogonal nonzero projections (`parts ≤ n`),
/// not necessarily summing to 1.
pub fn random_orthogonal_family<S: Scalar, R: Rng + ?Sized>(
    n: usize,
    parts: usize,
    rng: &mut R,
) -> Vec<Projection<S>> {
    assert!(parts <= n, "at most n orthogonal nonzero projections");
    let frame = orthogonal_frame::<S, _>(n, rng);
    // assign each frame vector to a part or to the remainder
    let mut owner: Vec<Option<usize>> = (0..n).map(|k| if k < parts { Some(k) } else { None }).collect();
    for slot in owner.iter_mut().skip(parts) {
        if rng.random_bool(0.5) {
            *slot = Some(rng.random_range(0..parts.max(1)));
        }
    }
    (0..parts)
        .map(|part| frame_projection(&frame, (0..n).filter(|&k| owner[k] == Some(part)), n))
        .collect()
}

/// A random unitary: the normalized Gram–Schmidt frame of a random matrix (float).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<C64> {
    let frame = orthogonal_frame::<C64, _>(n, rng);
    let norms: Vec<f64> = frame
        .iter()
        .map(|v| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    Matrix::from_fn(n, |i, j| frame[j][i] / norms[j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::CQ;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pattern_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let zero = projection_with_pattern::<C64, _>(&[false; 4], &mut rng);
        assert!(zero.is_zero());
        let one = projection_with_pattern::<C64, _>(&[true; 4], &mut rng);
        assert!(one.approx_eq(&Matrix::identity(4)));
        let one_exact = projection_with_pattern::<CQ, _>(&[true; 3], &mut rng);
        assert_eq!(*one_exact.matrix(), Matrix::identity(3));
    }

    #[test]
    fn thousand_float_projections_are_projections() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..1000 {
            let n = 1 + k % 6;
            let p = random_projection::<C64, _>(n, &mut rng);
            Projection::new(p.matrix().clone()).expect("projection invariants");
        }
    }

    #[test]
    fn exact_projections_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = random_projection::<CQ, _>(3, &mut rng);
            assert_eq!(&(p.matrix() * p.matrix()), p.matrix());
            assert_eq!(&p.adjoint(), p.matrix());
        }
    }

    #[test]
    fn orthogonal_family_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fam = random_orthogonal_family::<CQ, _>(4, 3, &mut rng);
        assert_eq!(fam.len(), 3);
        for i in 0..3 {
            assert!(!fam[i].is_zero());
            for j in 0..3 {
                if i != j {
                    assert!(fam[i].is_orthogonal_to(&fam[j]));
                }
            }
        }
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_unitary(5, &mut rng);
        assert!((&u.adjoint() * &u).approx_eq(&Matrix::identity(5)));
    }

    #[test]
    fn skew_generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let z = random_trace_zero_skew::<CQ, _>(4, &mut rng);
        assert_eq!(z.adjoint(), -&z);
        assert_eq!(z.trace(), CQ::zero());
    }
}
