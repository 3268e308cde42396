use std::fmt;

use super::matrix::Matrix;
use super::scalar::Scalar;
use super::MatError;

/// A linear form on `M_n` represented through the trace pairing `x ↦ trace(x·F)`.
#[derive(Clone, PartialEq)]
pub struct Functional<S> {
    density: Matrix<S>,
}

impl<S: Scalar> Functional<S> {
    pub fn new(density: Matrix<S>) -> Self {
        Functional { density }
    }

    pub fn zero(n: usize) -> Self {
        Functional::new(Matrix::zeros(n))
    }

    /// `ξ_i ⊗ ξ_j` (0-based), acting as `x ↦ x_{ji}`; its density is `e_ij`.
    pub fn rank_one(n: usize, i: usize, j: usize) -> Self {
        Functional::new(Matrix::unit(n, i, j))
    }

    /// The norm-one functional `φ_ij` with `φ_ij(e_ij) = 1` (0-based); density `e_ji`.
    pub fn dual_unit(n: usize, i: usize, j: usize) -> Self {
        Functional::new(Matrix::unit(n, j, i))
    }

    pub fn n(&self) -> usize {
        self.density.n()
    }

    pub fn density(&self) -> &Matrix<S> {
        &self.density
    }

    /// `φ([z,a])`, computing only the entries of `[z,a]` that `F` reads.
    pub fn apply_commutator(&self, z: &Matrix<S>, a: &Matrix<S>) -> Result<S, MatError> {
        z.check_same(a)?;
        z.check_same(&self.density)?;
        let n = z.n();
        let mut acc = S::zero();
        for i in 0..n {
            for j in 0..n {
                let f = &self.density[(j, i)];
                if f.is_exact_zero() {
                    continue;
                }
                let mut entry = S::zero();
                for k in 0..n {
                    let (zik, akj) = (&z[(i, k)], &a[(k, j)]);
                    if !zik.is_exact_zero() && !akj.is_exact_zero() {
                        entry = entry + zik.clone() * akj.clone();
                    }
                    let (aik, zkj) = (&a[(i, k)], &z[(k, j)]);
                    if !aik.is_exact_zero() && !zkj.is_exact_zero() {
                        entry = entry - aik.clone() * zkj.clone();
                    }
                }
                acc = acc + entry * f.clone();
            }
        }
        Ok(acc)
    }

    /// `trace(x·F) = Σ_{ij} x_ij F_ji`.
    pub fn apply(&self, x: &Matrix<S>) -> Result<S, MatError> {
        x.check_same(&self.density)?;
        let n = x.n();
        let mut acc = S::zero();
        for i in 0..n {
            for j in 0..n {
                let f = &self.density[(j, i)];
                if !f.is_exact_zero() {
                    acc = acc + x[(i, j)].clone() * f.clone();
                }
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, s: &S) -> Self {
        Functional::new(self.density.scale(s))
    }

    pub fn plus(&self, other: &Self) -> Result<Self, MatError> {
        Ok(Functional::new(self.density.try_add(&other.density)?))
    }

    /// `φ*(x) = conj(φ(x*))`, whose density is `F*`.
    pub fn involution(&self) -> Self {
        Functional::new(self.density.adjoint())
    }
}

impl<S: Scalar> fmt::Debug for Functional<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Functional(F = {})", self.density)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::CQ;

    fn sample() -> Matrix<CQ> {
        Matrix::from_fn(3, |i, j| CQ::from_i64((10 * i + j) as i64) + CQ::i() * CQ::from_i64(j as i64))
    }

    #[test]
    fn rank_one_extracts_transposed_entry() {
        let x = sample();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(Functional::rank_one(3, i, j).apply(&x).unwrap(), x[(j, i)]);
            }
        }
    }

    #[test]
    fn dual_unit_is_one_on_its_unit() {
        for i in 0..3 {
            for j in 0..3 {
                let phi = Functional::<CQ>::dual_unit(3, i, j);
                assert_eq!(phi.apply(&Matrix::unit(3, i, j)).unwrap(), CQ::one());
                assert_eq!(phi.apply(&sample()).unwrap(), sample()[(i, j)]);
            }
        }
    }

    #[test]
    fn commutator_shortcut_matches_full_product() {
        let phi = Functional::new(&Matrix::unit(3, 2, 0) + &Matrix::unit(3, 1, 1).scale(&CQ::i()));
        let z = sample();
        let a = sample().adjoint();
        assert_eq!(phi.apply_commutator(&z, &a).unwrap(), phi.apply(&z.commutator(&a).unwrap()).unwrap());
    }

    #[test]
    fn zero_functional_vanishes() {
        assert_eq!(Functional::<CQ>::zero(3).apply(&sample()).unwrap(), CQ::zero());
    }

    #[test]
    fn involution_matches_definition() {
        let phi = Functional::new(sample());
        let x = sample().scale(&(CQ::i() + CQ::from_i64(2)));
        let lhs = phi.involution().apply(&x).unwrap();
        let rhs = phi.apply(&x.adjoint()).unwrap().conj();
        assert_eq!(lhs, rhs);
    }
}
