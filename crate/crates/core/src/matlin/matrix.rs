use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use super::scalar::{format_scalar, parse_complex_literal, Scalar, C64};
use super::MatError;

/// Dense square complex matrix, row-major, 0-based storage.
///
/// Matrix units are written `e_ij` with 1-based indices in reports and data
/// files; [`Matrix::unit`] takes 0-based indices.
#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![S::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, S::one())
    }

    pub fn scalar(n: usize, value: S) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = value.clone();
        }
        m
    }

    /// The matrix unit `e_ij` (0-based).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m[(i, j)] = S::one();
        m
    }

    pub fn diagonal(values: &[S]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, MatError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(MatError::NotSquare);
        }
        Ok(Matrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// `Matrix::from_literals(&[&["i", "1"], &["-1", "2i"]])`
    pub fn from_literals(rows: &[&[&str]]) -> Result<Self, MatError> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|x| parse_complex_literal(x)).collect::<Result<Vec<S>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Matrix::from_rows(rows)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    /// Row-major vectorization.
    pub fn from_vec(n: usize, data: Vec<S>) -> Result<Self, MatError> {
        if data.len() != n * n {
            return Err(MatError::Length {
                expected: n * n,
                found: data.len(),
            });
        }
        Ok(Matrix { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<S> {
        self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[S]> {
        self.data.chunks(self.n.max(1)).take(self.n)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn to_c64(&self) -> Matrix<C64> {
        self.map(|x| x.to_c64())
    }

    pub fn from_c64(m: &Matrix<C64>) -> Self {
        m.map(|x| S::from_c64(*x))
    }

    pub fn check_same(&self, other: &Self) -> Result<(), MatError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(MatError::DimensionMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].clone())
    }

    pub fn trace(&self) -> S {
        (0..self.n).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, MatError> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a.clone() + b.clone()))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, MatError> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a.clone() - b.clone()))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, MatError> {
        self.check_same(other)?;
        Ok(self.product(other))
    }

    fn zip(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    fn product(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_exact_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.data[k * n + j];
                    if b.is_exact_zero() {
                        continue;
                    }
                    let slot = &mut out.data[i * n + j];
                    *slot = std::mem::replace(slot, S::zero()) + a.clone() * b.clone();
                }
            }
        }
        out
    }

    /// `[z, x] = z·x − x·z`.
    pub fn commutator(&self, x: &Self) -> Result<Self, MatError> {
        self.check_same(x)?;
        Ok(&self.product(x) - &x.product(self))
    }

    /// `p·self·p`, the compression to a corner.
    pub fn compress(&self, p: &Self) -> Result<Self, MatError> {
        self.check_same(p)?;
        Ok(p.product(&self.product(p)))
    }

    /// `trace(self · other) = Σ self_ij other_ji`, without forming the product.
    pub fn trace_product(&self, other: &Self) -> S {
        let n = self.n;
        let mut acc = S::zero();
        for (idx, a) in self.data.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            let b = &other.data[(idx % n) * n + idx / n];
            if !b.is_exact_zero() {
                acc = acc + a.clone() * b.clone();
            }
        }
        acc
    }

    /// Hash of the entries; equal matrices have equal fingerprints.
    pub fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.n.hash(&mut h);
        for x in &self.data {
            let c = x.to_c64();
            (c.re + 0.0).to_bits().hash(&mut h);
            (c.im + 0.0).to_bits().hash(&mut h);
        }
        h.finish()
    }

    /// `self += s · x`.
    pub fn add_scaled(&mut self, s: &S, x: &Self) {
        if s.is_exact_zero() {
            return;
        }
        for (slot, v) in self.data.iter_mut().zip(&x.data) {
            if !v.is_exact_zero() {
                *slot = std::mem::replace(slot, S::zero()) + s.clone() * v.clone();
            }
        }
    }

    /// `trace(self* · other)`, the Frobenius inner product.
    pub fn inner(&self, other: &Self) -> S {
        self.data
            .iter()
            .zip(&other.data)
            .fold(S::zero(), |acc, (a, b)| acc + a.conj() * b.clone())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|x| x.to_c64().norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.modulus()).fold(0.0, f64::max)
    }

    /// Every entry negligible relative to `scale`.
    pub fn is_negligible(&self, scale: f64) -> bool {
        self.data.iter().all(|x| x.negligible(scale))
    }

    pub fn is_zero(&self) -> bool {
        self.is_negligible(1.0)
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.n == other.n && (self - other).is_negligible(self.max_abs().max(other.max_abs()))
    }

    pub fn is_hermitian(&self) -> bool {
        self.approx_eq(&self.adjoint())
    }

    pub fn is_skew_hermitian(&self) -> bool {
        self.approx_eq(&-self.adjoint())
    }

    /// Hermitian part `(x + x*)/2`.
    pub fn real_part(&self) -> Self {
        (self + &self.adjoint()).scale(&S::from_ratio(1, 2))
    }

    /// `(x − x*)/(2i)`, so that `x = real_part + i·imag_part`.
    pub fn imag_part(&self) -> Self {
        (self - &self.adjoint()).scale(&(S::one() / (S::from_i64(2) * S::i())))
    }

    /// Subtract `(trace/n)·1`, the canonical representative modulo the center.
    pub fn trace_normalized(&self) -> Self {
        if self.n == 0 {
            return self.clone();
        }
        let shift = self.trace() / S::from_i64(self.n as i64);
        self - &Self::scalar(self.n, shift)
    }

    /// Spectral norm, via the largest eigenvalue of `x*x` (float).
    pub fn spectral_norm(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let x = self.to_c64();
        let gram = &x.adjoint() * &x;
        super::spectral::hermitian_eigenvalues(&gram)
            .into_iter()
            .fold(0.0, f64::max)
            .max(0.0)
            .sqrt()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&S> {
        if i < self.n && j < self.n {
            Some(&self.data[i * self.n + j])
        } else {
            None
        }
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(blocks: &[Self]) -> Self {
        let n = blocks.iter().map(|b| b.n).sum();
        let mut out = Self::zeros(n);
        let mut offset = 0;
        for b in blocks {
            for i in 0..b.n {
                for j in 0..b.n {
                    out[(offset + i, offset + j)] = b[(i, j)].clone();
                }
            }
            offset += b.n;
        }
        out
    }

    /// Principal submatrix on the index range `offset..offset + size`.
    pub fn principal_block(&self, offset: usize, size: usize) -> Self {
        Self::from_fn(size, |i, j| self[(offset + i, offset + j)].clone())
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range for n = {}", self.n);
        &self.data[i * self.n + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range for n = {}", self.n);
        &mut self.data[i * self.n + j]
    }
}

// Operator impls panic on dimension mismatch; the `try_*` methods report it.
impl<S: Scalar> Add for &Matrix<S> {
    type Output = Matrix<S>;
    fn add(self, rhs: &Matrix<S>) -> Matrix<S> {
        self.try_add(rhs).expect("matrix dimensions")
    }
}

impl<S: Scalar> Sub for &Matrix<S> {
    type Output = Matrix<S>;
    fn sub(self, rhs: &Matrix<S>) -> Matrix<S> {
        self.try_sub(rhs).expect("matrix dimensions")
    }
}

impl<S: Scalar> Mul for &Matrix<S> {
    type Output = Matrix<S>;
    fn mul(self, rhs: &Matrix<S>) -> Matrix<S> {
        self.try_mul(rhs).expect("matrix dimensions")
    }
}

impl<S: Scalar> Neg for &Matrix<S> {
    type Output = Matrix<S>;
    fn neg(self) -> Matrix<S> {
        self.map(|x| -x.clone())
    }
}

impl<S: Scalar> Neg for Matrix<S> {
    type Output = Matrix<S>;
    fn neg(self) -> Matrix<S> {
        -&self
    }
}

impl<S: Scalar> Add for Matrix<S> {
    type Output = Matrix<S>;
    fn add(self, rhs: Matrix<S>) -> Matrix<S> {
        &self + &rhs
    }
}

impl<S: Scalar> Sub for Matrix<S> {
    type Output = Matrix<S>;
    fn sub(self, rhs: Matrix<S>) -> Matrix<S> {
        &self - &rhs
    }
}

impl<S: Scalar> Mul for Matrix<S> {
    type Output = Matrix<S>;
    fn mul(self, rhs: Matrix<S>) -> Matrix<S> {
        &self * &rhs
    }
}

impl<S: Scalar> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<S: Scalar> fmt::Display for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (r, row) in self.rows().enumerate() {
            if r > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for (c, x) in row.iter().enumerate() {
                if c > 0 {
                    f.write_str(", ")?;
                }
                f.write_str(&format_scalar(x))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::CQ;

    fn q(re: i64, im: i64) -> CQ {
        CQ::from_i64(re) + CQ::i() * CQ::from_i64(im)
    }

    #[test]
    fn trace_product_and_add_scaled_match_dense_forms() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let a = crate::matlin::random::random_matrix::<CQ, _>(3, &mut rng);
        let mut b = crate::matlin::random::random_matrix::<CQ, _>(3, &mut rng);
        b[(1, 2)] = q(0, 0);
        assert_eq!(a.trace_product(&b), (&a * &b).trace());
        let mut c = a.clone();
        c.add_scaled(&q(2, -1), &b);
        assert_eq!(c, &a + &b.scale(&q(2, -1)));
    }

    #[test]
    fn commutator_with_p1() {
        // z = [[0,1],[-1,0]], p1 = e_11
        let z = Matrix::from_rows(vec![vec![q(0, 0), q(1, 0)], vec![q(-1, 0), q(0, 0)]]).unwrap();
        let p1 = Matrix::<CQ>::unit(2, 0, 0);
        let c = z.commutator(&p1).unwrap();
        let expected =
            Matrix::from_rows(vec![vec![q(0, 0), q(-1, 0)], vec![q(-1, 0), q(0, 0)]]).unwrap();
        assert_eq!(c, expected);
        // −z_12 e_12 + z_21 e_21
        let display = &Matrix::unit(2, 0, 1).scale(&-z[(0, 1)].clone())
            + &Matrix::unit(2, 1, 0).scale(&z[(1, 0)]);
        assert_eq!(c, display);
    }

    #[test]
    fn commutator_trivial_cases() {
        let z = Matrix::from_rows(vec![vec![q(1, 2), q(3, -1)], vec![q(0, 5), q(-2, 0)]]).unwrap();
        assert!(z.commutator(&Matrix::identity(2)).unwrap().is_zero());
        assert!(z.commutator(&z).unwrap().is_zero());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = Matrix::<CQ>::identity(2);
        let b = Matrix::<CQ>::identity(3);
        assert!(matches!(
            a.commutator(&b),
            Err(MatError::DimensionMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn cartesian_parts_recombine() {
        let x = Matrix::from_rows(vec![vec![q(1, 2), q(3, -1)], vec![q(0, 5), q(-2, 0)]]).unwrap();
        let back = &x.real_part() + &x.imag_part().scale(&CQ::i());
        assert_eq!(back, x);
        assert!(x.real_part().is_hermitian());
        assert!(x.imag_part().is_hermitian());
    }

    #[test]
    fn trace_normalization_kills_center() {
        let x = Matrix::from_rows(vec![vec![q(0, 1), q(1, 0)], vec![q(-1, 0), q(0, 2)]]).unwrap();
        let t = x.trace_normalized();
        assert!(t.trace().is_zero());
        assert_eq!(t, (&x + &Matrix::scalar(2, q(0, 5))).trace_normalized());
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let d = Matrix::diagonal(&[C64::new(3.0, 0.0), C64::new(0.0, -4.0)]);
        assert!((d.spectral_norm() - 4.0).abs() < 1e-12);
    }
}
