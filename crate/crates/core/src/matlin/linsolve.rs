//! Gaussian elimination over either scalar backend: rank, consistency with a
//! left-null certificate, minimum-norm solutions and square solves.

use super::scalar::Scalar;
use super::MatError;

/// Rectangular dense matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense<S> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> Dense<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut d = Self::zeros(n, n);
        for i in 0..n {
            *d.at_mut(i, i) = S::one();
        }
        d
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Dense {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().cloned().collect(),
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut S {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.modulus()).fold(0.0, f64::max)
    }

    pub fn conj_transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j).conj();
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_exact_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_exact_zero() {
                        continue;
                    }
                    let slot = out.at_mut(i, j);
                    *slot = std::mem::replace(slot, S::zero()) + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "vector length");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(S::zero(), |acc, (a, x)| acc + a.clone() * x.clone())
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// `row[target] -= factor · row[source]`
    fn axpy_row(&mut self, target: usize, source: usize, factor: &S) {
        for j in 0..self.cols {
            let s = self.at(source, j);
            if s.is_exact_zero() {
                continue;
            }
            let d = factor.clone() * s.clone();
            let slot = self.at_mut(target, j);
            *slot = std::mem::replace(slot, S::zero()) - d;
        }
    }

    fn scale_row(&mut self, target: usize, factor: &S) {
        for j in 0..self.cols {
            let slot = self.at_mut(target, j);
            if !slot.is_exact_zero() {
                *slot = std::mem::replace(slot, S::zero()) * factor.clone();
            }
        }
    }
}

/// Reduced row echelon form of `a`, with the row operations recorded in `transform`
/// so that `transform · a_original = reduced`.
#[derive(Clone, Debug)]
pub struct Echelon<S> {
    pub reduced: Dense<S>,
    pub transform: Dense<S>,
    /// Pivot column of each of the first `rank` rows.
    pub pivots: Vec<usize>,
}

impl<S: Scalar> Echelon<S> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Gauss–Jordan elimination with partial pivoting (largest modulus).
///
/// On the float backend an entry counts as zero when it is negligible relative
/// to the largest entry of the input.
pub fn echelon<S: Scalar>(a: &Dense<S>) -> Echelon<S> {
    let mut reduced = a.clone();
    let mut transform = Dense::identity(a.rows);
    let scale = a.max_abs();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let (best, best_mod) = (row..a.rows)
            .map(|r| (r, reduced.at(r, col).modulus_sq()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_mod < 0.0 || reduced.at(best, col).negligible(scale) {
            // clean the column on the float path so later tests see exact zeros
            for r in row..a.rows {
                *reduced.at_mut(r, col) = S::zero();
            }
            continue;
        }
        reduced.swap_rows(row, best);
        transform.swap_rows(row, best);
        let inv = S::one() / reduced.at(row, col).clone();
        reduced.scale_row(row, &inv);
        transform.scale_row(row, &inv);
        *reduced.at_mut(row, col) = S::one();
        for r in 0..a.rows {
            if r != row {
                let factor = reduced.at(r, col).clone();
                if !factor.is_exact_zero() {
                    reduced.axpy_row(r, row, &factor);
                    transform.axpy_row(r, row, &factor);
                    *reduced.at_mut(r, col) = S::zero();
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    Echelon {
        reduced,
        transform,
        pivots,
    }
}

pub fn rank<S: Scalar>(rows: &[Vec<S>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    echelon(&Dense::from_rows(rows)).rank()
}

/// Outcome of a consistency test for `A x = b`.
#[derive(Clone, Debug)]
pub enum Consistency<S> {
    /// A particular solution (free variables set to zero).
    Consistent(Vec<S>),
    /// A left-null combination `y` with `yᵀA = 0` and `yᵀb = value ≠ 0`.
    Inconsistent { combination: Vec<S>, value: S },
}

pub fn consistency<S: Scalar>(a: &Dense<S>, b: &[S]) -> Consistency<S> {
    assert_eq!(a.rows, b.len(), "right-hand side length");
    let ech = echelon(a);
    let tb = ech.transform.mul_vec(b);
    let scale = a.max_abs().max(b.iter().map(|x| x.modulus()).fold(0.0, f64::max));
    for (r, value) in tb.iter().enumerate().skip(ech.rank()) {
        if !value.negligible(scale) {
            return Consistency::Inconsistent { combination: ech.transform.row(r).to_vec(), value: value.clone() };
        }
    }
    let mut x = vec![S::zero(); a.cols];
    for (r, &c) in ech.pivots.iter().enumerate() {
        x[c] = tb[r].clone();
    }
    Consistency::Consistent(x)
}

/// Minimum weighted-norm solution of `A x = b`, minimizing `Σ w_k |x_k|²`.
///
/// Computed as `x = W⁻¹A*y` with `(A W⁻¹ A*) y = b`; the Gram system is
/// consistent exactly when `A x = b` is.
pub fn min_norm_solution<S: Scalar>(
    a: &Dense<S>,
    b: &[S],
    weights: Option<&[S]>,
) -> Consistency<S> {
    if let Consistency::Inconsistent { combination, value } = consistency(a, b) {
        return Consistency::Inconsistent { combination, value };
    }
    let mut scaled_adj = a.conj_transpose();
    if let Some(w) = weights {
        assert_eq!(w.len(), a.cols, "weight length");
        for (k, wk) in w.iter().enumerate() {
            scaled_adj.scale_row(k, &(S::one() / wk.clone()));
        }
    }
    let gram = a.mul(&scaled_adj);
    match consistency(&gram, b) {
        Consistency::Consistent(y) => Consistency::Consistent(scaled_adj.mul_vec(&y)),
        // numerically possible only on the float backend when A is badly scaled
        Consistency::Inconsistent { combination, value } => {
            Consistency::Inconsistent { combination, value }
        }
    }
}

/// Solve a square nonsingular system.
pub fn solve_square<S: Scalar>(a: &Dense<S>, b: &[S]) -> Result<Vec<S>, MatError> {
    assert_eq!(a.rows, a.cols, "square system");
    let ech = echelon(a);
    if ech.rank() < a.rows {
        return Err(MatError::Singular);
    }
    Ok(ech.transform.mul_vec(b))
}

/// Inverse of a square nonsingular matrix.
pub fn inverse<S: Scalar>(a: &Dense<S>) -> Result<Dense<S>, MatError> {
    assert_eq!(a.rows, a.cols, "square matrix");
    let ech = echelon(a);
    if ech.rank() < a.rows {
        return Err(MatError::Singular);
    }
    Ok(ech.transform)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::{C64, CQ};

    fn q(x: i64) -> CQ {
        CQ::from_i64(x)
    }

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![
            vec![q(2), q(1), q(1)],
            vec![q(4), q(2), q(2)],
            vec![q(1), q(0), q(1)],
        ];
        assert_eq!(rank(&rows), 2);
    }

    #[test]
    fn inconsistency_certificate() {
        let a = Dense::from_rows(&[vec![q(1), q(1)], vec![q(2), q(2)]]);
        match consistency(&a, &[q(1), q(3)]) {
            Consistency::Inconsistent { combination, value } => {
                // yᵀA = 0 and yᵀb = value
                let y = &combination;
                for j in 0..2 {
                    let s = y[0].clone() * a.at(0, j).clone() + y[1].clone() * a.at(1, j).clone();
                    assert_eq!(s, q(0));
                }
                assert_eq!(y[0].clone() * q(1) + y[1].clone() * q(3), value);
                assert_ne!(value, q(0));
            }
            other => panic!("expected inconsistency, got {other:?}"),
        }
    }

    #[test]
    fn min_norm_is_in_row_space() {
        // x + y = 2 → minimum-norm (1, 1)
        let a = Dense::from_rows(&[vec![q(1), q(1)]]);
        match min_norm_solution(&a, &[q(2)], None) {
            Consistency::Consistent(x) => assert_eq!(x, vec![q(1), q(1)]),
            other => panic!("{other:?}"),
        }
        // weights (1, 2): minimize x² + 2y² on x + y = 3 → (2, 1)
        match min_norm_solution(&a, &[q(3)], Some(&[q(1), q(2)])) {
            Consistency::Consistent(x) => assert_eq!(x, vec![q(2), q(1)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn float_solve_and_inverse() {
        let a = Dense::from_rows(&[
            vec![C64::new(2.0, 0.0), C64::new(1.0, 1.0)],
            vec![C64::new(0.0, -1.0), C64::new(3.0, 0.0)],
        ]);
        let b = [C64::new(1.0, 0.0), C64::new(0.0, 2.0)];
        let x = solve_square(&a, &b).unwrap();
        let back = a.mul_vec(&x);
        for (u, v) in back.iter().zip(&b) {
            assert!((u - v).norm() < 1e-12);
        }
        let inv = inverse(&a).unwrap();
        let id = a.mul(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id.at(i, j) - C64::new(e, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_detected() {
        let a = Dense::from_rows(&[vec![q(1), q(2)], vec![q(2), q(4)]]);
        assert!(matches!(inverse(&a), Err(MatError::Singular)));
    }
}
