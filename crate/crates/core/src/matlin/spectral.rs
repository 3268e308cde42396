use nalgebra::DMatrix;

use super::matrix::Matrix;
use super::projection::Projection;
use super::scalar::{eps, merge_tolerance, Scalar, C64};
use super::MatError;

/// `x = Σ λ_j p_j` with real `λ_j` ascending and mutually orthogonal `p_j` summing to 1.
#[derive(Clone, Debug)]
pub struct SpectralResolution {
    pub parts: Vec<(f64, Projection<C64>)>,
}

impl SpectralResolution {
    pub fn reconstruct(&self) -> Matrix<C64> {
        let n = self.parts.first().map_or(0, |(_, p)| p.n());
        self.parts.iter().fold(Matrix::zeros(n), |acc, (l, p)| {
            &acc + &p.scale(&C64::new(*l, 0.0))
        })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.parts.iter().map(|(l, _)| *l).collect()
    }
}

fn to_nalgebra(x: &Matrix<C64>) -> DMatrix<C64> {
    let n = x.n();
    DMatrix::from_fn(n, n, |i, j| x[(i, j)])
}

pub(crate) fn hermitian_eigenvalues(x: &Matrix<C64>) -> Vec<f64> {
    let herm = (x + &x.adjoint()).scale(&C64::new(0.5, 0.0));
    to_nalgebra(&herm).symmetric_eigenvalues().iter().copied().collect()
}

/// Spectral resolution of a Hermitian matrix. Exact inputs are coerced to float.
///
/// Eigenvalues whose distance is at most `δ_merge · max(1, max|λ|)` share a
/// projection; the cluster is reported at its mean eigenvalue.
pub fn spectral_resolution<S: Scalar>(x: &Matrix<S>) -> Result<SpectralResolution, MatError> {
    let x = x.to_c64();
    let n = x.n();
    if !(&x - &x.adjoint()).is_negligible(x.max_abs()) {
        return Err(MatError::NotHermitian);
    }
    if n == 0 {
        return Ok(SpectralResolution { parts: Vec::new() });
    }
    let herm = (&x + &x.adjoint()).scale(&C64::new(0.5, 0.0));
    let eig = to_nalgebra(&herm).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let spread = eig.eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs())).max(1.0);
    let threshold = merge_tolerance() * spread;
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &k in &order {
        match clusters.last_mut() {
            Some(c) if (eig.eigenvalues[k] - eig.eigenvalues[*c.last().unwrap()]).abs() <= threshold => {
                c.push(k)
            }
            _ => clusters.push(vec![k]),
        }
    }

    let parts = clusters
        .into_iter()
        .map(|cluster| {
            let lambda = cluster.iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / cluster.len() as f64;
            let p = Matrix::from_fn(n, |i, j| {
                cluster.iter().fold(C64::new(0.0, 0.0), |acc, &k| {
                    acc + eig.eigenvectors[(i, k)] * eig.eigenvectors[(j, k)].conj()
                })
            });
            (clean(lambda), Projection::new_unchecked(p))
        })
        .collect();
    Ok(SpectralResolution { parts })
}

fn clean(x: f64) -> f64 {
    if x.abs() <= eps() {
        0.0
    } else {
        x
    }
}
