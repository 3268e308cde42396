use rand::Rng;
use serde::Serialize;

use crate::derlab::{Oracle, OracleError};
use crate::matlin::random::{random_matrix, random_projection};
use crate::matlin::{eps, Backend, Matrix, Scalar};
use crate::report::{CheckBuilder, CheckOutcome, Citation};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleResidual {
    pub label: String,
    pub residual: f64,
}

/// `max ‖Δ(x) - [z,x]‖ / (1 + ‖x‖)` in operator norm over the samples, with every sample listed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerResidual {
    pub residual: f64,
    pub worst: Option<String>,
    pub samples: Vec<SampleResidual>,
}

impl InnerResidual {
    /// Zero on the exact backend, `ε` on the float backend.
    pub fn default_tolerance<S: Scalar>() -> f64 {
        match S::BACKEND {
            Backend::Exact => 0.0,
            Backend::Float => eps(),
        }
    }

    pub fn passed(&self, tolerance: f64) -> bool {
        self.residual <= tolerance
    }

    pub fn check(&self, name: &str, tolerance: f64) -> CheckOutcome {
        let mut b = CheckBuilder::new(name, Citation::InnerResidual);
        for s in &self.samples {
            b.record(s.residual <= tolerance, s.residual, || format!("x = {}", s.label));
        }
        b.finish()
    }
}

pub fn verify_inner<S: Scalar, O: Oracle<S> + ?Sized>(
    oracle: &O,
    z: &Matrix<S>,
    samples: &[(String, Matrix<S>)],
) -> Result<InnerResidual, OracleError> {
    let mut out = InnerResidual { residual: 0.0, worst: None, samples: Vec::with_capacity(samples.len()) };
    for (label, x) in samples {
        let diff = &oracle.eval(x)? - &z.commutator(x)?;
        let r = diff.spectral_norm() / (1.0 + x.spectral_norm());
        if r > out.residual || out.worst.is_none() {
            out.residual = out.residual.max(r);
            out.worst = Some(label.clone());
        }
        out.samples.push(SampleResidual { label: label.clone(), residual: r });
    }
    Ok(out)
}

/// Matrix units, the identity, `e_12 + e_21`, and `count` random matrices and projections.
pub fn inner_samples<S: Scalar, R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<(String, Matrix<S>)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            out.push((format!("e_{}_{}", i + 1, j + 1), Matrix::unit(n, i, j)));
        }
    }
    out.push(("1".into(), Matrix::identity(n)));
    if n >= 2 {
        out.push(("e_1_2 + e_2_1".into(), &Matrix::unit(n, 0, 1) + &Matrix::unit(n, 1, 0)));
    }
    for _ in 0..count {
        let x = random_matrix::<S, _>(n, rng);
        out.push((x.to_string(), x));
        let p = random_projection::<S, _>(n, rng).into_matrix();
        out.push((p.to_string(), p));
    }
    out
}
