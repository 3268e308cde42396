//! The projection measure `μ(p) = Δ(p)` of a map on `M_n`: finite
//! additivity, an empirical bound on the projection lattice, and the linear
//! extension `G` with `G(p) = μ(p)` for every projection.
//!
//! Boundedness is estimated by sampling rather than assumed. Completely
//! additive measures on the projections of `M_n` can be unbounded (a Hamel
//! basis construction over ℚ), and no such measure is built here.

mod extension;

pub use extension::{
    gleason_extend, linearize, spectral_consistency, verify_extension, verify_extension_on, ExtensionCheck, LinearExtension,
    Linearization, NO_GLEASON_GUARANTEE,
};

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::derlab::{Family, MapOracle, Oracle, OracleError};
use crate::matlin::random::random_projection;
use crate::matlin::{projection_spanning_basis, spanning_basis_label, MatError, Matrix, Projection, Scalar};
use crate::report::{CheckBuilder, CheckOutcome, Citation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("family {family}: parts {i} and {j} are not orthogonal")]
    NonOrthogonal { family: String, i: usize, j: usize },
    #[error("{0} is not a projection")]
    NotProjection(String),
    #[error("finite additivity fails on family {family} (residual {residual:.3e})")]
    Additivity { family: String, residual: f64 },
    #[error("the spanning projections do not determine a linear map")]
    Singular,
    #[error("measure lives on M_{expected}, found M_{found}")]
    Dimension { expected: usize, found: usize },
}

impl From<MatError> for MeasureError {
    fn from(e: MatError) -> Self {
        MeasureError::Oracle(OracleError::from(e))
    }
}

/// `p ↦ μ(p)`, backed by a map on `M_n` or by an explicit table of projections.
#[derive(Clone)]
pub struct ProjectionMeasure<S: Scalar> {
    source: Arc<dyn Oracle<S>>,
}

impl<S: Scalar> ProjectionMeasure<S> {
    pub fn from_oracle(source: Arc<dyn Oracle<S>>) -> Self {
        ProjectionMeasure { source }
    }

    /// Every key must be a projection of `M_n`.
    pub fn from_table(n: usize, entries: Vec<(Matrix<S>, Matrix<S>)>) -> Result<Self, MeasureError> {
        for (p, _) in &entries {
            if p.n() != n {
                return Err(MeasureError::Dimension { expected: n, found: p.n() });
            }
            Projection::new(p.clone()).map_err(|_| MeasureError::NotProjection(p.to_string()))?;
        }
        Ok(ProjectionMeasure { source: Arc::new(MapOracle::table(n, entries)?) })
    }

    pub fn n(&self) -> usize {
        self.source.dim()
    }

    pub fn source(&self) -> &Arc<dyn Oracle<S>> {
        &self.source
    }

    pub fn value(&self, p: &Matrix<S>) -> Result<Matrix<S>, OracleError> {
        self.source.eval(p)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyResidual {
    pub family: String,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdditivityReport {
    pub outcome: CheckOutcome,
    pub families: Vec<FamilyResidual>,
}

/// `‖μ(Σ λ_j p_j) - Σ λ_j μ(p_j)‖` for every family, after checking that
/// each family is pairwise orthogonal.
pub fn check_finite_additivity<S: Scalar>(
    mu: &ProjectionMeasure<S>,
    families: &[Family<S>],
) -> Result<AdditivityReport, MeasureError> {
    for f in families {
        for i in 0..f.parts.len() {
            for j in (i + 1)..f.parts.len() {
                if !f.parts[i].is_orthogonal_to(&f.parts[j]) {
                    return Err(MeasureError::NonOrthogonal { family: f.label.clone(), i: i + 1, j: j + 1 });
                }
            }
        }
    }
    let mut check = CheckBuilder::new("finite_additivity", Citation::OrthogonalAdditivity);
    let mut rows = Vec::with_capacity(families.len());
    for f in families {
        let combo = f.combination(0..f.parts.len());
        let whole = match mu.value(&combo) {
            Ok(v) => v,
            Err(e) => {
                check.inconclusive(|| format!("{}: {e}", f.label));
                continue;
            }
        };
        let mut sum = Matrix::zeros(mu.n());
        let mut missing = None;
        for (p, l) in f.parts.iter().zip(&f.coeffs) {
            match mu.value(p) {
                Ok(v) => sum = &sum + &v.scale(l),
                Err(e) => missing = Some(e),
            }
        }
        if let Some(e) = missing {
            check.inconclusive(|| format!("{}: {e}", f.label));
            continue;
        }
        let diff = &whole - &sum;
        let residual = diff.frobenius_norm();
        let ok = diff.is_negligible(whole.max_abs().max(sum.max_abs()));
        check.record(ok, residual, || format!("{} (residual {residual:.3e})", f.label));
        rows.push(FamilyResidual { family: f.label.clone(), residual });
    }
    Ok(AdditivityReport { outcome: check.finish(), families: rows })
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundEstimate {
    pub estimate: f64,
    pub argmax: String,
    pub samples: usize,
}

/// `max ‖μ(p)‖` (operator norm) over the spanning projections and `k` random projections.
///
/// Samples are drawn in order from `rng`, so for a fixed seed the estimate is
/// nondecreasing in `k`.
pub fn estimate_bound<S: Scalar, R: Rng + ?Sized>(
    mu: &ProjectionMeasure<S>,
    k: usize,
    rng: &mut R,
) -> Result<BoundEstimate, OracleError> {
    let n = mu.n();
    let mut best = BoundEstimate { estimate: 0.0, argmax: "0".into(), samples: 0 };
    let mut consider = |label: &dyn Fn() -> String, p: &Matrix<S>| -> Result<(), OracleError> {
        let norm = mu.value(p)?.spectral_norm();
        best.samples += 1;
        if norm > best.estimate {
            best.estimate = norm;
            best.argmax = label();
        }
        Ok(())
    };
    for (idx, p) in projection_spanning_basis::<S>(n).iter().enumerate() {
        consider(&|| spanning_basis_label(n, idx), p)?;
    }
    for _ in 0..k {
        let p = random_projection::<S, _>(n, rng).into_matrix();
        consider(&|| p.to_string(), &p)?;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derlab::{MapOracle, Perturbation, SampleSet};
    use crate::matlin::random::{random_matrix, random_trace_zero_skew};
    use crate::matlin::{C64, CQ};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn inner<S: Scalar>(z: Matrix<S>) -> ProjectionMeasure<S> {
        ProjectionMeasure::from_oracle(Arc::new(MapOracle::inner(z)))
    }

    #[test]
    fn inner_measure_is_exactly_additive() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let z = random_matrix::<CQ, _>(3, &mut rng);
        let mut samples = SampleSet::<CQ>::structured(3);
        samples.extend(SampleSet::random(3, 4, &mut rng));
        let report = check_finite_additivity(&inner(z), &samples.families).unwrap();
        assert_eq!(report.outcome.status, crate::report::Status::Pass);
        assert!(report.families.iter().all(|f| f.residual == 0.0));
    }

    #[test]
    fn complement_family_sums_to_unit() {
        let z = random_matrix::<CQ, _>(2, &mut ChaCha8Rng::seed_from_u64(62));
        let p = Projection::<CQ>::coordinate(2, &[0]);
        let fam = Family { label: "p, 1-p".into(), parts: vec![p.clone(), p.complement()], coeffs: vec![CQ::from_i64(1); 2] };
        let mu = inner(z);
        let report = check_finite_additivity(&mu, &[fam]).unwrap();
        assert_eq!(report.families[0].residual, 0.0);
        assert!(mu.value(&Matrix::identity(2)).unwrap().is_zero());
    }

    #[test]
    fn non_orthogonal_family_is_rejected() {
        let p = Projection::<CQ>::coordinate(2, &[0]);
        let fam = Family { label: "p, p".into(), parts: vec![p.clone(), p], coeffs: vec![CQ::from_i64(1); 2] };
        let err = check_finite_additivity(&inner(Matrix::zeros(2)), &[fam]).unwrap_err();
        assert!(matches!(err, MeasureError::NonOrthogonal { .. }));
    }

    #[test]
    fn trace_square_breaks_additivity() {
        let o = MapOracle::perturbed(Matrix::<CQ>::zeros(2), CQ::from_i64(1), Perturbation::TraceSquare);
        let mu = ProjectionMeasure::from_oracle(Arc::new(o));
        let fam = Family {
            label: "p_1, 2 p_2".into(),
            parts: vec![Projection::coordinate(2, &[0]), Projection::coordinate(2, &[1])],
            coeffs: vec![CQ::from_i64(1), CQ::from_i64(2)],
        };
        let report = check_finite_additivity(&mu, &[fam]).unwrap();
        assert_eq!(report.outcome.status, crate::report::Status::Fail);
    }

    #[test]
    fn bound_of_inner_measure() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        let z = random_matrix::<C64, _>(3, &mut rng);
        let est = estimate_bound(&inner(z.clone()), 200, &mut rng).unwrap();
        assert!(est.estimate <= 2.0 * z.spectral_norm() + 1e-12);
        let zero = estimate_bound(&inner(Matrix::<C64>::zeros(3)), 50, &mut rng).unwrap();
        assert_eq!(zero.estimate, 0.0);
    }

    #[test]
    fn bound_is_monotone_in_k_for_a_fixed_seed() {
        let z = random_trace_zero_skew::<C64, _>(4, &mut ChaCha8Rng::seed_from_u64(64));
        let mu = inner(z);
        let mut last = 0.0;
        for k in [1, 10, 50, 200] {
            let est = estimate_bound(&mu, k, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
            assert!(est.estimate >= last);
            last = est.estimate;
        }
    }

    #[test]
    fn table_keys_must_be_projections() {
        let err = ProjectionMeasure::<CQ>::from_table(2, vec![(Matrix::unit(2, 0, 1), Matrix::zeros(2))]);
        assert!(matches!(err, Err(MeasureError::NotProjection(_))));
    }
}
