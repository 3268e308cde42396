use std::sync::Arc;

use rand::Rng;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use super::{check_finite_additivity, AdditivityReport, MeasureError, ProjectionMeasure};
use crate::derlab::{Family, Oracle, SampleSet};
use crate::matlin::linsolve::{inverse, Dense};
use crate::matlin::random::{random_matrix, random_orthogonal_family, random_projection};
use crate::matlin::{
    projection_spanning_basis, spanning_basis_label, spectral_resolution, Matrix, Projection, Scalar, C64,
};
use crate::report::{CheckBuilder, CheckOutcome, Citation, Status};

pub const NO_GLEASON_GUARANTEE: &str = "type I_2: no Gleason guarantee on M_2, the extension is not guaranteed to exist";

/// A linear operator on `M_n`, stored as the `n² × n²` matrix acting on
/// row-major vectorizations.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearExtension<S: Scalar> {
    pub n: usize,
    pub grid: Dense<S>,
    pub flags: Vec<String>,
}

impl<S: Scalar> LinearExtension<S> {
    pub fn apply(&self, x: &Matrix<S>) -> Matrix<S> {
        let v = self.grid.mul_vec(x.as_slice());
        Matrix::from_vec(self.n, v).expect("grid has n² rows")
    }

    /// `max_ij ‖G(e_ij) - T(e_ij)‖` over the matrix units.
    pub fn operator_distance(&self, other: impl Fn(&Matrix<S>) -> Matrix<S>) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let e = Matrix::unit(n, i, j);
                worst = worst.max((&self.apply(&e) - &other(&e)).frobenius_norm());
            }
        }
        worst
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> =
            (0..self.grid.rows).map(|r| Value::Array(self.grid.row(r).iter().map(Scalar::to_json).collect())).collect();
        json!({"n": self.n, "grid": rows, "flags": self.flags})
    }
}

impl<S: Scalar> Serialize for LinearExtension<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        self.to_json().serialize(serializer)
    }
}

/// The linear map with `G(b) = μ(b)` on the `n²` spanning projections.
///
/// On `M_2` the result carries the [`NO_GLEASON_GUARANTEE`] flag: there the
/// measure need not come from any linear map.
pub fn gleason_extend<S: Scalar>(mu: &ProjectionMeasure<S>) -> Result<LinearExtension<S>, MeasureError> {
    let n = mu.n();
    let basis = projection_spanning_basis::<S>(n);
    let m = n * n;
    let mut v = Dense::zeros(m, m);
    let mut w = Dense::zeros(m, m);
    for (k, b) in basis.iter().enumerate() {
        let image = mu.value(b)?;
        for r in 0..m {
            *v.at_mut(r, k) = b.as_slice()[r].clone();
            *w.at_mut(r, k) = image.as_slice()[r].clone();
        }
    }
    let v_inv = inverse(&v).map_err(|_| MeasureError::Singular)?;
    let mut flags = Vec::new();
    if n == 2 {
        flags.push(NO_GLEASON_GUARANTEE.to_string());
    }
    Ok(LinearExtension { n, grid: w.mul(&v_inv), flags })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionCheck {
    pub outcome: CheckOutcome,
    pub structured: usize,
    pub random: usize,
    pub flags: Vec<String>,
}

impl ExtensionCheck {
    pub fn residual(&self) -> f64 {
        self.outcome.residual
    }

    pub fn passed(&self) -> bool {
        self.outcome.status == Status::Pass
    }
}

/// Coordinate projections of every rank `1..n-1` (all of them up to `M_10`) and the spanning projections.
fn structured_projections<S: Scalar>(n: usize) -> Vec<(String, Matrix<S>)> {
    let mut out = Vec::new();
    if n <= 10 {
        for mask in 1u32..(1 << n) - 1 {
            let idx: Vec<usize> = (0..n).filter(|&k| mask & (1 << k) != 0).collect();
            let label = idx.iter().map(|k| format!("p_{}", k + 1)).collect::<Vec<_>>().join(" + ");
            out.push((label, Projection::<S>::coordinate(n, &idx).into_matrix()));
        }
    }
    for (k, b) in projection_spanning_basis::<S>(n).into_iter().enumerate().skip(n) {
        out.push((spanning_basis_label(n, k), b.into_matrix()));
    }
    out
}

/// `‖G(p) - μ(p)‖` on the structured projections and `k` random ones.
pub fn verify_extension<S: Scalar, R: Rng + ?Sized>(
    ext: &LinearExtension<S>,
    mu: &ProjectionMeasure<S>,
    k: usize,
    rng: &mut R,
) -> Result<ExtensionCheck, MeasureError> {
    let n = mu.n();
    let mut points = structured_projections::<S>(n);
    let structured = points.len();
    for _ in 0..k {
        let p = random_projection::<S, _>(n, rng).into_matrix();
        points.push((p.to_string(), p));
    }
    let mut check = verify_extension_on(ext, mu, &points)?;
    check.structured = structured;
    check.random = k;
    Ok(check)
}

/// `‖G(p) - μ(p)‖` on the given projections. Projections `μ` has no value
/// for make the check inconclusive.
pub fn verify_extension_on<S: Scalar>(
    ext: &LinearExtension<S>,
    mu: &ProjectionMeasure<S>,
    points: &[(String, Matrix<S>)],
) -> Result<ExtensionCheck, MeasureError> {
    if ext.n != mu.n() {
        return Err(MeasureError::Dimension { expected: ext.n, found: mu.n() });
    }
    let mut check = CheckBuilder::new("gleason_extension", Citation::GleasonExtension);
    for (label, p) in points {
        let expect = match mu.value(p) {
            Ok(v) => v,
            Err(e) => {
                check.inconclusive(|| format!("p = {label}: {e}"));
                continue;
            }
        };
        let got = ext.apply(p);
        let diff = &got - &expect;
        let ok = diff.is_negligible(expect.max_abs().max(got.max_abs()));
        check.record(ok, diff.frobenius_norm(), || format!("p = {label}"));
    }
    if !ext.flags.is_empty() {
        check.note(ext.flags.join("; "));
    }
    Ok(ExtensionCheck { outcome: check.finish(), structured: points.len(), random: 0, flags: ext.flags.clone() })
}

/// `‖G(x) - Σ λ_j μ(p_j)‖` for the spectral resolution `x = Σ λ_j p_j` of a Hermitian `x`.
pub fn spectral_consistency(
    ext: &LinearExtension<C64>,
    mu: &ProjectionMeasure<C64>,
    x: &Matrix<C64>,
) -> Result<f64, MeasureError> {
    let res = spectral_resolution(x)?;
    let mut sum = Matrix::zeros(x.n());
    for (lambda, p) in &res.parts {
        sum = &sum + &mu.value(p.matrix())?.scale(&C64::new(*lambda, 0.0));
    }
    Ok((&ext.apply(x) - &sum).frobenius_norm())
}

#[derive(Debug, Clone, Serialize)]
pub struct Linearization<S: Scalar> {
    pub extension: LinearExtension<S>,
    pub additivity: AdditivityReport,
    /// `max ‖Δ(x) - G(x)‖ / (1 + ‖x‖)` over random non-Hermitian `x`.
    pub residual: f64,
    pub worst: Option<String>,
    /// `max ‖Δ(a + ib) - Δ(a) - iΔ(b)‖` over the same samples.
    pub cartesian_residual: f64,
    pub samples: usize,
}

/// The whole pipeline for a weak-2-local `*`-derivation: `μ = Δ|_P`,
/// additivity on orthogonal families, `G` from [`gleason_extend`], and the
/// comparison of `G` with `Δ` on non-Hermitian samples through `Δ(a+ib) = Δ(a) + iΔ(b)`.
pub fn linearize<S: Scalar, R: Rng + ?Sized>(
    oracle: Arc<dyn Oracle<S>>,
    samples: usize,
    rng: &mut R,
) -> Result<Linearization<S>, MeasureError> {
    let n = oracle.dim();
    let mu = ProjectionMeasure::from_oracle(oracle.clone());

    let mut families = SampleSet::<S>::structured(n).families;
    for k in 0..4.min(samples) {
        let parts = 1 + k % n.max(1);
        let parts = random_orthogonal_family::<S, _>(n, parts.min(n), rng);
        let coeffs = (0..parts.len()).map(|_| S::sample(rng)).collect();
        families.push(Family { label: format!("random family #{}", k + 1), parts, coeffs });
    }
    let additivity = check_finite_additivity(&mu, &families)?;
    if additivity.outcome.status == Status::Fail {
        return Err(MeasureError::Additivity {
            family: additivity.outcome.counterexample.clone().unwrap_or_default(),
            residual: additivity.outcome.residual,
        });
    }

    let extension = gleason_extend(&mu)?;
    let mut residual = 0.0_f64;
    let mut cartesian_residual = 0.0_f64;
    let mut worst = None;
    for _ in 0..samples {
        let x = random_matrix::<S, _>(n, rng);
        let (a, b) = (x.real_part(), x.imag_part());
        let dx = oracle.eval(&x)?;
        let split = &oracle.eval(&a)? + &oracle.eval(&b)?.scale(&S::i());
        cartesian_residual = cartesian_residual.max((&dx - &split).frobenius_norm());
        let r = (&dx - &extension.apply(&x)).spectral_norm() / (1.0 + x.spectral_norm());
        if r > residual || worst.is_none() {
            residual = residual.max(r);
            worst = Some(x.to_string());
        }
    }
    Ok(Linearization { extension, additivity, residual, worst, cartesian_residual, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derlab::MapOracle;
    use crate::matlin::random::{random_hermitian, random_trace_zero_skew};
    use crate::matlin::CQ;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn inner<S: Scalar>(z: Matrix<S>) -> ProjectionMeasure<S> {
        ProjectionMeasure::from_oracle(Arc::new(MapOracle::inner(z)))
    }

    #[test]
    fn extension_of_inner_measure_is_the_commutator() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for n in 2..=4 {
            let z = random_matrix::<CQ, _>(n, &mut rng);
            let ext = gleason_extend(&inner(z.clone())).unwrap();
            assert_eq!(ext.operator_distance(|x| z.commutator(x).unwrap()), 0.0);
            assert_eq!(ext.flags.is_empty(), n != 2);
        }
    }

    #[test]
    fn zero_measure_extends_to_zero() {
        let ext = gleason_extend(&inner(Matrix::<CQ>::zeros(3))).unwrap();
        assert!(ext.grid.data.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn verification_passes_for_inner_and_locates_a_perturbed_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        let z = random_matrix::<C64, _>(3, &mut rng);
        let mu = inner(z.clone());
        let ext = gleason_extend(&mu).unwrap();
        assert!(verify_extension(&ext, &mu, 100, &mut rng).unwrap().passed());

        let base = MapOracle::inner(z);
        let p1 = Matrix::unit(3, 0, 0);
        let bumped = MapOracle::custom(3, "inner with μ(p_1) bumped", move |x: &Matrix<C64>| {
            let v = base.eval(x).unwrap();
            if x.approx_eq(&p1) {
                &v + &Matrix::unit(3, 0, 1).scale(&C64::new(0.5, 0.0))
            } else {
                v
            }
        });
        let mu2 = ProjectionMeasure::from_oracle(Arc::new(bumped));
        let ext2 = gleason_extend(&mu2).unwrap();
        let check = verify_extension(&ext2, &mu2, 20, &mut rng).unwrap();
        assert!(!check.passed());
        assert!(check.outcome.counterexample.unwrap().starts_with("p = "));
    }

    #[test]
    fn spectral_consistency_holds_for_inner() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let z = random_matrix::<C64, _>(4, &mut rng);
        let mu = inner(z);
        let ext = gleason_extend(&mu).unwrap();
        for _ in 0..5 {
            let x = random_hermitian::<C64, _>(4, &mut rng);
            assert!(spectral_consistency(&ext, &mu, &x).unwrap() < 1e-9);
        }
    }

    #[test]
    fn linearize_inner_star() {
        let mut rng = ChaCha8Rng::seed_from_u64(74);
        let z = random_trace_zero_skew::<C64, _>(4, &mut rng);
        let o: Arc<dyn Oracle<C64>> = Arc::new(MapOracle::inner_star(z.clone()).unwrap());
        let lin = linearize(o, 20, &mut rng).unwrap();
        assert!(lin.residual < 1e-10 && lin.cartesian_residual < 1e-10);
        assert!(lin.extension.operator_distance(|x| z.commutator(x).unwrap()) < 1e-10);

        let zero: Arc<dyn Oracle<CQ>> = Arc::new(MapOracle::Zero { n: 3 });
        let lin0 = linearize(zero, 3, &mut rng).unwrap();
        assert!(lin0.extension.grid.data.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn linearize_stops_at_additivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(75);
        let o: Arc<dyn Oracle<CQ>> = Arc::new(MapOracle::custom(3, "p_1 + p_2 bumped", |x: &Matrix<CQ>| {
            if *x == Projection::<CQ>::coordinate(3, &[0, 1]).into_matrix() {
                Matrix::unit(3, 0, 2)
            } else {
                Matrix::zeros(3)
            }
        }));
        let err = linearize(o, 3, &mut rng).unwrap_err();
        assert!(matches!(err, MeasureError::Additivity { .. }), "{err}");
    }
}
