use super::{off_pattern, violation, Lambda, ReconstructError, ReconstructionTrace};
use crate::derlab::{Oracle, OracleError};
use crate::matlin::{eps, format_scalar, Backend, Matrix, Scalar};
use crate::report::Citation;

fn gamma_is_imaginary<S: Scalar>(gamma: &S) -> bool {
    match S::BACKEND {
        Backend::Exact => gamma.re().is_zero(),
        Backend::Float => gamma.re().modulus() <= eps() * (1.0 + gamma.modulus()),
    }
}

/// Reconstruct `z` (skew-Hermitian, trace zero) for a weak-2-local
/// `*`-derivation on `M_n`, `n ≥ 2`.
///
/// Reads `λ_k^(j)` off every `Δ(p_j)` and assembles `z_0`, then reads `γ_kn`
/// from `(Δ - [z_0,·])(e_kn)` and sets `z_1 = Σ γ_kn p_k`. Every shape the
/// construction relies on is checked and reported as a violation otherwise.
#[allow(clippy::needless_range_loop)]
pub fn reconstruct_mn_constructive<S: Scalar, O: Oracle<S> + ?Sized>(
    oracle: &O,
    star: bool,
) -> Result<(Matrix<S>, ReconstructionTrace<S>), ReconstructError> {
    if !star {
        return Err(ReconstructError::NeedsStar);
    }
    let n = oracle.dim();
    if n < 2 {
        return Err(ReconstructError::Dimension { method: "constructive", expected: "n with n >= 2".into(), found: n });
    }
    let mut trace = ReconstructionTrace::new("constructive", n);
    let mut points: Vec<(String, Matrix<S>)> = Vec::with_capacity(2 * n - 1);

    // lambda[j][k] = λ_k^(j)
    let mut lambda = vec![vec![S::zero(); n]; n];
    for j in 0..n {
        let label = format!("p_{}", j + 1);
        let p = Matrix::unit(n, j, j);
        let image = oracle.eval(&p)?;
        let asym = &image - &image.adjoint();
        if !asym.is_negligible(image.max_abs()) {
            return Err(violation(
                Citation::ProjectionImageHermitian,
                &label,
                format!("Δ({label}) = {image} is not self-adjoint"),
            ));
        }
        if let Some((a, b)) = off_pattern(&image, |a, b| (a == j) != (b == j)) {
            return Err(violation(
                Citation::ProjectionImageShape,
                &label,
                format!("Δ({label}) = {image} has a nonzero entry at ({a},{b}), outside row and column {}", j + 1),
            ));
        }
        for k in (0..n).filter(|&k| k != j) {
            lambda[j][k] = image[(j, k)].clone();
            trace.lambdas.push(Lambda { j: j + 1, k: k + 1, value: lambda[j][k].clone() });
        }
        points.push((label, p));
    }

    for i in 0..n {
        for j in (i + 1)..n {
            let defect = lambda[j][i].clone() + lambda[i][j].conj();
            let scale = lambda[j][i].modulus().max(lambda[i][j].modulus());
            if !defect.negligible(scale) {
                return Err(violation(
                    Citation::AntisymmetricConsistency,
                    format!("p_{} + p_{}", i + 1, j + 1),
                    format!(
                        "λ_{}^({}) = {} but -conj(λ_{}^({})) = {}",
                        i + 1,
                        j + 1,
                        format_scalar(&lambda[j][i]),
                        j + 1,
                        i + 1,
                        format_scalar(&-lambda[i][j].conj())
                    ),
                ));
            }
        }
    }

    let mut z0 = Matrix::zeros(n);
    for j in 0..n {
        for i in 0..n {
            if i > j {
                z0[(j, i)] = -lambda[j][i].clone();
            } else if i < j {
                z0[(j, i)] = lambda[i][j].conj();
            }
        }
    }

    let last = n - 1;
    let mut gammas = Vec::with_capacity(last);
    for k in 0..last {
        let label = format!("e_{}_{}", k + 1, n);
        let e = Matrix::unit(n, k, last);
        let corrected = &oracle.eval(&e)? - &z0.commutator(&e).map_err(OracleError::from)?;
        if let Some((a, b)) = off_pattern(&corrected, |a, b| (a, b) == (k, last)) {
            return Err(violation(
                Citation::UnitImageDiagonal,
                &label,
                format!("Δ({label}) - [z_0,{label}] = {corrected} has a nonzero entry at ({a},{b})"),
            ));
        }
        let gamma = corrected[(k, last)].clone();
        if !gamma_is_imaginary(&gamma) {
            return Err(violation(
                Citation::GammaImaginary,
                &label,
                format!("γ_{}{} = {} has a nonzero real part", k + 1, n, format_scalar(&gamma)),
            ));
        }
        trace.gammas.push((k + 1, gamma.clone()));
        gammas.push(gamma);
        points.push((label, e));
    }
    gammas.push(S::zero());
    let z1 = Matrix::diagonal(&gammas);

    let raw = &z0 + &z1;
    let z = raw.trace_normalized();
    trace.z0 = z0;
    trace.z1 = z1;
    trace.raw = raw;
    trace.record_residuals(oracle, &z, &points)?;
    Ok((z, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derlab::MapOracle;
    use crate::matlin::random::random_trace_zero_skew;
    use crate::matlin::{C64, CQ};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 2..=6 {
            for _ in 0..5 {
                let z = random_trace_zero_skew::<CQ, _>(n, &mut rng);
                let (got, trace) = reconstruct_mn_constructive(&MapOracle::inner_star(z.clone()).unwrap(), true).unwrap();
                assert_eq!(got, z);
                assert_eq!(trace.max_residual(), 0.0);
                assert!(trace.z0.is_skew_hermitian() && trace.z1.is_skew_hermitian());
                assert!(trace.gammas.iter().all(|(_, g)| g.re().is_zero()));
            }
        }
    }

    #[test]
    fn round_trip_float() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for n in 2..=8 {
            let z = random_trace_zero_skew::<C64, _>(n, &mut rng);
            let (got, _) = reconstruct_mn_constructive(&MapOracle::inner_star(z.clone()).unwrap(), true).unwrap();
            assert!((&got - &z).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn lambda_consistency_holds_for_inner_star() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let z = random_trace_zero_skew::<CQ, _>(4, &mut rng);
        let (_, trace) = reconstruct_mn_constructive(&MapOracle::inner_star(z).unwrap(), true).unwrap();
        for a in &trace.lambdas {
            let b = trace.lambdas.iter().find(|b| b.j == a.k && b.k == a.j).unwrap();
            assert_eq!(a.value, -b.value.conj());
        }
    }

    #[test]
    fn central_source_gives_zero() {
        let z = Matrix::<CQ>::scalar(3, CQ::i());
        let (got, _) = reconstruct_mn_constructive(&MapOracle::inner_star(z).unwrap(), true).unwrap();
        assert_eq!(got, Matrix::zeros(3));
    }

    #[test]
    fn diagonal_entry_in_projection_image_is_rejected() {
        let leak = MapOracle::<CQ>::custom(3, "p_1 spike", |x: &Matrix<CQ>| {
            if *x == Matrix::unit(3, 0, 0) {
                Matrix::unit(3, 0, 0)
            } else {
                Matrix::zeros(3)
            }
        });
        let err = reconstruct_mn_constructive(&leak, true).unwrap_err();
        assert_eq!(err.citation(), Some(Citation::ProjectionImageShape));
        assert!(err.to_string().contains("p_1"));
    }

    #[test]
    fn non_skew_source_breaks_a_display() {
        let z = Matrix::<CQ>::unit(3, 0, 1);
        let err = reconstruct_mn_constructive(&MapOracle::inner(z), true).unwrap_err();
        assert!(matches!(
            err.citation(),
            Some(Citation::ProjectionImageHermitian | Citation::AntisymmetricConsistency)
        ));
    }

    #[test]
    fn real_gamma_is_rejected() {
        let z = Matrix::<CQ>::diagonal(&[CQ::from_i64(1), CQ::zero(), CQ::zero()]);
        let err = reconstruct_mn_constructive(&MapOracle::inner(z), true).unwrap_err();
        assert_eq!(err.citation(), Some(Citation::GammaImaginary));
    }

    #[test]
    fn star_mode_is_required() {
        let o = MapOracle::<CQ>::inner(Matrix::zeros(3));
        assert_eq!(reconstruct_mn_constructive(&o, false).unwrap_err(), ReconstructError::NeedsStar);
    }
}
