use super::{off_pattern, violation, Lambda, ReconstructError, ReconstructionTrace};
use crate::derlab::{Oracle, OracleError};
use crate::matlin::{format_scalar, Matrix, Scalar};
use crate::report::Citation;

/// Replay the two-step construction on `M_2`: `z_0` from `Δ(p_1)`, then
/// `z_1 = diag(δ, 0)` from the corrected image of `e_12`.
///
/// Works for arbitrary (non-`*`) maps. The returned `z` has trace zero; the
/// unnormalized `z_0 + z_1` is kept in the trace. The corrected map is then
/// required to vanish at `p_2` and `e_21`.
pub fn reconstruct_m2<S: Scalar, O: Oracle<S> + ?Sized>(
    oracle: &O,
) -> Result<(Matrix<S>, ReconstructionTrace<S>), ReconstructError> {
    let n = oracle.dim();
    if n != 2 {
        return Err(ReconstructError::Dimension { method: "M_2", expected: "2".into(), found: n });
    }
    let mut trace = ReconstructionTrace::new("m2", 2);
    let p1 = Matrix::unit(2, 0, 0);
    let p2 = Matrix::unit(2, 1, 1);
    let e12 = Matrix::unit(2, 0, 1);
    let e21 = Matrix::unit(2, 1, 0);

    let image = oracle.eval(&p1)?;
    if let Some((i, j)) = off_pattern(&image, |i, j| i != j) {
        return Err(violation(
            Citation::M2ProjectionImage,
            "p_1",
            format!("Δ(p_1) = {image} has a nonzero diagonal entry at ({i},{j})"),
        ));
    }
    let (l12, l21) = (image[(0, 1)].clone(), image[(1, 0)].clone());
    trace.lambdas.push(Lambda { j: 1, k: 2, value: l12.clone() });
    trace.lambdas.push(Lambda { j: 2, k: 1, value: l21.clone() });
    let mut z0 = Matrix::zeros(2);
    z0[(1, 0)] = l21;
    z0[(0, 1)] = -l12;

    let corrected = &oracle.eval(&e12)? - &z0.commutator(&e12).map_err(OracleError::from)?;
    if let Some((i, j)) = off_pattern(&corrected, |i, j| (i, j) == (0, 1)) {
        return Err(violation(
            Citation::M2UnitImage,
            "e_12",
            format!("Δ(e_12) - [z_0,e_12] = {corrected} is not a multiple of e_12 (entry ({i},{j}))"),
        ));
    }
    let delta = corrected[(0, 1)].clone();
    let z1 = Matrix::diagonal(&[delta.clone(), S::zero()]);

    let raw = &z0 + &z1;
    let z = raw.trace_normalized();
    trace.delta = Some(delta);
    trace.z0 = z0;
    trace.z1 = z1;
    trace.raw = raw;

    for (label, x) in [("p_2", &p2), ("e_21", &e21)] {
        let image = oracle.eval(x)?;
        let diff = &image - &z.commutator(x).map_err(OracleError::from)?;
        if !diff.is_negligible(image.max_abs()) {
            return Err(violation(
                Citation::M2Vanishing,
                label,
                format!("Δ({label}) - [z,{label}] = {diff}, largest entry {}", format_scalar(&max_entry(&diff))),
            ));
        }
    }
    let points: Vec<(String, Matrix<S>)> =
        vec![("p_1".into(), p1), ("e_12".into(), e12), ("p_2".into(), p2), ("e_21".into(), e21)];
    trace.record_residuals(oracle, &z, &points)?;
    Ok((z, trace))
}

fn max_entry<S: Scalar>(m: &Matrix<S>) -> S {
    m.as_slice()
        .iter()
        .max_by(|a, b| a.modulus().total_cmp(&b.modulus()))
        .cloned()
        .unwrap_or_else(S::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derlab::MapOracle;
    use crate::matlin::random::random_matrix;
    use crate::matlin::{C64, CQ};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(re: i64, im: i64) -> CQ {
        CQ::from_parts(CQ::from_i64(re), CQ::from_i64(im))
    }

    #[test]
    fn worked_example() {
        let src = Matrix::from_rows(vec![vec![q(0, 1), q(1, 0)], vec![q(-1, 0), q(0, 2)]]).unwrap();
        let (z, trace) = reconstruct_m2(&MapOracle::inner(src)).unwrap();
        let raw = Matrix::from_rows(vec![vec![q(0, -1), q(1, 0)], vec![q(-1, 0), q(0, 0)]]).unwrap();
        assert_eq!(trace.raw, raw);
        let half = CQ::from_parts(CQ::zero(), CQ::from_ratio(1, 2));
        let expect = Matrix::from_rows(vec![vec![-half.clone(), q(1, 0)], vec![q(-1, 0), half]]).unwrap();
        assert_eq!(z, expect);
        assert_eq!(trace.delta, Some(q(0, -1)));
        assert_eq!(trace.max_residual(), 0.0);
    }

    #[test]
    fn trivial_sources_give_zero() {
        assert_eq!(reconstruct_m2(&MapOracle::<CQ>::inner(Matrix::zeros(2))).unwrap().0, Matrix::zeros(2));
        let central = Matrix::scalar(2, q(3, -2));
        assert_eq!(reconstruct_m2(&MapOracle::inner(central)).unwrap().0, Matrix::zeros(2));
    }

    #[test]
    fn random_round_trip_modulo_center() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let src = random_matrix::<CQ, _>(2, &mut rng);
            let (z, _) = reconstruct_m2(&MapOracle::inner(src.clone())).unwrap();
            assert_eq!(z, src.trace_normalized());
            let fsrc = random_matrix::<C64, _>(2, &mut rng);
            let (fz, _) = reconstruct_m2(&MapOracle::inner(fsrc.clone())).unwrap();
            assert!((&fz - &fsrc.trace_normalized()).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn diagonal_image_of_p1_is_rejected() {
        let spiked = MapOracle::<CQ>::custom(2, "spike", |x: &Matrix<CQ>| x.clone());
        let err = reconstruct_m2(&spiked).unwrap_err();
        assert_eq!(err.citation(), Some(Citation::M2ProjectionImage));
    }

    #[test]
    fn later_points_are_checked() {
        let z = Matrix::from_rows(vec![vec![q(1, 0), q(2, 0)], vec![q(0, 1), q(0, 0)]]).unwrap();
        let zc = z.clone();
        let broken = MapOracle::custom(2, "broken at e_21", move |x: &Matrix<CQ>| {
            let base = zc.commutator(x).unwrap();
            if *x == Matrix::unit(2, 1, 0) {
                &base + &Matrix::unit(2, 0, 1)
            } else {
                base
            }
        });
        let err = reconstruct_m2(&broken).unwrap_err();
        assert_eq!(err.citation(), Some(Citation::M2Vanishing));
        assert!(err.to_string().contains("e_21"));
    }

    #[test]
    fn wrong_dimension() {
        let err = reconstruct_m2(&MapOracle::<CQ>::inner(Matrix::zeros(3))).unwrap_err();
        assert!(matches!(err, ReconstructError::Dimension { found: 3, .. }));
    }
}
