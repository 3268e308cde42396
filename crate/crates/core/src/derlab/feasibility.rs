//! Exact decision of the two-point condition: is there a derivation `[z,·]`
//! (a `*`-derivation when `star`) matching `φΔ(a)` and `φΔ(b)`?

use crate::matlin::linsolve::{min_norm_solution, Consistency, Dense};
use crate::matlin::{
    format_scalar, skew_from_coords, skew_hermitian_weights, skew_pairings, Functional, MatError, Matrix, Scalar,
};

/// A linear dependency among the constraints that the prescribed values violate.
#[derive(Clone, Debug, PartialEq)]
pub struct Obstruction<S: Scalar> {
    /// Coefficients of the dependent combination of constraint rows.
    pub combination: Vec<S>,
    /// Value the combination takes on the prescribed data (must be zero to be feasible).
    pub forced: S,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityVerdict<S: Scalar> {
    pub feasible: bool,
    /// Minimum-norm `z` solving both equations.
    pub witness: Option<Matrix<S>>,
    pub obstruction: Option<Obstruction<S>>,
}

/// `trace(z·C)` as a row over the row-major entries of `z`: `Σ z_ij C_ji`.
fn pairing_row<S: Scalar>(c: &Matrix<S>) -> Vec<S> {
    let n = c.n();
    let mut row = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            row.push(c[(j, i)].clone());
        }
    }
    row
}

/// Decide whether some `z` (skew-Hermitian when `star`) satisfies
/// `trace([z,a]F) = v_a` and `trace([z,b]F) = v_b`, where `F` is the density of `φ`.
///
/// Uses `trace([z,a]F) = trace(z·[a,F])`, so each constraint is a single row.
pub fn feasibility_two_point<S: Scalar>(
    a: &Matrix<S>,
    b: &Matrix<S>,
    phi: &Functional<S>,
    v_a: &S,
    v_b: &S,
    star: bool,
) -> Result<FeasibilityVerdict<S>, MatError> {
    a.check_same(b)?;
    a.check_same(phi.density())?;
    let n = a.n();
    let f = phi.density();
    let c_a = a.commutator(f)?;
    let c_b = b.commutator(f)?;

    let verdict = if star {
        let weights = skew_hermitian_weights::<S>(n);
        let (w_a, w_b) = (skew_pairings(&c_a), skew_pairings(&c_b));
        let rows = vec![
            w_a.iter().map(|w| w.re()).collect::<Vec<_>>(),
            w_a.iter().map(|w| w.im()).collect(),
            w_b.iter().map(|w| w.re()).collect(),
            w_b.iter().map(|w| w.im()).collect(),
        ];
        let rhs = [v_a.re(), v_a.im(), v_b.re(), v_b.im()];
        match min_norm_solution(&Dense::from_rows(&rows), &rhs, Some(&weights)) {
            Consistency::Consistent(t) => {
                let z = skew_from_coords(n, &t.iter().map(|tk| tk.re()).collect::<Vec<_>>());
                feasible(z)
            }
            Consistency::Inconsistent { combination, value } => {
                let labels = ["Re φΔ(a)", "Im φΔ(a)", "Re φΔ(b)", "Im φΔ(b)"];
                let description = format!(
                    "for every *-derivation D the combination {} of the values of φD vanishes, \
                     but the prescribed values give {}",
                    describe_combination(&combination, &labels),
                    format_scalar(&value)
                );
                infeasible(combination, value, description)
            }
        }
    } else {
        let rows = vec![pairing_row(&c_a), pairing_row(&c_b)];
        let rhs = [v_a.clone(), v_b.clone()];
        match min_norm_solution(&Dense::from_rows(&rows), &rhs, None) {
            Consistency::Consistent(zv) => feasible(Matrix::from_vec(n, zv)?),
            Consistency::Inconsistent { combination, value } => {
                let description = format!(
                    "{} = 0 forces {} = 0, but the prescribed values give {}",
                    describe_combination(&combination, &["[a,F]", "[b,F]"]),
                    describe_combination(&combination, &["φΔ(a)", "φΔ(b)"]),
                    format_scalar(&value)
                );
                infeasible(combination, value, description)
            }
        }
    };

    if let Some(z) = &verdict.witness {
        let got_a = phi.apply_commutator(z, a)?;
        let got_b = phi.apply_commutator(z, b)?;
        let scale = [v_a.modulus(), v_b.modulus(), z.max_abs() * (c_a.max_abs() + c_b.max_abs())]
            .into_iter()
            .fold(1.0, f64::max);
        if !(got_a - v_a.clone()).negligible(scale) || !(got_b - v_b.clone()).negligible(scale) {
            return Err(MatError::Singular);
        }
    }
    Ok(verdict)
}

fn feasible<S: Scalar>(z: Matrix<S>) -> FeasibilityVerdict<S> {
    FeasibilityVerdict { feasible: true, witness: Some(z), obstruction: None }
}

fn infeasible<S: Scalar>(combination: Vec<S>, forced: S, description: String) -> FeasibilityVerdict<S> {
    FeasibilityVerdict {
        feasible: false,
        witness: None,
        obstruction: Some(Obstruction { combination, forced, description }),
    }
}

fn describe_combination<S: Scalar>(coeffs: &[S], labels: &[&str]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .zip(labels)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, l)| {
            if *c == S::one() {
                l.to_string()
            } else {
                format!("({})·{}", format_scalar(c), l)
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::{C64, CQ};

    fn q(re: i64, im: i64) -> CQ {
        CQ::from_parts(CQ::from_i64(re), CQ::from_i64(im))
    }

    #[test]
    fn p1_against_its_own_entry_needs_zero() {
        let p1 = Matrix::<CQ>::unit(2, 0, 0);
        let phi = Functional::rank_one(2, 0, 0);
        let yes = feasibility_two_point(&p1, &p1, &phi, &q(0, 0), &q(0, 0), false).unwrap();
        assert!(yes.feasible);
        let no = feasibility_two_point(&p1, &p1, &phi, &q(3, 1), &q(3, 1), false).unwrap();
        assert!(!no.feasible);
        assert!(no.obstruction.unwrap().forced != q(0, 0));
    }

    #[test]
    fn e12_entry_is_surjective() {
        let a = Matrix::<CQ>::unit(2, 0, 1);
        let b = Matrix::zeros(2);
        let phi = Functional::new(Matrix::unit(2, 1, 0));
        for v in [q(0, 0), q(5, -2), CQ::from_ratio(-1, 3)] {
            let ver = feasibility_two_point(&a, &b, &phi, &v, &q(0, 0), false).unwrap();
            assert!(ver.feasible);
            let z = ver.witness.unwrap();
            assert_eq!(z.commutator(&a).unwrap()[(0, 1)], v);
        }
    }

    #[test]
    fn commuting_diagonal_star_case() {
        let a = Matrix::<CQ>::diagonal(&[q(1, 0), q(2, 0)]);
        let b = Matrix::zeros(2);
        let phi = Functional::rank_one(2, 0, 0);
        assert!(feasibility_two_point(&a, &b, &phi, &q(0, 0), &q(0, 0), true).unwrap().feasible);
        assert!(!feasibility_two_point(&a, &b, &phi, &q(0, 1), &q(0, 0), true).unwrap().feasible);
    }

    #[test]
    fn star_witness_is_skew_and_minimal() {
        // φ = ξ1⊗ξ2 reads the (2,1) entry and [z,e_11]_21 = z_21
        let a = Matrix::<CQ>::unit(2, 0, 0);
        let b = Matrix::zeros(2);
        let phi = Functional::rank_one(2, 0, 1);
        let ver = feasibility_two_point(&a, &b, &phi, &q(1, 1), &q(0, 0), true).unwrap();
        let z = ver.witness.unwrap();
        assert_eq!(z.adjoint(), -&z);
        assert_eq!(z, Matrix::from_rows(vec![vec![q(0, 0), q(-1, 1)], vec![q(1, 1), q(0, 0)]]).unwrap());
    }

    #[test]
    fn star_restricts_more_than_plain() {
        // the (1,1) entry of [z, e_12 + e_21] is z_12 − z_21, real-imaginary constrained under z* = −z
        let a = &Matrix::<CQ>::unit(2, 0, 1) + &Matrix::unit(2, 1, 0);
        let b = Matrix::zeros(2);
        let phi = Functional::rank_one(2, 0, 0);
        let v = q(0, 1);
        assert!(feasibility_two_point(&a, &b, &phi, &v, &q(0, 0), false).unwrap().feasible);
        assert!(!feasibility_two_point(&a, &b, &phi, &v, &q(0, 0), true).unwrap().feasible);
        assert!(feasibility_two_point(&a, &b, &phi, &q(2, 0), &q(0, 0), true).unwrap().feasible);
    }

    #[test]
    fn float_backend_agrees() {
        let a = Matrix::<C64>::unit(3, 0, 1);
        let b = Matrix::<C64>::unit(3, 1, 2);
        let phi = Functional::new(Matrix::unit(3, 2, 0));
        let v = C64::new(0.5, -1.0);
        let ver = feasibility_two_point(&a, &b, &phi, &v, &C64::new(0.0, 0.0), false).unwrap();
        assert!(ver.feasible);
    }

    #[test]
    fn dimension_mismatch() {
        let a = Matrix::<CQ>::zeros(2);
        let b = Matrix::zeros(3);
        let phi = Functional::zero(2);
        assert!(feasibility_two_point(&a, &b, &phi, &q(0, 0), &q(0, 0), false).is_err());
    }
}
