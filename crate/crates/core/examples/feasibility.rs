//! Two-point feasibility on M_2: is there a derivation `[z,·]` taking the
//! prescribed values `φ(Δ(a))`, `φ(Δ(b))`?
//!
//! ```bash
//! cargo run --example feasibility
//! ```

use derivation_lab::derlab::feasibility_two_point;
use derivation_lab::{Functional, Matrix, Scalar, CQ};

fn show(title: &str, a: &Matrix<CQ>, b: &Matrix<CQ>, phi: &Functional<CQ>, va: CQ, vb: CQ, star: bool) {
    let v = feasibility_two_point(a, b, phi, &va, &vb, star).expect("same size");
    println!("{title}");
    println!("  a = {a}, b = {b}, star = {star}");
    match (&v.witness, &v.obstruction) {
        (Some(z), _) => println!("  feasible, minimum-norm witness z = {z}"),
        (_, Some(ob)) => println!("  infeasible: {}", ob.description),
        _ => unreachable!(),
    }
}

fn main() {
    let p1 = Matrix::<CQ>::from_literals(&[&["1", "0"], &["0", "0"]]).unwrap();
    let e12 = Matrix::<CQ>::from_literals(&[&["0", "1"], &["0", "0"]]).unwrap();
    let e21 = e12.adjoint();
    let one = Matrix::<CQ>::identity(2);
    let phi = Functional::rank_one(2, 0, 1);
    let i = CQ::i();

    // φ(x) = x_21: φ([z,p_1]) = z_21 and φ([z,e_21]) = z_22 - z_11
    show("values of a genuine derivation", &p1, &e21, &phi, i.clone(), CQ::from_i64(3), false);
    show("φ([z,e_12]) is always zero", &p1, &e12, &phi, i.clone(), CQ::from_i64(3), false);
    show("the unit must map to zero", &one, &e12, &phi, CQ::from_i64(1), CQ::zero(), false);
    show("same point, two different values", &p1, &p1, &phi, CQ::from_i64(1), CQ::from_i64(2), false);

    // φ(x) = x_11 - x_22 with z* = -z: [z,e_12] has φ-value 2 z_21, so any value works
    let phi = Functional::new(Matrix::<CQ>::from_literals(&[&["1", "0"], &["0", "-1"]]).unwrap());
    show("star mode, a free value", &e12, &p1, &phi, CQ::from_parts(CQ::from_i64(1), CQ::from_i64(1)), CQ::zero(), true);
}
