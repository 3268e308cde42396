//! Recover `z` on M_2 from the values at `p_1` and `e_12`, on the worked
//! example `z = [[i, 1], [-1, 2i]]` and on a map that is not a derivation.
//!
//! ```bash
//! cargo run --example reconstruct_m2
//! ```

use derivation_lab::derlab::{MapOracle, Perturbation};
use derivation_lab::reconstruct::reconstruct_m2;
use derivation_lab::{Matrix, Scalar, CQ};

fn main() {
    let z = Matrix::<CQ>::from_literals(&[&["i", "1"], &["-1", "2i"]]).unwrap();
    let (found, trace) = reconstruct_m2(&MapOracle::inner(z.clone())).unwrap();
    println!("source z        = {z}");
    for l in &trace.lambdas {
        println!("lambda^({})_{}    = {}", l.j, l.k, l.value);
    }
    println!("delta           = {}", trace.delta.as_ref().unwrap());
    println!("z_0             = {}", trace.z0);
    println!("z_1             = {}", trace.z1);
    println!("z_0 + z_1       = {}", trace.raw);
    println!("trace zero z    = {found}");
    for r in &trace.residuals {
        println!("  residual at {:<5} {}", r.point, r.residual);
    }

    let spike = MapOracle::perturbed(z, CQ::one(), Perturbation::TraceSquare);
    match reconstruct_m2(&spike) {
        Ok((z, _)) => println!("unexpected success: {z}"),
        Err(e) => println!("[z,x] + trace(x^2) e_12 is rejected: {e}"),
    }
}
