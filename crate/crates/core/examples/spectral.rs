//! Spectral resolution of a Hermitian matrix and the extension evaluated
//! through it: `G(x) = Σ λ_j μ(p_j)`.
//!
//! ```bash
//! cargo run --example spectral
//! ```

use std::sync::Arc;

use derivation_lab::derlab::MapOracle;
use derivation_lab::matlin::random::{random_hermitian, random_trace_zero_skew};
use derivation_lab::matlin::spectral_resolution;
use derivation_lab::measure::{gleason_extend, spectral_consistency, ProjectionMeasure};
use derivation_lab::{Matrix, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let x = random_hermitian::<C64, _>(3, &mut rng);
    let res = spectral_resolution(&x).unwrap();
    println!("x = {x}");
    for (lambda, p) in &res.parts {
        println!("  λ = {lambda:+.6}, rank {}", p.rank());
    }
    println!("‖x - Σ λ p‖ = {:.2e}", (&x - &res.reconstruct()).frobenius_norm());

    let degenerate = Matrix::<C64>::diagonal(&[C64::new(2.0, 0.0), C64::new(2.0, 0.0), C64::new(-1.0, 0.0)]);
    let res = spectral_resolution(&degenerate).unwrap();
    println!("diag(2, 2, -1) has {} spectral projections", res.parts.len());

    let z = random_trace_zero_skew::<C64, _>(3, &mut rng);
    let mu = ProjectionMeasure::from_oracle(Arc::new(MapOracle::inner_star(z).unwrap()));
    let ext = gleason_extend(&mu).unwrap();
    println!("‖G(x) - Σ λ μ(p)‖ = {:.2e}", spectral_consistency(&ext, &mu, &x).unwrap());
}
