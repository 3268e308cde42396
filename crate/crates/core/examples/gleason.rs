//! The projection measure `μ(p) = Δ(p)` of a *-derivation, its finite
//! additivity, and the linear map `G` that agrees with it on every
//! projection. On M_2 the result is flagged.
//!
//! ```bash
//! cargo run --release --example gleason
//! ```

use std::sync::Arc;

use derivation_lab::derlab::{MapOracle, Oracle};
use derivation_lab::matlin::random::random_trace_zero_skew;
use derivation_lab::measure::{estimate_bound, gleason_extend, linearize, verify_extension, ProjectionMeasure};
use derivation_lab::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for n in [2, 3, 4] {
        let z = random_trace_zero_skew::<C64, _>(n, &mut rng);
        let oracle: Arc<dyn Oracle<C64>> = Arc::new(MapOracle::inner_star(z.clone()).unwrap());
        let lin = linearize(oracle.clone(), 20, &mut rng).unwrap();
        let distance = lin.extension.operator_distance(|x| z.commutator(x).unwrap());

        let mu = ProjectionMeasure::from_oracle(oracle);
        let ext = gleason_extend(&mu).unwrap();
        let check = verify_extension(&ext, &mu, 200, &mut rng).unwrap();
        let bound = estimate_bound(&mu, 200, &mut rng).unwrap();

        println!("n = {n}");
        println!("  additivity: {} over {} families", lin.additivity.outcome.status, lin.additivity.families.len());
        println!("  distance from [z,·] on the units: {distance:.2e}");
        println!("  G vs Δ on non-Hermitian samples: {:.2e}", lin.residual);
        println!("  G vs μ on {} projections: {:.2e}", check.structured + check.random, check.residual());
        println!("  sup ‖μ(p)‖ estimate: {:.3} (2‖z‖ = {:.3})", bound.estimate, 2.0 * z.spectral_norm());
        for f in &ext.flags {
            println!("  flag: {f}");
        }
    }
}
