//! The identities every weak-2-local derivation satisfies, checked on an
//! inner derivation with exact arithmetic. Residuals are exactly zero.
//!
//! ```bash
//! cargo run --example lemma_suite -- 4
//! ```

use derivation_lab::derlab::{lemma_suite, MapOracle, SampleSet};
use derivation_lab::matlin::random::random_trace_zero_skew;
use derivation_lab::CQ;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let z = random_trace_zero_skew::<CQ, _>(n, &mut rng);
    println!("z = {z}");

    let mut samples = SampleSet::<CQ>::structured(n);
    samples.extend(SampleSet::random(n, 10, &mut rng));
    let report = lemma_suite(&MapOracle::inner_star(z).unwrap(), &samples, true);
    for c in &report.checks {
        println!("{:<26} {:<8} {:>4} instances  residual {}", c.name, c.status.to_string(), c.instances, c.residual);
    }
    println!("overall: {}", report.overall);
}
