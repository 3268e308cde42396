//! The five built-in maps that are not weak-2-local derivations, each
//! rejected with the result it violates.
//!
//! ```bash
//! cargo run --release --example adversaries
//! ```

use derivation_lab::blockalg::{check_block_preservation, BlockAlgebra};
use derivation_lab::derlab::{certify_weak_2_local, Adversary, CertifyConfig};
use derivation_lab::CQ;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let config = CertifyConfig { random_triples: 60, random_samples: 3, ..Default::default() };
    for adversary in Adversary::ALL {
        let dims: &[usize] = if adversary == Adversary::CrossBlockLeak { &[2, 2] } else { &[3] };
        let oracle = adversary.build::<CQ>(dims, 1, &config).unwrap();
        let mut violations = certify_weak_2_local(&oracle, &config).violations();
        if dims.len() > 1 {
            let alg = BlockAlgebra::new(dims.to_vec()).unwrap();
            let check = check_block_preservation(&oracle, &alg, 3, &mut ChaCha8Rng::seed_from_u64(1));
            if let Some(cx) = &check.counterexample {
                println!("{adversary}: {cx}");
            }
            if check.status == derivation_lab::report::Status::Fail {
                violations.push(check.citation);
            }
        }
        let cited = violations.contains(&adversary.citation());
        println!("{:<18} rejected citing {:?}: {}", adversary.name(), adversary.citation().id(), cited);
        for v in violations {
            println!("    {v}");
        }
    }
}
