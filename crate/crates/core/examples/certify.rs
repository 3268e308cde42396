//! Certify a black-box map: the shipped two-point battery, random triples
//! and the identity suite, on an inner *-derivation and on a map that leaks
//! the trace.
//!
//! ```bash
//! cargo run --example certify
//! ```

use derivation_lab::derlab::{certify_weak_2_local, CertifyConfig, MapOracle, Perturbation};
use derivation_lab::matlin::random::random_trace_zero_skew;
use derivation_lab::report::CertReport;
use derivation_lab::{Scalar, CQ};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn print(title: &str, report: &CertReport) {
    println!("{title}: {}", report.overall);
    for c in &report.checks {
        print!("  {:<26} {}", c.name, c.status);
        if let Some(cx) = &c.counterexample {
            print!("  ({cx})");
        }
        println!();
    }
    for v in report.violations() {
        println!("  violated: {v}");
    }
}

fn main() {
    let z = random_trace_zero_skew::<CQ, _>(3, &mut ChaCha8Rng::seed_from_u64(5));
    let config = CertifyConfig { star: true, random_triples: 100, ..Default::default() };

    let good = MapOracle::inner_star(z.clone()).unwrap();
    print("inner *-derivation", &certify_weak_2_local(&good, &config));

    let leak = MapOracle::perturbed(z, CQ::one(), Perturbation::TraceLeak);
    print("[z,x] + trace(x) e_11", &certify_weak_2_local(&leak, &config));
}
