//! The constructive reconstruction of a *-derivation on M_n, compared with
//! the least-squares fit on the matrix units, on both backends.
//!
//! ```bash
//! cargo run --release --example reconstruct_mn -- 6
//! ```

use derivation_lab::derlab::MapOracle;
use derivation_lab::matlin::matrix_units;
use derivation_lab::matlin::random::random_trace_zero_skew;
use derivation_lab::reconstruct::{inner_samples, reconstruct_least_squares, reconstruct_mn_constructive, verify_inner};
use derivation_lab::{C64, CQ};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let mut rng = ChaCha8Rng::seed_from_u64(17);

    let z = random_trace_zero_skew::<CQ, _>(n, &mut rng);
    let oracle = MapOracle::inner_star(z.clone()).unwrap();
    let (found, trace) = reconstruct_mn_constructive(&oracle, true).unwrap();
    println!("exact, n = {n}");
    println!("  recovered z equals the source: {}", found == z);
    println!("  gammas: {:?}", trace.gammas.iter().map(|(k, g)| format!("γ_{k}{n} = {g}")).collect::<Vec<_>>());
    let samples = inner_samples::<CQ, _>(n, 5, &mut rng);
    println!("  verify_inner residual: {}", verify_inner(&oracle, &found, &samples).unwrap().residual);

    let z = random_trace_zero_skew::<C64, _>(n, &mut rng);
    let oracle = MapOracle::inner_star(z.clone()).unwrap();
    let (found, _) = reconstruct_mn_constructive(&oracle, true).unwrap();
    let ls = reconstruct_least_squares(&oracle, &matrix_units(n), true).unwrap();
    println!("float, n = {n}");
    println!("  |constructive - source| = {:.2e}", (&found - &z).frobenius_norm());
    println!("  |constructive - lsq|    = {:.2e}", (&found - &ls.z).frobenius_norm());
    println!("  lsq residual            = {:.2e} over {} points", ls.residual, ls.points);
}
