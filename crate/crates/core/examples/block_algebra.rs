//! A *-derivation on `M_1 ⊕ M_2 ⊕ M_3`: block preservation, additivity
//! across blocks, and reconstruction block by block.
//!
//! ```bash
//! cargo run --example block_algebra
//! ```

use std::sync::Arc;

use derivation_lab::blockalg::{check_block_additivity, check_block_preservation, reconstruct_blockwise, BlockAlgebra};
use derivation_lab::derlab::{MapOracle, Oracle};
use derivation_lab::matlin::random::random_trace_zero_skew;
use derivation_lab::{Matrix, CQ};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let alg = BlockAlgebra::from_json(r#"{"dims": [1, 2, 3]}"#).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let blocks: Vec<Matrix<CQ>> = alg.dims.iter().map(|&d| random_trace_zero_skew(d, &mut rng)).collect();
    let oracle = MapOracle::composite(blocks.iter().map(|z| MapOracle::inner_star(z.clone()).unwrap()).collect());

    let pres = check_block_preservation(&oracle, &alg, 4, &mut rng);
    let add = check_block_additivity(&oracle, &alg, 4, &mut rng);
    println!("block preservation: {} ({} instances)", pres.status, pres.instances);
    println!("block additivity:   {} ({} instances)", add.status, add.instances);

    let oracle: Arc<dyn Oracle<CQ>> = Arc::new(oracle);
    let rec = reconstruct_blockwise(oracle, &alg, true, 4, &mut rng).unwrap();
    for (k, (found, source)) in rec.blocks.iter().zip(&blocks).enumerate() {
        println!("block {}: z = {found}  (source recovered: {})", k + 1, found == source);
    }
    println!("assembled z residual: {}", rec.verification.residual);

    match alg.check_mask(&Matrix::<CQ>::unit(6, 0, 5)) {
        Ok(()) => println!("unexpected: e_16 accepted"),
        Err(e) => println!("e_16 is rejected: {e}"),
    }
}
