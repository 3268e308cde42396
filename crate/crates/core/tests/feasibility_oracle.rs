mod common;

use common::{brute_feasible, random_triple};
use derivation_lab::derlab::feasibility_two_point;
use derivation_lab::Functional;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn agree_on(seed: u64, count: usize, star: bool) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut feasible = 0;
    for k in 0..count {
        let t = random_triple(&mut rng, star);
        let verdict = feasibility_two_point(&t.a, &t.b, &Functional::new(t.f.clone()), &t.va, &t.vb, star).unwrap();
        let expected = brute_feasible(&t.a, &t.b, &t.f, &t.va, &t.vb, star);
        assert_eq!(
            verdict.feasible, expected,
            "triple #{k}: a = {}, b = {}, F = {}, values {} / {}, star {star}",
            t.a, t.b, t.f, t.va, t.vb
        );
        if verdict.feasible {
            feasible += 1;
            assert!(verdict.witness.is_some());
        } else {
            assert!(verdict.obstruction.is_some());
        }
    }
    (feasible, count - feasible)
}

#[test]
fn plain_verdicts_match_elimination_over_eight_real_coordinates() {
    let (yes, no) = agree_on(1, 600, false);
    assert!(yes > 100 && no > 100, "{yes} feasible, {no} infeasible");
}

#[test]
fn star_verdicts_match_elimination_over_four_real_coordinates() {
    let (yes, no) = agree_on(2, 600, true);
    assert!(yes > 100 && no > 100, "{yes} feasible, {no} infeasible");
}

#[test]
fn witnesses_satisfy_both_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for star in [false, true] {
        for _ in 0..200 {
            let t = random_triple(&mut rng, star);
            let v = feasibility_two_point(&t.a, &t.b, &Functional::new(t.f.clone()), &t.va, &t.vb, star).unwrap();
            if let Some(z) = v.witness {
                let phi = |x| common::trace_value(&(&z.commutator(x).unwrap() * &t.f));
                assert_eq!(phi(&t.a), t.va);
                assert_eq!(phi(&t.b), t.vb);
                if star {
                    assert_eq!(z.adjoint(), -&z);
                }
            }
        }
    }
}
