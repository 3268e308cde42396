//! Certification of the weak-2-local property: the lemma pre-filter plus the
//! two-point feasibility battery.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::battery::{structured_triples, Triple};
use super::feasibility::feasibility_two_point;
use super::lemmas::{lemma_suite, SampleSet};
use super::oracle::{Oracle, OracleError};
use crate::matlin::random::{random_matrix, random_orthogonal_family, random_projection};
use crate::matlin::{format_scalar, Functional, Matrix, Scalar};
use crate::report::{CertReport, CheckBuilder, CheckOutcome, Citation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Structured,
    Randomized,
    Both,
}

impl Strategy {
    pub fn structured(self) -> bool {
        matches!(self, Strategy::Structured | Strategy::Both)
    }

    pub fn randomized(self) -> bool {
        matches!(self, Strategy::Randomized | Strategy::Both)
    }
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "structured" => Ok(Strategy::Structured),
            "randomized" => Ok(Strategy::Randomized),
            "both" => Ok(Strategy::Both),
            other => Err(format!("unknown strategy {other:?} (structured, randomized, both)")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Structured => "structured",
            Strategy::Randomized => "randomized",
            Strategy::Both => "both",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CertifyConfig {
    pub strategy: Strategy,
    pub star: bool,
    pub seed: u64,
    /// Random two-point triples drawn by the randomized strategy.
    pub random_triples: usize,
    /// Random lemma-suite instances of each kind.
    pub random_samples: usize,
    pub threads: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            strategy: Strategy::Both,
            star: false,
            seed: 0x5eed,
            random_triples: 200,
            random_samples: 6,
            threads: 1,
        }
    }
}

/// Random triples biased towards the degenerate configurations where the
/// two-point condition has teeth: complements, multiples, corners.
pub fn random_triples<S: Scalar, R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<Triple<S>> {
    let mut out = Vec::with_capacity(count);
    if n == 0 {
        return out;
    }
    let one = Matrix::<S>::identity(n);
    for k in 0..count {
        let g = random_matrix::<S, _>(n, rng);
        let (kind, a, b, density) = match k % 5 {
            0 => ("generic", random_matrix(n, rng), random_matrix(n, rng), g),
            1 => {
                let x = random_matrix::<S, _>(n, rng);
                ("complement", x.clone(), &one - &x, g)
            }
            2 => {
                let p = random_projection::<S, _>(n, rng).into_matrix();
                let side = if rng.random_bool(0.5) { p.clone() } else { &one - &p };
                let f = &(&side * &g) * &side;
                ("corner", p.clone(), p, f)
            }
            3 => {
                let x = random_matrix::<S, _>(n, rng);
                let lambda = S::sample(rng);
                ("multiple", x.clone(), x.scale(&lambda), g)
            }
            _ => {
                let fam = random_orthogonal_family::<S, _>(n, 1.min(n), rng);
                let p = fam[0].matrix().clone();
                let r = &one - &p;
                let x = &(&r * &random_matrix::<S, _>(n, rng)) * &r;
                let lambda = S::sample(rng);
                let f = &(&p * &g) * &p;
                ("almost orthogonal", &x + &p.scale(&lambda), p, f)
            }
        };
        out.push(Triple {
            label: format!("random {kind} #{k}: a = {a}, b = {b}, F = {density}"),
            a,
            b,
            phi: Functional::new(density),
        });
    }
    out
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

enum TripleOutcome {
    Feasible,
    Infeasible { residual: f64, detail: String },
    Missing(String),
    Outside,
}

/// Run the two-point test on every triple, evaluating each distinct input once.
pub fn two_point_check<S: Scalar, O: Oracle<S> + ?Sized>(
    oracle: &O,
    name: &str,
    triples: &[Triple<S>],
    star: bool,
    threads: usize,
) -> CheckOutcome {
    let mut inputs: Vec<Matrix<S>> = Vec::new();
    let mut index: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut slots: Vec<(usize, usize)> = Vec::with_capacity(triples.len());
    for t in triples {
        let mut slot = |m: &Matrix<S>| -> usize {
            let bucket = index.entry(m.fingerprint()).or_default();
            if let Some(&k) = bucket.iter().find(|&&k| inputs[k] == *m) {
                return k;
            }
            inputs.push(m.clone());
            bucket.push(inputs.len() - 1);
            inputs.len() - 1
        };
        let ia = slot(&t.a);
        let ib = slot(&t.b);
        slots.push((ia, ib));
    }

    let outcomes: Vec<TripleOutcome> = with_threads(threads, || {
        let images: Vec<Result<Matrix<S>, OracleError>> = inputs.par_iter().map(|x| oracle.eval(x)).collect();
        triples
            .par_iter()
            .zip(slots.par_iter())
            .map(|(t, &(ia, ib))| {
                let (ya, yb) = match (&images[ia], &images[ib]) {
                    (Ok(ya), Ok(yb)) => (ya, yb),
                    (Err(OracleError::OffBlock { .. }), _) | (_, Err(OracleError::OffBlock { .. })) => {
                        return TripleOutcome::Outside
                    }
                    (Err(e), _) | (_, Err(e)) => return TripleOutcome::Missing(e.to_string()),
                };
                let (va, vb) = match (t.phi.apply(ya), t.phi.apply(yb)) {
                    (Ok(va), Ok(vb)) => (va, vb),
                    (Err(e), _) | (_, Err(e)) => return TripleOutcome::Missing(e.to_string()),
                };
                match feasibility_two_point(&t.a, &t.b, &t.phi, &va, &vb, star) {
                    Ok(v) if v.feasible => TripleOutcome::Feasible,
                    Ok(v) => {
                        let ob = v.obstruction.expect("infeasible verdicts carry an obstruction");
                        TripleOutcome::Infeasible {
                            residual: ob.forced.modulus(),
                            detail: format!(
                                "φΔ(a) = {}, φΔ(b) = {}; {}",
                                format_scalar(&va),
                                format_scalar(&vb),
                                ob.description
                            ),
                        }
                    }
                    Err(e) => TripleOutcome::Missing(e.to_string()),
                }
            })
            .collect()
    });

    let mut builder = CheckBuilder::new(name, Citation::TwoPointCondition);
    let mut outside = 0;
    for (t, outcome) in triples.iter().zip(outcomes) {
        match outcome {
            TripleOutcome::Feasible => builder.record(true, 0.0, String::new),
            TripleOutcome::Infeasible { residual, detail } => {
                builder.record(false, residual, || format!("{} ({detail})", t.label))
            }
            TripleOutcome::Missing(e) => builder.inconclusive(|| format!("{}: {e}", t.label)),
            TripleOutcome::Outside => outside += 1,
        }
    }
    if outside > 0 {
        builder.note(format!("{outside} triples lie outside the oracle's block domain and were not evaluated"));
    }
    builder.finish()
}

/// Certify that `oracle` behaves as a weak-2-local derivation (a weak-2-local
/// `*`-derivation with `config.star`) on the chosen battery.
pub fn certify_weak_2_local<S: Scalar, O: Oracle<S> + ?Sized>(oracle: &O, config: &CertifyConfig) -> CertReport {
    let n = oracle.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut samples = SampleSet::default();
    if config.strategy.structured() {
        samples.extend(SampleSet::structured(n));
    }
    if config.strategy.randomized() {
        samples.extend(SampleSet::random(n, config.random_samples, &mut rng));
    }
    let mut report = lemma_suite(oracle, &samples, config.star);

    let mut checks = Vec::new();
    if config.strategy.structured() {
        match structured_triples::<S>(n) {
            Ok(triples) => checks.push(two_point_check(oracle, "two_point_structured", &triples, config.star, config.threads)),
            Err(e) => {
                let mut b = CheckBuilder::new("two_point_structured", Citation::TwoPointCondition);
                b.inconclusive(|| e.to_string());
                checks.push(b.finish());
            }
        }
    }
    if config.strategy.randomized() {
        let triples = random_triples::<S, _>(n, config.random_triples, &mut rng);
        checks.push(two_point_check(oracle, "two_point_randomized", &triples, config.star, config.threads));
    }
    report = report.merge(CertReport::new(checks));
    report
}
