//! Built-in maps that are not weak-2-local derivations, each breaking one
//! specific identity.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::certify::{certify_weak_2_local, CertifyConfig};
use super::lemmas::SampleSet;
use super::oracle::{MapOracle, OracleError, Perturbation, RecordingOracle};
use crate::matlin::random::{random_matrix, random_trace_zero_skew};
use crate::matlin::{Backend, Matrix, Scalar, C64};
use crate::report::Citation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adversary {
    /// `[z,x] + trace(x)·e_11`
    TraceLeak,
    /// `[z,x]`, except `c·1 ↦ c·e_12`
    UnitViolation,
    /// A table of `[z,·]` with one orthogonal sum altered
    AdditivityTable,
    /// `[z,x] + x_11·e_1N` on a block algebra, `z` block-diagonal
    CrossBlockLeak,
    /// `[z,x] + 10⁻³·trace(x²)·e_12`
    Nonlinear,
}

impl Adversary {
    pub const ALL: [Adversary; 5] = [
        Adversary::TraceLeak,
        Adversary::UnitViolation,
        Adversary::AdditivityTable,
        Adversary::CrossBlockLeak,
        Adversary::Nonlinear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Adversary::TraceLeak => "trace_leak",
            Adversary::UnitViolation => "unit_violation",
            Adversary::AdditivityTable => "additivity_table",
            Adversary::CrossBlockLeak => "cross_block_leak",
            Adversary::Nonlinear => "nonlinear",
        }
    }

    /// The result a certification report must cite when rejecting this map.
    pub fn citation(self) -> Citation {
        match self {
            Adversary::TraceLeak | Adversary::UnitViolation => Citation::UnitVanishes,
            Adversary::AdditivityTable => Citation::OrthogonalAdditivity,
            Adversary::CrossBlockLeak => Citation::BlockPreservation,
            Adversary::Nonlinear => Citation::Homogeneity,
        }
    }

    /// Build the map on `M_{n_1} ⊕ … ⊕ M_{n_m}` (a single block for all but
    /// the cross-block leak). `z` is drawn from `seed`, skew-Hermitian with
    /// trace zero when `config.star`.
    ///
    /// The additivity table lists exactly the inputs `certify_weak_2_local`
    /// queries under `config`, so certifying it with that config is never inconclusive.
    pub fn build<S: Scalar>(self, dims: &[usize], seed: u64, config: &CertifyConfig) -> Result<MapOracle<S>, OracleError> {
        let n: usize = dims.iter().sum();
        if n < 2 {
            return Err(OracleError::Invalid(format!("{self} needs n >= 2")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |d: usize| -> Matrix<S> {
            if config.star {
                random_trace_zero_skew(d, &mut rng)
            } else {
                random_matrix(d, &mut rng)
            }
        };
        match self {
            Adversary::TraceLeak => Ok(MapOracle::perturbed(draw(n), S::one(), Perturbation::TraceLeak)),
            Adversary::UnitViolation => Ok(MapOracle::perturbed(draw(n), S::one(), Perturbation::ScalarSpike)),
            Adversary::Nonlinear => {
                let eps = match S::BACKEND {
                    Backend::Exact => S::from_ratio(1, 1000),
                    Backend::Float => S::from_c64(C64::new(1e-3, 0.0)),
                };
                Ok(MapOracle::perturbed(draw(n), eps, Perturbation::TraceSquare))
            }
            Adversary::CrossBlockLeak => {
                if dims.len() < 2 {
                    return Err(OracleError::Invalid("cross_block_leak needs at least two blocks".into()));
                }
                let blocks: Vec<Matrix<S>> = dims.iter().map(|&d| draw(d)).collect();
                let leak = Perturbation::EntryLeak { src: (0, 0), dst: (0, n - 1) };
                Ok(MapOracle::perturbed(Matrix::direct_sum(&blocks), S::one(), leak))
            }
            Adversary::AdditivityTable => {
                let z = draw(n);
                let recorder = RecordingOracle::new(MapOracle::inner(z.clone()));
                certify_weak_2_local(&recorder, config);
                let target = SampleSet::<S>::structured(n)
                    .families
                    .into_iter()
                    .find(|f| f.parts.len() == 2)
                    .map(|f| f.combination(0..2))
                    .expect("n >= 2 has a pair family");
                let mut entries = Vec::new();
                for x in recorder.inputs() {
                    let mut y = z.commutator(&x)?;
                    if x == target {
                        y = &y + &Matrix::unit(n, 0, n - 1);
                    }
                    entries.push((x, y));
                }
                MapOracle::table(n, entries)
            }
        }
    }
}

impl fmt::Display for Adversary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Adversary {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Adversary::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown adversary {s:?}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derlab::Oracle;
    use crate::matlin::CQ;

    #[test]
    fn names_round_trip() {
        for a in Adversary::ALL {
            assert_eq!(a.name().parse::<Adversary>().unwrap(), a);
        }
    }

    #[test]
    fn additivity_table_answers_every_certifier_query() {
        let cfg = CertifyConfig { random_triples: 20, random_samples: 2, ..Default::default() };
        let table = Adversary::AdditivityTable.build::<CQ>(&[3], 4, &cfg).unwrap();
        let report = certify_weak_2_local(&table, &cfg);
        assert!(!report.passed());
        assert!(report.checks.iter().all(|c| c.status != crate::report::Status::Inconclusive), "{report:?}");
        assert!(report.violations().contains(&Citation::OrthogonalAdditivity));
        assert_eq!(table.dim(), 3);
    }

    #[test]
    fn cross_block_leak_needs_blocks() {
        let cfg = CertifyConfig::default();
        assert!(Adversary::CrossBlockLeak.build::<CQ>(&[3], 0, &cfg).is_err());
        assert!(Adversary::CrossBlockLeak.build::<CQ>(&[1, 2], 0, &cfg).is_ok());
    }
}
