//! Weak-2-local derivations: oracles, the exact two-point decision, the
//! lemma suite and the certifier.

mod adversary;
mod battery;
mod certify;
mod corner;
mod feasibility;
mod lemmas;
mod oracle;

pub use adversary::Adversary;
pub use battery::{structured_battery, structured_triples, Battery, BatteryError, Template, Triple};
pub use certify::{certify_weak_2_local, random_triples, two_point_check, CertifyConfig, Strategy};
pub use corner::{restrict_corner, CornerError};
pub use feasibility::{feasibility_two_point, FeasibilityVerdict, Obstruction};
pub use lemmas::{lemma_suite, AlmostOrthogonal, Family, SampleSet};
pub use oracle::{CornerFrame, MapOracle, Oracle, OracleError, Perturbation, RecordingOracle, Table};
