//! Check outcomes and certification reports shared by every battery.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A table oracle could not answer a required input.
    Inconclusive,
    /// The check does not apply in the requested mode.
    Skipped,
}

impl Status {
    /// Fail dominates Inconclusive, which dominates Pass; Skipped is neutral.
    pub fn combine(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            (Pass, _) | (_, Pass) => Pass,
            (Skipped, Skipped) => Skipped,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
            Status::Skipped => "skipped",
        })
    }
}

/// The mathematical result a check enforces, carried by every failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Citation {
    UnitVanishes,
    ComplementRule,
    CornerVanishing,
    TraceVanishes,
    Homogeneity,
    SharpSelfAdjoint,
    Cartesian,
    OrthogonalAdditivity,
    OrthogonalSumAdditivity,
    AlmostOrthogonality,
    TwoPointCondition,
    CornerRestriction,
    BlockPreservation,
    BlockAdditivity,
    M2ProjectionImage,
    M2UnitImage,
    M2Vanishing,
    ProjectionImageHermitian,
    ProjectionImageShape,
    AntisymmetricConsistency,
    UnitImageDiagonal,
    GammaImaginary,
    GleasonExtension,
    InnerResidual,
}

impl Citation {
    pub fn id(self) -> &'static str {
        use Citation::*;
        match self {
            UnitVanishes => "unit_vanishes",
            ComplementRule => "complement_rule",
            CornerVanishing => "corner_vanishing",
            TraceVanishes => "trace_vanishes",
            Homogeneity => "homogeneity",
            SharpSelfAdjoint => "sharp_self_adjoint",
            Cartesian => "cartesian",
            OrthogonalAdditivity => "orthogonal_additivity",
            OrthogonalSumAdditivity => "orthogonal_sum_additivity",
            AlmostOrthogonality => "almost_orthogonality",
            TwoPointCondition => "two_point_condition",
            CornerRestriction => "corner_restriction",
            BlockPreservation => "block_preservation",
            BlockAdditivity => "block_additivity",
            M2ProjectionImage => "m2_projection_image",
            M2UnitImage => "m2_unit_image",
            M2Vanishing => "m2_vanishing",
            ProjectionImageHermitian => "projection_image_hermitian",
            ProjectionImageShape => "projection_image_shape",
            AntisymmetricConsistency => "antisymmetric_consistency",
            UnitImageDiagonal => "unit_image_diagonal",
            GammaImaginary => "gamma_imaginary",
            GleasonExtension => "gleason_extension",
            InnerResidual => "inner_residual",
        }
    }

    /// Name of the result.
    pub fn result(self) -> &'static str {
        use Citation::*;
        match self {
            UnitVanishes => "weak-2-local derivations vanish at the unit",
            ComplementRule => "complement rule",
            CornerVanishing => "corner vanishing at projections",
            TraceVanishes => "trace vanishing on M_n",
            Homogeneity => "1-homogeneity",
            SharpSelfAdjoint => "sharp-symmetric maps preserve self-adjoint elements",
            Cartesian => "cartesian linearity of weak-2-local *-derivations",
            OrthogonalAdditivity => "finite additivity on orthogonal projections",
            OrthogonalSumAdditivity => "additivity on orthogonal spectral sums",
            AlmostOrthogonality => "almost orthogonality",
            TwoPointCondition => "weak-2-local two-point condition",
            CornerRestriction => "corner restriction of a derivation",
            BlockPreservation => "blocks are invariant in finite-dimensional C*-algebras",
            BlockAdditivity => "additivity across blocks",
            M2ProjectionImage => "M_2 step I: image of p_1",
            M2UnitImage => "M_2 step II: image of e_12",
            M2Vanishing => "M_2 steps III-VI: the corrected map vanishes",
            ProjectionImageHermitian => "images of minimal projections are self-adjoint",
            ProjectionImageShape => "images of minimal projections are off-diagonal",
            AntisymmetricConsistency => "antisymmetric consistency of projection images",
            UnitImageDiagonal => "corrected images of e_kn are multiples of e_kn",
            GammaImaginary => "the coefficients gamma_kn are purely imaginary",
            GleasonExtension => "linear extension of the projection measure",
            InnerResidual => "agreement with the inner derivation",
        }
    }

    pub fn statement(self) -> &'static str {
        use Citation::*;
        match self {
            UnitVanishes => "Δ(1) = 0",
            ComplementRule => "Δ(1-x) + Δ(x) = 0",
            CornerVanishing => "pΔ(p)p = 0 and (1-p)Δ(p)(1-p) = 0",
            TraceVanishes => "tr Δ(x) = 0",
            Homogeneity => "Δ(λa) = λΔ(a)",
            SharpSelfAdjoint => "Δ(A_sa) ⊆ A_sa whenever Δ♯ = Δ",
            Cartesian => "Δ(a+ib) = Δ(a) + iΔ(b) = Δ(a-ib)*",
            OrthogonalAdditivity => "Δ(Σ λ_j p_j) = Σ λ_j Δ(p_j)",
            OrthogonalSumAdditivity => "Δ(a+b) = Δ(a) + Δ(b) for a, b spectral sums over one orthogonal family",
            AlmostOrthogonality => "pΔ(a+λp+μq)q = pΔ(λp+μq)q and pΔ(a+λp)p = 0",
            TwoPointCondition => "φΔ(a) = φD(a) and φΔ(b) = φD(b) for some (*-)derivation D",
            CornerRestriction => "x ↦ pD(x)p is a derivation on pAp",
            BlockPreservation => "Δ(a) = q_iΔ(a)q_i for a in Aq_i",
            BlockAdditivity => "Δ((a_i)) = (Δ(a_i)) for self-adjoint (a_i)",
            M2ProjectionImage => "[z,p_1] = -z_12 e_12 + z_21 e_21",
            M2UnitImage => "[z,e_12] = -z_21 p_1 + (z_11 - z_22) e_12 + z_21 p_2",
            M2Vanishing => "Δ - [z_0,·] - [z_1,·] vanishes at p_2 and e_21",
            ProjectionImageHermitian => "Δ(p_j) = Δ(p_j)*",
            ProjectionImageShape => "Δ(p_j) = Σ_{k≠j} conj(λ_k^(j)) e_kj + λ_k^(j) e_jk",
            AntisymmetricConsistency => "λ_i^(j) = -conj(λ_j^(i))",
            UnitImageDiagonal => "(Δ - [z_0,·])(e_kn) = γ_kn e_kn",
            GammaImaginary => "γ_kn ∈ iℝ",
            GleasonExtension => "G(p) = μ(p) = Δ(p) for every projection p",
            InnerResidual => "Δ(x) = [z,x]",
        }
    }
}

impl Serialize for Citation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Citation", 3)?;
        st.serialize_field("id", self.id())?;
        st.serialize_field("result", self.result())?;
        st.serialize_field("statement", self.statement())?;
        st.end()
    }
}

impl fmt::Display for Citation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.result(), self.statement())
    }
}

/// Outcome of one named check over all its instances.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub citation: Citation,
    pub status: Status,
    pub instances: usize,
    /// Largest residual seen over the evaluated instances.
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Accumulates instances of one check.
#[derive(Debug)]
pub struct CheckBuilder {
    name: String,
    citation: Citation,
    instances: usize,
    residual: f64,
    worst_failure: Option<(f64, String)>,
    missing: Option<String>,
    note: Option<String>,
}

impl CheckBuilder {
    pub fn new(name: impl Into<String>, citation: Citation) -> Self {
        CheckBuilder {
            name: name.into(),
            citation,
            instances: 0,
            residual: 0.0,
            worst_failure: None,
            missing: None,
            note: None,
        }
    }

    pub fn record(&mut self, passed: bool, residual: f64, label: impl FnOnce() -> String) {
        self.instances += 1;
        self.residual = self.residual.max(residual);
        if !passed {
            let replace = match &self.worst_failure {
                None => true,
                Some((r, _)) => residual > *r,
            };
            if replace {
                self.worst_failure = Some((residual, label()));
            }
        }
    }

    pub fn inconclusive(&mut self, label: impl FnOnce() -> String) {
        if self.missing.is_none() {
            self.missing = Some(label());
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.note = Some(note.into());
    }

    pub fn failed(&self) -> bool {
        self.worst_failure.is_some()
    }

    pub fn finish(self) -> CheckOutcome {
        let (status, counterexample) = match (self.worst_failure, self.missing) {
            (Some((_, label)), _) => (Status::Fail, Some(label)),
            (None, Some(missing)) => (Status::Inconclusive, Some(missing)),
            (None, None) if self.instances == 0 => (Status::Skipped, None),
            (None, None) => (Status::Pass, None),
        };
        CheckOutcome {
            name: self.name,
            citation: self.citation,
            status,
            instances: self.instances,
            residual: self.residual,
            counterexample,
            note: self.note,
        }
    }

    pub fn skipped(name: impl Into<String>, citation: Citation, reason: impl Into<String>) -> CheckOutcome {
        CheckOutcome {
            name: name.into(),
            citation,
            status: Status::Skipped,
            instances: 0,
            residual: 0.0,
            counterexample: None,
            note: Some(reason.into()),
        }
    }
}

/// Per-check results with an aggregate verdict.
#[derive(Debug, Clone, Serialize)]
pub struct CertReport {
    pub checks: Vec<CheckOutcome>,
    pub overall: Status,
}

impl CertReport {
    pub fn new(checks: Vec<CheckOutcome>) -> Self {
        let overall = checks
            .iter()
            .fold(Status::Skipped, |acc, c| acc.combine(c.status));
        // an all-skipped report carries no evidence either way
        let overall = if overall == Status::Skipped { Status::Inconclusive } else { overall };
        CertReport { checks, overall }
    }

    pub fn merge(mut self, other: CertReport) -> Self {
        self.checks.extend(other.checks);
        CertReport::new(self.checks)
    }

    pub fn passed(&self) -> bool {
        self.overall == Status::Pass
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Citations of every failed check.
    pub fn violations(&self) -> Vec<Citation> {
        let mut v: Vec<Citation> = self
            .checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .map(|c| c.citation)
            .collect();
        v.sort();
        v.dedup();
        v
    }
}
