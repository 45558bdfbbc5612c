//! Generators for the hardness reductions: each turns a source problem into
//! an attack instance, together with maps carrying certificates forward to
//! attacks and attacks back to certificates.
//!
//! Individuals are numbered in a fixed order — elements (or variable
//! gadgets, or vertices), then sets (or clauses, or edges), then dummies,
//! then special individuals — each block ascending by source order.

mod build;
pub mod source;

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{AttackInstance, RuleId, Solution};

pub use source::{
    check_certificate, rx3c_families, solve_source, source_corpus, validate_source, SourceCertificate, SourceProblem,
};

/// Catalog of reductions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theorem {
    /// CNF-SAT → CSR/LSR microbribery on protective instances.
    GmbProt,
    /// Vertex Cover → consent `s ≥ 2` relaxed destructive deletion.
    RdgcdiVc,
    /// RX3C → consent `(1, t ≥ 3)` relaxed exact deletion.
    RegcdiRx3c,
    /// Vertex Cover → consent `s, t ≥ 2` relaxed exact deletion.
    FstRegcdi,
    /// CNF-SAT → CSR relaxed general deletion.
    CsrRgcdi,
    /// CNF-SAT → CSR general deletion on protective instances.
    CsrGcdiProt,
    /// Set Cover → IC/2IC/2LIC destructive addition.
    IcDgcai,
    /// Set Cover → IC/2IC/2LIC constructive addition.
    IcCgcai,
    /// Set Cover → 2IC/2LIC exact addition.
    TwoIcEgcai,
    /// Set Cover → IC exact addition.
    IcEgcai,
    /// Set Cover → IC constructive deletion.
    IcCgcdi,
    /// Set Cover → IC general deletion.
    IcGcdi,
    /// Set Cover → IC/2IC/2LIC destructive deletion.
    IcDgcdi,
    /// Set Cover → 2IC/2LIC general deletion.
    TwoIcGcdi,
    /// Set Cover → IC constructive bribery.
    IcCgb,
    /// Set Cover → IC exact bribery.
    IcGb,
    /// Set Cover → 2LIC priced destructive bribery.
    TwoLicDgb,
    /// Set Cover → 2IC/2LIC priced exact bribery.
    TwoIcEgb,
    /// Set Cover → IC constructive microbribery.
    IcCgmb,
    /// Independent Set → 2IC/2LIC priced constructive microbribery.
    TwoIcCgmb,
    /// RX3C → IC/2IC/2LIC destructive microbribery.
    IcDgmb,
    /// RX3C → IC/2IC/2LIC exact microbribery.
    IcEgmb,
}

impl Theorem {
    pub const ALL: [Theorem; 22] = [
        Theorem::GmbProt,
        Theorem::RdgcdiVc,
        Theorem::RegcdiRx3c,
        Theorem::FstRegcdi,
        Theorem::CsrRgcdi,
        Theorem::CsrGcdiProt,
        Theorem::IcDgcai,
        Theorem::IcCgcai,
        Theorem::TwoIcEgcai,
        Theorem::IcEgcai,
        Theorem::IcCgcdi,
        Theorem::IcGcdi,
        Theorem::IcDgcdi,
        Theorem::TwoIcGcdi,
        Theorem::IcCgb,
        Theorem::IcGb,
        Theorem::TwoLicDgb,
        Theorem::TwoIcEgb,
        Theorem::IcCgmb,
        Theorem::TwoIcCgmb,
        Theorem::IcDgmb,
        Theorem::IcEgmb,
    ];

    /// Catalog key, e.g. `T-IC-DGCAI`.
    pub fn id(&self) -> &'static str {
        match self {
            Theorem::GmbProt => "T-GMB-PROT",
            Theorem::RdgcdiVc => "T-RDGCDI-VC",
            Theorem::RegcdiRx3c => "T-REGCDI-RX3C",
            Theorem::FstRegcdi => "T-FST-REGCDI",
            Theorem::CsrRgcdi => "T-CSR-RGCDI",
            Theorem::CsrGcdiProt => "T-CSR-GCDI-PROT",
            Theorem::IcDgcai => "T-IC-DGCAI",
            Theorem::IcCgcai => "T-IC-CGCAI",
            Theorem::TwoIcEgcai => "T-2IC-EGCAI",
            Theorem::IcEgcai => "T-IC-EGCAI",
            Theorem::IcCgcdi => "T-IC-CGCDI",
            Theorem::IcGcdi => "T-IC-GCDI",
            Theorem::IcDgcdi => "T-IC-DGCDI",
            Theorem::TwoIcGcdi => "T-2IC-GCDI",
            Theorem::IcCgb => "T-IC-CGB",
            Theorem::IcGb => "T-IC-GB",
            Theorem::TwoLicDgb => "T-2LIC-DGB",
            Theorem::TwoIcEgb => "T-2IC-EGB",
            Theorem::IcCgmb => "T-IC-CGMB",
            Theorem::TwoIcCgmb => "T-2IC-CGMB",
            Theorem::IcDgmb => "T-IC-DGMB",
            Theorem::IcEgmb => "T-IC-EGMB",
        }
    }

    /// Parses a catalog key (case-insensitive).
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim().to_ascii_uppercase();
        Theorem::ALL
            .into_iter()
            .find(|th| th.id() == t)
            .ok_or_else(|| Error::Usage(format!("unknown theorem `{text}`")))
    }

    /// Name of the source problem variant the reduction starts from.
    pub fn source_kind(&self) -> &'static str {
        use Theorem::*;
        match self {
            GmbProt | CsrRgcdi | CsrGcdiProt => "cnf-sat",
            RdgcdiVc | FstRegcdi => "vertex-cover",
            RegcdiRx3c | IcDgmb | IcEgmb => "rx3c",
            TwoIcCgmb => "independent-set",
            _ => "set-cover",
        }
    }

    /// The rule used when the caller does not pick one.
    pub fn default_rule(&self) -> RuleId {
        use Theorem::*;
        match self {
            GmbProt | CsrRgcdi | CsrGcdiProt => RuleId::Csr,
            RdgcdiVc | FstRegcdi => RuleId::consent(2, 2),
            RegcdiRx3c => RuleId::consent(1, 3),
            TwoIcEgcai | TwoIcGcdi | TwoIcEgb | TwoIcCgmb => RuleId::TwoIc,
            TwoLicDgb => RuleId::TwoLic,
            _ => RuleId::Ic,
        }
    }

    /// Whether the construction is proved for `rule`.
    pub fn accepts(&self, rule: RuleId) -> bool {
        use RuleId::*;
        use Theorem::*;
        let iterative = matches!(rule, Ic | TwoIc | TwoLic);
        let two_stage = matches!(rule, TwoIc | TwoLic);
        match self {
            GmbProt => matches!(rule, Csr | Lsr),
            RdgcdiVc => matches!(rule, Consent { s, .. } if s >= 2),
            RegcdiRx3c => matches!(rule, Consent { s: 1, t } if t >= 3),
            FstRegcdi => matches!(rule, Consent { s, t } if s >= 2 && t >= 2),
            CsrRgcdi | CsrGcdiProt => rule == Csr,
            IcDgcai | IcCgcai | IcDgcdi | IcDgmb | IcEgmb => iterative,
            TwoIcEgcai | TwoIcGcdi | TwoIcEgb | TwoIcCgmb => two_stage,
            TwoLicDgb => rule == TwoLic,
            IcEgcai | IcCgcdi | IcGcdi | IcCgb | IcGb | IcCgmb => rule == Ic,
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// A generated instance with its witness maps.
#[derive(Clone, Debug)]
pub struct ReductionOutput {
    pub theorem: Theorem,
    pub instance: AttackInstance,
    /// The source problem as given.
    pub source: SourceProblem,
    /// Preprocessing steps applied before the construction.
    pub metadata: Vec<String>,
    layout: build::Layout,
}

impl ReductionOutput {
    pub fn theorem_id(&self) -> &'static str {
        self.theorem.id()
    }

    /// Maps a source certificate to an attack on the generated instance.
    pub fn forward(&self, cert: &SourceCertificate) -> Result<Solution> {
        if !check_certificate(&self.source, cert) {
            return Err(Error::Precondition("certificate does not solve the source problem".into()));
        }
        build::forward(self, cert)
    }

    /// Maps a successful attack back to a source certificate, first
    /// normalising it to the canonical form the construction relies on.
    pub fn backward(&self, sol: &Solution) -> Result<SourceCertificate> {
        let cert = build::backward(self, sol)?;
        if check_certificate(&self.source, &cert) {
            Ok(cert)
        } else {
            Err(Error::Precondition(format!(
                "{} backward map produced {cert:?}, which does not solve the source problem",
                self.theorem
            )))
        }
    }
}

/// Builds the reduction `theorem_id` on `source` with the theorem's default rule.
pub fn build_reduction(theorem_id: &str, source: &SourceProblem) -> Result<ReductionOutput> {
    let theorem = Theorem::parse(theorem_id)?;
    build_reduction_for(theorem, source, None)
}

/// Builds a reduction for an explicit rule (or the default when `None`).
pub fn build_reduction_for(
    theorem: Theorem,
    source: &SourceProblem,
    rule: Option<RuleId>,
) -> Result<ReductionOutput> {
    if source.name() != theorem.source_kind() {
        return Err(Error::InvalidSource(format!(
            "{theorem} reduces from {}, got {}",
            theorem.source_kind(),
            source.name()
        )));
    }
    let violations = validate_source(source);
    if !violations.is_empty() {
        return Err(Error::InvalidSource(violations.join("; ")));
    }
    let rule = rule.unwrap_or_else(|| theorem.default_rule());
    rule.validate()?;
    if !theorem.accepts(rule) {
        return Err(Error::Precondition(format!("{theorem} is not stated for rule {rule}")));
    }
    let (instance, layout, metadata) = build::construct(theorem, source, rule)?;
    instance.validate()?;
    Ok(ReductionOutput { theorem, instance, source: source.clone(), metadata, layout })
}
