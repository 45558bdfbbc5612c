//! Polynomial-time solvers, one per algorithm, plus a dispatcher that picks
//! the solver for an instance's (rule, kind, pricing, objective) cell.

mod bribery;
mod consent;
mod csr;
mod iterative;
mod lsr;
mod micro;

pub use bribery::{
    solve_2ic_cgb_priced, solve_2ic_gb_unpriced, solve_2lic_cgb_priced, solve_2lic_gb_unpriced,
    solve_ic_2ic_dgb_priced,
};
pub use consent::{solve_consent_easy_cases, solve_consent_s1_rdgcdi};
pub use csr::{
    csr_rdgcdi_to_dgcdi, csr_rdgcdi_to_dgcdi_as_published, solve_csr_dgcdi_corrected,
    solve_csr_dgcdi_naive_ery20, solve_csr_rdgcdi, solve_csr_regcdi,
};
pub use iterative::{solve_2ic_cgcdi, solve_2lic_cgcdi};
pub use lsr::solve_lsr_rdgcdi;
pub use micro::{solve_2ic_cgmb, solve_2lic_cgmb};

use crate::error::{Error, Result};
use crate::model::{AttackInstance, Kind, RuleId, Verdict};

/// Verdict of a polynomial solver together with work counters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverReport {
    pub verdict: Verdict,
    /// Outer-loop passes (recursion levels, queue rounds, …).
    pub iterations: usize,
    /// Anchor candidates `a*` examined.
    pub guesses_tried: usize,
}

impl SolverReport {
    pub fn new(verdict: Verdict) -> Self {
        SolverReport { verdict, iterations: 1, guesses_tried: 0 }
    }

    pub fn with_counts(verdict: Verdict, iterations: usize, guesses_tried: usize) -> Self {
        SolverReport { verdict, iterations, guesses_tried }
    }
}

/// Signature shared by every polynomial solver.
pub type Solver = fn(&AttackInstance) -> Result<SolverReport>;

/// Picks the polynomial solver responsible for `inst`, if one exists.
pub fn select_solver(inst: &AttackInstance) -> Result<(&'static str, Solver)> {
    use Kind::*;
    use RuleId::*;
    let constructive = inst.is_constructive();
    let destructive = inst.is_destructive();
    let exact = inst.is_exact();
    let pick: Option<(&'static str, Solver)> = match (inst.rule, inst.kind) {
        (Consent { s: 1, .. }, RelaxedDeleteIndividuals) if destructive => {
            Some(("solve_consent_s1_rdgcdi", solve_consent_s1_rdgcdi))
        }
        (Consent { .. } | Lsr, DeleteIndividuals | RelaxedDeleteIndividuals)
            if consent::covers(inst) =>
        {
            Some(("solve_consent_easy_cases", solve_consent_easy_cases))
        }
        (Lsr, RelaxedDeleteIndividuals) if destructive => Some(("solve_lsr_rdgcdi", solve_lsr_rdgcdi)),
        (Csr, DeleteIndividuals) if destructive => {
            Some(("solve_csr_dgcdi_corrected", solve_csr_dgcdi_corrected))
        }
        (Csr, DeleteIndividuals) if consent::covers(inst) => {
            Some(("solve_consent_easy_cases", solve_consent_easy_cases))
        }
        (Csr, RelaxedDeleteIndividuals) if destructive => Some(("solve_csr_rdgcdi", solve_csr_rdgcdi)),
        (Csr, RelaxedDeleteIndividuals) if exact => Some(("solve_csr_regcdi", solve_csr_regcdi)),
        (TwoIc, DeleteIndividuals | RelaxedDeleteIndividuals) if constructive => {
            Some(("solve_2ic_cgcdi", solve_2ic_cgcdi))
        }
        (TwoLic, DeleteIndividuals | RelaxedDeleteIndividuals) if constructive => {
            Some(("solve_2lic_cgcdi", solve_2lic_cgcdi))
        }
        (Ic | TwoIc, Bribery) if destructive => Some(("solve_ic_2ic_dgb_priced", solve_ic_2ic_dgb_priced)),
        (TwoIc, Bribery) if inst.priced && constructive => {
            Some(("solve_2ic_cgb_priced", solve_2ic_cgb_priced))
        }
        (TwoLic, Bribery) if inst.priced && constructive => {
            Some(("solve_2lic_cgb_priced", solve_2lic_cgb_priced))
        }
        (TwoIc, Bribery) if !inst.priced => Some(("solve_2ic_gb_unpriced", solve_2ic_gb_unpriced)),
        (TwoLic, Bribery) if !inst.priced => Some(("solve_2lic_gb_unpriced", solve_2lic_gb_unpriced)),
        (TwoIc, Microbribery) if !inst.priced && constructive => Some(("solve_2ic_cgmb", solve_2ic_cgmb)),
        (TwoLic, Microbribery) if !inst.priced && constructive => {
            Some(("solve_2lic_cgmb", solve_2lic_cgmb))
        }
        _ => None,
    };
    pick.ok_or_else(|| {
        Error::NoPolynomialAlgorithm(format!(
            "rule {}, kind {}, {}, {} objective",
            inst.rule,
            inst.kind,
            if inst.priced { "priced" } else { "unpriced" },
            inst.objective()
        ))
    })
}

/// Every polynomial solver by name, including the naive CSR loop that
/// [`select_solver`] never dispatches to.
pub const SOLVERS: [(&str, Solver); 16] = [
    ("solve_consent_s1_rdgcdi", solve_consent_s1_rdgcdi),
    ("solve_consent_easy_cases", solve_consent_easy_cases),
    ("solve_lsr_rdgcdi", solve_lsr_rdgcdi),
    ("solve_csr_dgcdi_corrected", solve_csr_dgcdi_corrected),
    ("solve_csr_dgcdi_naive_ery20", solve_csr_dgcdi_naive_ery20),
    ("solve_csr_rdgcdi", solve_csr_rdgcdi),
    ("solve_csr_regcdi", solve_csr_regcdi),
    ("solve_2ic_cgcdi", solve_2ic_cgcdi),
    ("solve_2lic_cgcdi", solve_2lic_cgcdi),
    ("solve_ic_2ic_dgb_priced", solve_ic_2ic_dgb_priced),
    ("solve_2ic_cgb_priced", solve_2ic_cgb_priced),
    ("solve_2lic_cgb_priced", solve_2lic_cgb_priced),
    ("solve_2ic_gb_unpriced", solve_2ic_gb_unpriced),
    ("solve_2lic_gb_unpriced", solve_2lic_gb_unpriced),
    ("solve_2ic_cgmb", solve_2ic_cgmb),
    ("solve_2lic_cgmb", solve_2lic_cgmb),
];

/// Looks a solver up by name.
pub fn solver_by_name(name: &str) -> Option<Solver> {
    SOLVERS.iter().find(|(n, _)| *n == name).map(|&(_, f)| f)
}

/// Runs the polynomial solver responsible for `inst`.
pub fn solve_poly(inst: &AttackInstance) -> Result<SolverReport> {
    inst.validate()?;
    let (_, solver) = select_solver(inst)?;
    solver(inst)
}

pub(crate) fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(what.to_string()))
    }
}
