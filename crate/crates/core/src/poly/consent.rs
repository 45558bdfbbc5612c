//! Deletion attacks on consent rules (and the immune/easy LSR and CSR cells).

use std::collections::VecDeque;

use super::{require, SolverReport};
use crate::error::{Error, Result};
use crate::model::{classify_instance, members, AttackInstance, Kind, RuleId, Solution, Verdict};
use crate::rules;

const S1: &str = "solve_consent_s1_rdgcdi";
const EASY: &str = "solve_consent_easy_cases";

/// Relaxed destructive deletion for consent rules with `s = 1`.
///
/// Self-qualifying members of `A⁻` are always socially qualified and must be
/// deleted. A self-disqualifying member of `A⁻` stays qualified while fewer
/// than `t` remaining individuals (itself included) disqualify it, so it must
/// be deleted too; each such deletion lowers the counts of those it
/// disqualified, which is propagated with a queue. Every deletion is forced,
/// so the instance is a YES-instance iff the total fits the budget.
pub fn solve_consent_s1_rdgcdi(inst: &AttackInstance) -> Result<SolverReport> {
    let t = match inst.rule {
        RuleId::Consent { s: 1, t } => t,
        _ => return Err(Error::Precondition("rule must be a consent rule with s = 1".into())),
    };
    require(inst.kind == Kind::RelaxedDeleteIndividuals, "kind must be relaxed deletion")?;
    require(inst.aplus.is_empty(), "A+ must be empty")?;
    let soc = &inst.society;
    let n = soc.n();
    let minus = inst.in_aminus();
    let mut deleted = vec![false; n];
    for &a in &inst.aminus {
        if soc.qualifies(a, a) {
            deleted[a] = true;
        }
    }
    let mut d: Vec<usize> = (0..n)
        .map(|a| (0..n).filter(|&b| !deleted[b] && !soc.qualifies(b, a)).count())
        .collect();
    let mut queue: VecDeque<usize> = inst.aminus.iter().copied().filter(|&a| !deleted[a]).collect();
    let mut rounds = 0;
    while let Some(a) = queue.pop_front() {
        rounds += 1;
        if deleted[a] || d[a] >= t {
            continue;
        }
        deleted[a] = true;
        for b in 0..n {
            if !soc.qualifies(a, b) {
                d[b] -= 1;
                if minus[b] && !deleted[b] && d[b] < t {
                    queue.push_back(b);
                }
            }
        }
    }
    let u = members(&deleted);
    let cost = u.len() as u64;
    let verdict = if cost <= inst.budget {
        Verdict::yes(Solution::DeleteSet(u), cost, S1)
    } else {
        Verdict::no(S1)
    };
    Ok(SolverReport::with_counts(verdict, rounds.max(1), 0))
}

/// The deletion cells decided by short observations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cell {
    /// `f^(1,1)`: the qualified set is exactly the self-qualifiers.
    Consent11,
    /// `f^(1,2)` with relaxed deletion (or classic constructive).
    Consent12,
    /// Classic deletion, `s = 1`, some `A⁻` member initially qualified.
    ImmuneS1Destructive,
    /// `t = 1` (any `s`) or LSR, some `A⁺` member initially unqualified.
    ImmuneShrinking,
    /// `t = 1` or LSR, constructive, targets already met.
    AlreadyMet,
    /// LSR, relaxed exact deletion.
    LsrExact,
    /// CSR classic general deletion under the standing assumption.
    CsrGeneralImmune,
}

fn cell(inst: &AttackInstance) -> Option<Cell> {
    if !matches!(inst.kind, Kind::DeleteIndividuals | Kind::RelaxedDeleteIndividuals) {
        return None;
    }
    let relaxed = inst.kind == Kind::RelaxedDeleteIndividuals;
    let class = classify_instance(inst);
    match inst.rule {
        RuleId::Consent { s: 1, t: 1 } => Some(Cell::Consent11),
        RuleId::Consent { s: 1, t: 2 } if relaxed || inst.is_constructive() => Some(Cell::Consent12),
        RuleId::Consent { s: 1, .. } if !relaxed && !class.aminus_initially_met => {
            Some(Cell::ImmuneS1Destructive)
        }
        RuleId::Consent { t: 1, .. } | RuleId::Lsr if !class.aplus_initially_met => {
            Some(Cell::ImmuneShrinking)
        }
        RuleId::Consent { t: 1, .. } | RuleId::Lsr if inst.is_constructive() => Some(Cell::AlreadyMet),
        RuleId::Lsr if relaxed && inst.is_exact() => Some(Cell::LsrExact),
        RuleId::Csr
            if !relaxed
                && !inst.aplus.is_empty()
                && !inst.aminus.is_empty()
                && !class.aplus_initially_met
                && !class.aminus_initially_met =>
        {
            Some(Cell::CsrGeneralImmune)
        }
        _ => None,
    }
}

/// Whether [`solve_consent_easy_cases`] handles `inst`.
pub(crate) fn covers(inst: &AttackInstance) -> bool {
    cell(inst).is_some()
}

/// Deletion cells settled by the short observations: `f^(1,1)` (any
/// objective), `f^(1,2)` with relaxed deletion, LSR relaxed exact deletion,
/// and the immune cells (`f^(s,1)` and LSR when some `A⁺` member is
/// initially unqualified, `s = 1` classic destructive deletion, and CSR
/// classic general deletion under the standing assumption).
pub fn solve_consent_easy_cases(inst: &AttackInstance) -> Result<SolverReport> {
    let c = cell(inst).ok_or_else(|| {
        Error::Precondition(format!(
            "no easy-case observation covers rule {} with {} ({} objective)",
            inst.rule,
            inst.kind,
            inst.objective()
        ))
    })?;
    let soc = &inst.society;
    let n = soc.n();
    let immune = || Ok(SolverReport::new(Verdict::no(EASY).with_reason("immune")));
    let decide = |u: Vec<usize>| {
        let cost = u.len() as u64;
        let v = if cost <= inst.budget {
            Verdict::yes(Solution::DeleteSet(u), cost, EASY)
        } else {
            Verdict::no(EASY)
        };
        Ok(SolverReport::new(v))
    };
    match c {
        Cell::ImmuneShrinking | Cell::ImmuneS1Destructive | Cell::CsrGeneralImmune => immune(),
        Cell::AlreadyMet => decide(Vec::new()),
        Cell::Consent11 => {
            // Deletions never change who qualifies themselves.
            if inst.aplus.iter().any(|&a| !soc.qualifies(a, a)) {
                return immune();
            }
            let u: Vec<usize> = inst.aminus.iter().copied().filter(|&a| soc.qualifies(a, a)).collect();
            if !u.is_empty() && inst.kind == Kind::DeleteIndividuals {
                return immune();
            }
            decide(u)
        }
        Cell::Consent12 => {
            let plus = inst.in_aplus();
            let minus = inst.in_aminus();
            let mut deleted = vec![false; n];
            // A self-disqualifying member of A⁺ survives only if nobody else
            // disqualifies it.
            for &a in &inst.aplus {
                if soc.qualifies(a, a) {
                    continue;
                }
                for b in (0..n).filter(|&b| b != a && !soc.qualifies(b, a)) {
                    if plus[b] {
                        return Ok(SolverReport::new(Verdict::no(EASY)));
                    }
                    deleted[b] = true;
                }
            }
            for &a in &inst.aminus {
                if soc.qualifies(a, a) {
                    deleted[a] = true;
                }
            }
            // A self-disqualifying member of A⁻ needs one more remaining
            // disqualifier; otherwise it has to go as well.
            let mut changed = true;
            let mut rounds = 0;
            while changed {
                changed = false;
                rounds += 1;
                for &a in &inst.aminus {
                    if deleted[a] {
                        continue;
                    }
                    let others = (0..n).filter(|&b| b != a && !deleted[b] && !soc.qualifies(b, a)).count();
                    if others == 0 {
                        deleted[a] = true;
                        changed = true;
                    }
                }
            }
            let u = members(&deleted);
            if inst.kind == Kind::DeleteIndividuals && u.iter().any(|&b| minus[b]) {
                return immune();
            }
            let mut report = decide(u)?;
            report.iterations = rounds;
            Ok(report)
        }
        Cell::LsrExact => {
            // LSR only shrinks under deletion, so A⁺ must already reach itself.
            if !inst.aplus.is_empty() && rules::evaluate(RuleId::Lsr, &inst.aplus, soc) != inst.aplus {
                return if classify_instance(inst).aplus_initially_met {
                    Ok(SolverReport::new(Verdict::no(EASY)))
                } else {
                    immune()
                };
            }
            let plus = inst.in_aplus();
            let u: Vec<usize> = inst
                .aminus
                .iter()
                .copied()
                .filter(|&a| soc.qualifies(a, a) || (0..n).any(|b| plus[b] && soc.qualifies(b, a)))
                .collect();
            decide(u)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{verify_solution, Society};

    #[test]
    fn lone_self_qualifier_must_be_deleted() {
        let soc = Society::uniform(1, true);
        let inst = AttackInstance::new(soc, RuleId::consent(1, 1), Kind::RelaxedDeleteIndividuals, vec![], vec![0], 1);
        let r = solve_consent_s1_rdgcdi(&inst).unwrap();
        assert_eq!(r.verdict.witness, Some(Solution::DeleteSet(vec![0])));
    }

    #[test]
    fn self_disqualifier_short_of_disqualifiers_is_deleted() {
        // a0 disqualifies itself, a1 qualifies a0; t = 2.
        let soc = Society::from_rows(&[vec![-1, -1], vec![1, -1]]).unwrap();
        let inst = AttackInstance::new(soc, RuleId::consent(1, 2), Kind::RelaxedDeleteIndividuals, vec![], vec![0], 1);
        let r = solve_consent_s1_rdgcdi(&inst).unwrap();
        assert!(r.verdict.is_yes());
        assert!(verify_solution(&inst, r.verdict.witness.as_ref().unwrap()).unwrap().is_valid());
    }

    #[test]
    fn consent11_exact_with_aplus_is_immune() {
        let soc = Society::from_rows(&[vec![-1, 1], vec![1, 1]]).unwrap();
        let inst = AttackInstance::new(soc, RuleId::consent(1, 1), Kind::RelaxedDeleteIndividuals, vec![0], vec![1], 2);
        let r = solve_consent_easy_cases(&inst).unwrap();
        assert!(!r.verdict.is_yes());
        assert_eq!(r.verdict.reason.as_deref(), Some("immune"));
    }

    #[test]
    fn consent11_all_self_disqualifying_needs_nothing() {
        let soc = Society::uniform(3, false);
        let inst = AttackInstance::new(soc, RuleId::consent(1, 1), Kind::RelaxedDeleteIndividuals, vec![], vec![0, 1, 2], 1);
        let r = solve_consent_easy_cases(&inst).unwrap();
        assert_eq!(r.verdict.witness, Some(Solution::DeleteSet(vec![])));
    }
}
