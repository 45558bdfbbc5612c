//! Constructive deletion under the two-stage iterative rules.

use super::{require, SolverReport};
use crate::error::Result;
use crate::model::{members, AttackInstance, Kind, RuleId, Solution, Verdict};
use crate::rules::unanimous_set;

const TWO_IC: &str = "solve_2ic_cgcdi";
const TWO_LIC: &str = "solve_2lic_cgcdi";

/// Constructive deletion (classic or relaxed) under 2IC.
///
/// Every member of `A⁺` must qualify itself. Some anchor `a*` has to be
/// qualified by all remaining individuals, so its disqualifiers are deleted.
/// Deleting only enlarges the unanimous set, and a unanimous individual that
/// disqualifies a member of `A⁺` blocks it from both stages, so such
/// individuals are deleted until none is left. Each anchor yields its
/// cheapest attack; the best anchor decides the instance.
pub fn solve_2ic_cgcdi(inst: &AttackInstance) -> Result<SolverReport> {
    check(inst, RuleId::TwoIc)?;
    if self_disqualifying_target(inst) {
        return Ok(SolverReport::new(Verdict::no(TWO_IC)));
    }
    let (best, iterations, guesses) = best_anchor(inst);
    Ok(SolverReport::with_counts(decide(inst, best, TWO_IC), iterations, guesses))
}

/// Constructive deletion (classic or relaxed) under 2LIC: the anchored
/// attacks of 2IC, or emptying the unanimous set entirely (every unanimous
/// individual must go, repeatedly) so that the self-qualifiers win.
pub fn solve_2lic_cgcdi(inst: &AttackInstance) -> Result<SolverReport> {
    check(inst, RuleId::TwoLic)?;
    if self_disqualifying_target(inst) {
        return Ok(SolverReport::new(Verdict::no(TWO_LIC)));
    }
    let (mut best, mut iterations, guesses) = best_anchor(inst);
    let soc = &inst.society;
    let n = soc.n();
    let plus = inst.in_aplus();
    let mut alive = vec![true; n];
    let mut ok = true;
    loop {
        iterations += 1;
        let unanimous = unanimous_set(&members(&alive), soc);
        if unanimous.is_empty() {
            break;
        }
        if unanimous.iter().any(|&a| plus[a]) {
            ok = false;
            break;
        }
        for a in unanimous {
            alive[a] = false;
        }
    }
    if ok {
        let u: Vec<usize> = (0..n).filter(|&a| !alive[a]).collect();
        if best.as_ref().is_none_or(|b| u.len() < b.len()) {
            best = Some(u);
        }
    }
    Ok(SolverReport::with_counts(decide(inst, best, TWO_LIC), iterations, guesses))
}

fn check(inst: &AttackInstance, rule: RuleId) -> Result<()> {
    require(inst.rule == rule, "unexpected rule")?;
    require(
        matches!(inst.kind, Kind::DeleteIndividuals | Kind::RelaxedDeleteIndividuals),
        "kind must be a deletion",
    )?;
    require(inst.aminus.is_empty(), "A- must be empty")
}

fn self_disqualifying_target(inst: &AttackInstance) -> bool {
    inst.aplus.iter().any(|&a| !inst.society.qualifies(a, a))
}

fn decide(inst: &AttackInstance, best: Option<Vec<usize>>, name: &str) -> Verdict {
    match best {
        Some(u) if u.len() as u64 <= inst.budget => {
            let cost = u.len() as u64;
            Verdict::yes(Solution::DeleteSet(u), cost, name)
        }
        _ => Verdict::no(name),
    }
}

/// Cheapest anchored attack over all anchors `a*`, with loop counters.
fn best_anchor(inst: &AttackInstance) -> (Option<Vec<usize>>, usize, usize) {
    let soc = &inst.society;
    let n = soc.n();
    let plus = inst.in_aplus();
    let mut best: Option<Vec<usize>> = None;
    let mut iterations = 0;
    let mut guesses = 0;
    'anchor: for anchor in 0..n {
        guesses += 1;
        if !soc.qualifies(anchor, anchor) {
            continue;
        }
        let mut alive = vec![true; n];
        for b in (0..n).filter(|&b| !soc.qualifies(b, anchor)) {
            if plus[b] {
                continue 'anchor;
            }
            alive[b] = false;
        }
        loop {
            iterations += 1;
            let blockers: Vec<usize> = unanimous_set(&members(&alive), soc)
                .into_iter()
                .filter(|&k| inst.aplus.iter().any(|&a| !soc.qualifies(k, a)))
                .collect();
            if blockers.is_empty() {
                break;
            }
            for k in blockers {
                if plus[k] || k == anchor {
                    continue 'anchor;
                }
                alive[k] = false;
            }
        }
        let u: Vec<usize> = (0..n).filter(|&a| !alive[a]).collect();
        if best.as_ref().is_none_or(|b| u.len() < b.len()) {
            best = Some(u);
        }
    }
    (best, iterations, guesses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{verify_solution, Society};

    #[test]
    fn deletes_the_blocker() {
        // a0 is unanimous but disqualifies a1 (in A⁺); a2 is a clean anchor.
        let soc = Society::from_rows(&[vec![1, -1, 1], vec![1, 1, 1], vec![1, 1, 1]]).unwrap();
        let inst = AttackInstance::new(soc, RuleId::TwoIc, Kind::DeleteIndividuals, vec![1], vec![], 1);
        let r = solve_2ic_cgcdi(&inst).unwrap();
        let w = r.verdict.witness.unwrap();
        assert_eq!(w, Solution::DeleteSet(vec![0]));
        assert!(verify_solution(&inst, &w).unwrap().is_valid());
    }
}
