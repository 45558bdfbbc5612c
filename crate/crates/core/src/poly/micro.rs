//! Unpriced constructive microbribery under the two-stage iterative rules.

use super::{require, SolverReport};
use crate::error::Result;
use crate::model::{membership, targets_met, AttackInstance, Kind, RuleId, Society, Solution, Verdict};
use crate::rules::unanimous_set;

const TWO_IC: &str = "solve_2ic_cgmb";
const TWO_LIC: &str = "solve_2lic_cgmb";

/// Under 2IC some anchor `a*` must end up unanimous: every disqualification
/// of `a*` is flipped, every self-disqualifying member of `A⁺` flips its own
/// entry, and `a*` is made to qualify all of `A⁺`. Each remaining unanimous
/// individual that disqualifies a member of `A⁺` then costs exactly one more
/// flip, which removes it from the unanimous set. The cheapest anchor wins.
pub fn solve_2ic_cgmb(inst: &AttackInstance) -> Result<SolverReport> {
    check(inst, RuleId::TwoIc)?;
    let soc = &inst.society;
    let n = soc.n();
    let mut best: Option<Vec<(usize, usize)>> = None;
    for anchor in 0..n {
        let mut flips: Vec<(usize, usize)> = Vec::new();
        for i in (0..n).filter(|&i| !soc.qualifies(i, anchor)) {
            flips.push((i, anchor));
        }
        for &x in &inst.aplus {
            if !soc.qualifies(x, x) && x != anchor {
                flips.push((x, x));
            }
        }
        for &x in &inst.aplus {
            if !soc.qualifies(anchor, x) && x != anchor {
                flips.push((anchor, x));
            }
        }
        complete(inst, &mut flips);
        if best.as_ref().is_none_or(|b| flips.len() < b.len()) {
            best = Some(flips);
        }
    }
    Ok(SolverReport::with_counts(decide(inst, best, TWO_IC), 1, n))
}

/// Under 2LIC no anchor is needed: flipping the self-disqualifying members of
/// `A⁺` and excluding every unanimous individual that disqualifies a member
/// of `A⁺` is optimal whether or not the unanimous set ends up empty.
pub fn solve_2lic_cgmb(inst: &AttackInstance) -> Result<SolverReport> {
    check(inst, RuleId::TwoLic)?;
    let soc = &inst.society;
    let mut flips: Vec<(usize, usize)> =
        inst.aplus.iter().filter(|&&x| !soc.qualifies(x, x)).map(|&x| (x, x)).collect();
    complete(inst, &mut flips);
    Ok(SolverReport::new(decide(inst, Some(flips), TWO_LIC)))
}

fn check(inst: &AttackInstance, rule: RuleId) -> Result<()> {
    require(inst.rule == rule, "unexpected rule")?;
    require(inst.kind == Kind::Microbribery, "kind must be microbribery")?;
    require(!inst.priced, "instance must be unpriced")?;
    require(inst.aminus.is_empty(), "A- must be empty")
}

/// Adds one exclusion flip per unanimous individual (after `flips`) that
/// disqualifies some member of `A⁺`. A blocker outside `A⁺` loses the
/// lowest-indexed individual's approval; a blocker inside `A⁺` loses the
/// approval of the lowest-indexed non-unanimous individual, so that it still
/// enters at the second stage.
fn complete(inst: &AttackInstance, flips: &mut Vec<(usize, usize)>) {
    let mut soc: Society = inst.society.clone();
    for &(i, j) in flips.iter() {
        soc.flip(i, j);
    }
    let n = soc.n();
    let k = unanimous_set(&soc.everyone(), &soc);
    let in_k = membership(n, &k);
    let plus = inst.in_aplus();
    let outsider = (0..n).find(|&i| !in_k[i]);
    for &b in &k {
        if inst.aplus.iter().all(|&a| soc.qualifies(b, a)) {
            continue;
        }
        // A bad member of A⁺ implies some member of A⁺ is not unanimous.
        let i = if plus[b] { outsider.expect("a non-unanimous individual exists") } else { 0 };
        flips.push((i, b));
    }
    flips.sort_unstable();
}

fn decide(inst: &AttackInstance, best: Option<Vec<(usize, usize)>>, name: &str) -> Verdict {
    match best {
        Some(flips) if flips.len() as u64 <= inst.budget => {
            debug_assert!({
                let mut soc = inst.society.clone();
                for &(i, j) in &flips {
                    soc.flip(i, j);
                }
                targets_met(inst, &soc.everyone(), &soc).is_ok()
            });
            let cost = flips.len() as u64;
            Verdict::yes(Solution::Microbribe(flips), cost, name)
        }
        _ => Verdict::no(name),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::verify_solution;

    #[test]
    fn anchored_flips_meet_the_target() {
        let soc = Society::from_rows(&[vec![-1, -1, 1], vec![1, -1, -1], vec![-1, 1, -1]]).unwrap();
        let inst = AttackInstance::new(soc, RuleId::TwoIc, Kind::Microbribery, vec![1], vec![], 9);
        let r = solve_2ic_cgmb(&inst).unwrap();
        assert!(verify_solution(&inst, r.verdict.witness.as_ref().unwrap()).unwrap().is_valid());
    }
}
