//! Relaxed destructive deletion under the liberal-start rule.

use super::{require, SolverReport};
use crate::error::Result;
use crate::graph::{lsr_aux_graph, min_vertex_separator};
use crate::model::{AttackInstance, Kind, RuleId, Solution, Verdict};

const NAME: &str = "solve_lsr_rdgcdi";

/// Under LSR an individual is qualified iff it is reachable from a
/// self-qualifier in the qualification graph of the remaining individuals.
/// Deleting `U` therefore disqualifies all of `A⁻` iff `U` separates the
/// auxiliary source (pointing at every self-qualifier) from the auxiliary
/// sink (pointed at by every member of `A⁻`), so a minimum vertex separator
/// is an optimal attack.
pub fn solve_lsr_rdgcdi(inst: &AttackInstance) -> Result<SolverReport> {
    require(inst.rule == RuleId::Lsr, "rule must be LSR")?;
    require(inst.kind == Kind::RelaxedDeleteIndividuals, "kind must be relaxed deletion")?;
    require(inst.aplus.is_empty(), "A+ must be empty")?;
    let aux = lsr_aux_graph(&inst.society, &inst.aminus);
    let cut = min_vertex_separator(&aux.graph, aux.source, aux.sink, &[])?;
    let u = aux.graph.individuals(&cut);
    let cost = u.len() as u64;
    let verdict = if cost <= inst.budget {
        Verdict::yes(Solution::DeleteSet(u), cost, NAME)
    } else {
        Verdict::no(NAME)
    };
    Ok(SolverReport::new(verdict))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{verify_solution, Society};

    #[test]
    fn cuts_the_single_path() {
        // a0 self-qualifies and qualifies a1, a1 qualifies a2 (in A⁻).
        let soc = Society::from_rows(&[vec![1, 1, -1], vec![-1, -1, 1], vec![-1, -1, -1]]).unwrap();
        let inst = AttackInstance::new(soc, RuleId::Lsr, Kind::RelaxedDeleteIndividuals, vec![], vec![2], 1);
        let r = solve_lsr_rdgcdi(&inst).unwrap();
        let w = r.verdict.witness.unwrap();
        assert_eq!(w.size(), 1);
        assert!(verify_solution(&inst, &w).unwrap().is_valid());
    }
}
