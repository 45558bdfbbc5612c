//! Deletion attacks under the consensus-start rule.

use super::{require, SolverReport};
use crate::error::{Error, Result};
use crate::graph::{csr_aux_graph, min_vertex_separator};
use crate::model::{members, membership, AttackInstance, Kind, RuleId, Society, Solution, Verdict};
use crate::rules::{evaluate, unanimous_set};

const CORRECTED: &str = "solve_csr_dgcdi_corrected";
const NAIVE: &str = "solve_csr_dgcdi_naive_ery20";
const RELAXED: &str = "solve_csr_rdgcdi";
const EXACT: &str = "solve_csr_regcdi";

/// Outcome of the separator loop: the deletion set (if one within budget
/// exists) plus work counters.
struct LoopOutcome {
    deletion: Option<Vec<usize>>,
    iterations: usize,
    guesses: usize,
}

/// Classic destructive deletion under CSR, deciding every instance.
///
/// Let `V^C` be the individuals qualified by everyone. If a minimum separator
/// `S` between `V^C` and `A⁻` leaves part of `V^C` alive, the survivors keep
/// every newly unanimous individual reachable, so `S` is optimal. Otherwise
/// `S = V^C`; each `v ∈ V^C` is then tried as the survivor (its out-neighbours
/// become sources), and if no such attempt fits the budget every solution
/// must delete all of `V^C`, which is committed before recursing on the rest.
pub fn solve_csr_dgcdi_corrected(inst: &AttackInstance) -> Result<SolverReport> {
    check_dgcdi(inst)?;
    let out = separator_loop(&inst.society, &inst.aminus, inst.budget, true)?;
    Ok(finish(out, CORRECTED))
}

/// The naive loop without the survivor guesses: while the minimum
/// separator swallows all of `V^C`, it is deleted and the loop repeats.
/// Kept for comparison; it can answer NO on YES-instances.
pub fn solve_csr_dgcdi_naive_ery20(inst: &AttackInstance) -> Result<SolverReport> {
    check_dgcdi(inst)?;
    let out = separator_loop(&inst.society, &inst.aminus, inst.budget, false)?;
    Ok(finish(out, NAIVE))
}

/// Relaxed destructive deletion under CSR, solved through
/// [`csr_rdgcdi_to_dgcdi`] and [`solve_csr_dgcdi_corrected`].
pub fn solve_csr_rdgcdi(inst: &AttackInstance) -> Result<SolverReport> {
    let reduced = csr_rdgcdi_to_dgcdi(inst)?;
    let out = separator_loop(&reduced.society, &reduced.aminus, reduced.budget, true)?;
    // The new individual is protected, so the deletion set maps back unchanged.
    Ok(finish(out, RELAXED))
}

/// Turns relaxed destructive deletion into classic destructive deletion.
///
/// A new individual `w` qualifies everyone else and disqualifies itself;
/// members of `A⁻` qualify `w`, everybody else disqualifies `w`, and the new
/// destructive target is `{w}`. The start set is unchanged, and `w` joins the
/// closure exactly when some member of `A⁻` does, so both instances have the
/// same solutions.
pub fn csr_rdgcdi_to_dgcdi(inst: &AttackInstance) -> Result<AttackInstance> {
    build_relaxed_reduction(inst, true)
}

/// The construction as originally stated, where `w` disqualifies everyone.
/// Then nobody is qualified by all individuals, so the start set and the
/// qualified set are always empty and every output is a YES-instance.
pub fn csr_rdgcdi_to_dgcdi_as_published(inst: &AttackInstance) -> Result<AttackInstance> {
    build_relaxed_reduction(inst, false)
}

fn build_relaxed_reduction(inst: &AttackInstance, w_qualifies_all: bool) -> Result<AttackInstance> {
    require(inst.rule == RuleId::Csr, "rule must be CSR")?;
    require(inst.kind == Kind::RelaxedDeleteIndividuals, "kind must be relaxed deletion")?;
    require(inst.aplus.is_empty(), "A+ must be empty")?;
    let n = inst.n();
    let w = n;
    let minus = inst.in_aminus();
    let soc = &inst.society;
    let reduced = Society::from_fn(n + 1, |i, j| match (i == w, j == w) {
        (false, false) => soc.qualifies(i, j),
        (false, true) => minus[i],
        (true, false) => w_qualifies_all,
        (true, true) => false,
    });
    let labels = (0..n).map(|i| soc.label(i)).chain(std::iter::once("w".to_string())).collect();
    Ok(AttackInstance::new(
        reduced.with_labels(labels),
        RuleId::Csr,
        Kind::DeleteIndividuals,
        Vec::new(),
        vec![w],
        inst.budget,
    ))
}

fn check_dgcdi(inst: &AttackInstance) -> Result<()> {
    require(inst.rule == RuleId::Csr, "rule must be CSR")?;
    require(inst.kind == Kind::DeleteIndividuals, "kind must be classic deletion")?;
    require(inst.aplus.is_empty(), "A+ must be empty")
}

fn finish(out: LoopOutcome, name: &str) -> SolverReport {
    let verdict = match out.deletion {
        Some(u) => {
            let cost = u.len() as u64;
            Verdict::yes(Solution::DeleteSet(u), cost, name)
        }
        None => Verdict::no(name),
    };
    SolverReport::with_counts(verdict, out.iterations, out.guesses)
}

/// Minimum separator size, or `None` when the sink cannot be cut off.
fn separator(g: &crate::graph::DiGraph, source: usize, sink: usize, forbidden: &[usize]) -> Result<Option<Vec<usize>>> {
    match min_vertex_separator(g, source, sink, forbidden) {
        Ok(cut) => Ok(Some(cut)),
        Err(Error::Infeasible) => Ok(None),
        Err(e) => Err(e),
    }
}

fn separator_loop(soc: &Society, aminus: &[usize], budget: u64, guess: bool) -> Result<LoopOutcome> {
    let mut alive = soc.everyone();
    let mut committed: Vec<usize> = Vec::new();
    let mut remaining = budget;
    let mut out = LoopOutcome { deletion: None, iterations: 0, guesses: 0 };
    let minus_global = membership(soc.n(), aminus);
    loop {
        out.iterations += 1;
        let sub = soc.restrict(&alive);
        let sub_minus: Vec<usize> = (0..alive.len()).filter(|&i| minus_global[alive[i]]).collect();
        let everyone = sub.everyone();
        let qualified = evaluate(RuleId::Csr, &everyone, &sub);
        if qualified.iter().all(|&a| !minus_global[alive[a]]) {
            committed.sort_unstable();
            out.deletion = Some(committed);
            return Ok(out);
        }
        let vc = unanimous_set(&everyone, &sub);
        if vc.iter().any(|&a| minus_global[alive[a]]) {
            return Ok(out);
        }
        let aux = csr_aux_graph(&sub, &sub_minus, true)?;
        let Some(cut) = separator(&aux.graph, aux.source, aux.sink, &[])? else {
            return Ok(out);
        };
        let s = aux.graph.individuals(&cut);
        if s.len() as u64 > remaining {
            return Ok(out);
        }
        let in_s = membership(sub.n(), &s);
        let to_global = |set: &[usize]| set.iter().map(|&i| alive[i]).collect::<Vec<_>>();
        if vc.iter().any(|&v| !in_s[v]) {
            committed.extend(to_global(&s));
            committed.sort_unstable();
            out.deletion = Some(committed);
            return Ok(out);
        }
        if guess {
            let mut best: Option<Vec<usize>> = None;
            for &v in &vc {
                out.guesses += 1;
                let vv = aux.graph.vertex_of(v).expect("unanimous individuals are not merged");
                if aux.graph.has_arc(vv, aux.sink) {
                    continue;
                }
                let mut g = aux.graph.clone();
                for &x in aux.graph.out_neighbors(vv) {
                    g.add_arc(aux.source, x);
                }
                if let Some(cut) = separator(&g, aux.source, aux.sink, &[vv])? {
                    let cand = g.individuals(&cut);
                    if best.as_ref().is_none_or(|b| cand.len() < b.len()) {
                        best = Some(cand);
                    }
                }
            }
            if let Some(b) = best.filter(|b| b.len() as u64 <= remaining) {
                committed.extend(to_global(&b));
                committed.sort_unstable();
                out.deletion = Some(committed);
                return Ok(out);
            }
        }
        // Every solution deletes all of V^C (here S = V^C).
        remaining -= s.len() as u64;
        committed.extend(to_global(&s));
        let gone = membership(sub.n(), &s);
        alive = (0..alive.len()).filter(|&i| !gone[i]).map(|i| alive[i]).collect();
    }
}

/// Relaxed exact deletion under CSR.
///
/// With `A⁺ = ∅` every unanimous individual has to go, repeatedly. Otherwise
/// members of `A⁻` qualified by some member of `A⁺` must be deleted (the
/// latter end up qualified). A solution then needs some `a ∈ A⁺` qualified by
/// all remaining individuals, i.e. all of `a`'s remaining disqualifiers are
/// deleted; any other such `b` is qualified by `a`, so one anchor suffices
/// and the cheapest anchor is optimal.
pub fn solve_csr_regcdi(inst: &AttackInstance) -> Result<SolverReport> {
    require(inst.rule == RuleId::Csr, "rule must be CSR")?;
    require(inst.kind == Kind::RelaxedDeleteIndividuals, "kind must be relaxed deletion")?;
    require(inst.is_exact(), "A+ and A- must cover all individuals")?;
    let soc = &inst.society;
    let n = soc.n();
    let decide = |u: Vec<usize>, iterations: usize, guesses: usize| {
        let cost = u.len() as u64;
        let verdict = if cost <= inst.budget {
            Verdict::yes(Solution::DeleteSet(u), cost, EXACT)
        } else {
            Verdict::no(EXACT)
        };
        SolverReport::with_counts(verdict, iterations, guesses)
    };
    if inst.aplus.is_empty() {
        let mut alive = vec![true; n];
        let mut rounds = 0;
        loop {
            rounds += 1;
            let unanimous = unanimous_set(&members(&alive), soc);
            if unanimous.is_empty() {
                break;
            }
            for a in unanimous {
                alive[a] = false;
            }
        }
        let u = (0..n).filter(|&a| !alive[a]).collect();
        return Ok(decide(u, rounds, 0));
    }
    let plus = inst.in_aplus();
    let forced: Vec<bool> =
        (0..n).map(|a| !plus[a] && inst.aplus.iter().any(|&p| soc.qualifies(p, a))).collect();
    let mut best: Option<Vec<usize>> = None;
    let mut guesses = 0;
    for &a in &inst.aplus {
        guesses += 1;
        let ua: Vec<usize> = (0..n).filter(|&b| !forced[b] && !soc.qualifies(b, a)).collect();
        if ua.iter().any(|&b| plus[b]) {
            continue;
        }
        let mut deleted = forced.clone();
        for &b in &ua {
            deleted[b] = true;
        }
        let alive: Vec<usize> = (0..n).filter(|&b| !deleted[b]).collect();
        let f = membership(n, &evaluate(RuleId::Csr, &alive, soc));
        if inst.aplus.iter().all(|&p| f[p]) {
            let u = members(&deleted);
            if best.as_ref().is_none_or(|b| u.len() < b.len()) {
                best = Some(u);
            }
        }
    }
    Ok(match best {
        Some(u) => decide(u, 1, guesses),
        None => SolverReport::with_counts(Verdict::no(EXACT), 1, guesses),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::verify_solution;

    fn chain() -> AttackInstance {
        // a0 is unanimous and qualifies a1, a1 qualifies a2 (in A⁻).
        let soc = Society::from_rows(&[vec![1, 1, -1], vec![1, -1, 1], vec![1, -1, -1]]).unwrap();
        AttackInstance::new(soc, RuleId::Csr, Kind::DeleteIndividuals, vec![], vec![2], 1)
    }

    #[test]
    fn corrected_cuts_the_chain() {
        let inst = chain();
        let r = solve_csr_dgcdi_corrected(&inst).unwrap();
        let w = r.verdict.witness.unwrap();
        assert!(verify_solution(&inst, &w).unwrap().is_valid());
    }

    #[test]
    fn reduction_keeps_start_set() {
        let mut inst = chain();
        inst.kind = Kind::RelaxedDeleteIndividuals;
        let red = csr_rdgcdi_to_dgcdi(&inst).unwrap();
        let all = red.society.everyone();
        assert_eq!(unanimous_set(&all, &red.society), unanimous_set(&inst.society.everyone(), &inst.society));
        let published = csr_rdgcdi_to_dgcdi_as_published(&inst).unwrap();
        assert!(unanimous_set(&published.society.everyone(), &published.society).is_empty());
    }
}
