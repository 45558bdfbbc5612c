//! Bribery under the iterative rules.
//!
//! For 2IC and 2LIC the core is a feasibility test: given the set `B` of
//! bribed individuals, decide whether replacement rows exist that meet both
//! targets, and build them. Around it an anchor search enumerates the
//! individuals that must be bribed for a chosen anchor `a*` to be qualified by
//! everyone, plus at most three further individuals.

use std::collections::BTreeMap;

use super::{require, SolverReport};
use crate::error::Result;
use crate::model::{
    members, solution_cost, targets_met, AttackInstance, Kind, RuleId, Solution, Verdict,
};

const DGB: &str = "solve_ic_2ic_dgb_priced";

/// Destructive bribery under IC and 2IC (priced or not).
///
/// If someone disqualifies everyone, nobody is unanimous and the qualified
/// set is empty; so either the target is already met, or the cheapest
/// individual is bribed into an all-`-1` row.
pub fn solve_ic_2ic_dgb_priced(inst: &AttackInstance) -> Result<SolverReport> {
    require(matches!(inst.rule, RuleId::Ic | RuleId::TwoIc), "rule must be IC or 2IC")?;
    require(inst.kind == Kind::Bribery, "kind must be bribery")?;
    require(inst.aplus.is_empty(), "A+ must be empty")?;
    let n = inst.n();
    if targets_met(inst, &inst.society.everyone(), &inst.society).is_ok() {
        return Ok(SolverReport::new(Verdict::yes(Solution::Bribe(BTreeMap::new()), 0, DGB)));
    }
    let cheapest = (0..n).min_by_key(|&i| (inst.prices.individual(i), i)).expect("nonempty society");
    let cost = inst.prices.individual(cheapest);
    let verdict = if cost <= inst.budget {
        Verdict::yes(Solution::Bribe(BTreeMap::from([(cheapest, vec![false; n])])), cost, DGB)
    } else {
        Verdict::no(DGB)
    };
    Ok(SolverReport::new(verdict))
}

/// Priced constructive bribery under 2IC.
pub fn solve_2ic_cgb_priced(inst: &AttackInstance) -> Result<SolverReport> {
    run(inst, RuleId::TwoIc, true, "solve_2ic_cgb_priced")
}

/// Priced constructive bribery under 2LIC.
pub fn solve_2lic_cgb_priced(inst: &AttackInstance) -> Result<SolverReport> {
    run(inst, RuleId::TwoLic, true, "solve_2lic_cgb_priced")
}

/// Unpriced bribery under 2IC, any objective.
pub fn solve_2ic_gb_unpriced(inst: &AttackInstance) -> Result<SolverReport> {
    run(inst, RuleId::TwoIc, false, "solve_2ic_gb_unpriced")
}

/// Unpriced bribery under 2LIC, any objective.
pub fn solve_2lic_gb_unpriced(inst: &AttackInstance) -> Result<SolverReport> {
    run(inst, RuleId::TwoLic, false, "solve_2lic_gb_unpriced")
}

fn run(inst: &AttackInstance, rule: RuleId, priced: bool, name: &str) -> Result<SolverReport> {
    require(inst.rule == rule, "unexpected rule")?;
    require(inst.kind == Kind::Bribery, "kind must be bribery")?;
    if priced {
        require(inst.aminus.is_empty(), "A- must be empty")?;
    } else {
        require(!inst.priced, "instance must be unpriced")?;
    }
    let ctx = Ctx::new(inst);
    let search = ctx.search();
    let verdict = match search.best {
        Some((rows, _)) => {
            let sol = Solution::Bribe(rows);
            let cost = solution_cost(inst, &sol);
            if cost <= inst.budget {
                Verdict::yes(sol, cost, name)
            } else {
                Verdict::no(name)
            }
        }
        None => Verdict::no(name),
    };
    Ok(SolverReport::with_counts(verdict, search.iterations, search.guesses))
}

type Rows = BTreeMap<usize, Vec<bool>>;

struct SearchOutcome {
    best: Option<(Rows, u64)>,
    iterations: usize,
    guesses: usize,
}

struct Ctx<'a> {
    inst: &'a AttackInstance,
    n: usize,
    lic: bool,
    plus: Vec<bool>,
    minus: Vec<bool>,
    /// Qualifies every member of `A⁺` (under the original profile).
    good: Vec<bool>,
}

impl<'a> Ctx<'a> {
    fn new(inst: &'a AttackInstance) -> Self {
        let soc = &inst.society;
        let n = soc.n();
        Ctx {
            inst,
            n,
            lic: inst.rule == RuleId::TwoLic,
            plus: inst.in_aplus(),
            minus: inst.in_aminus(),
            good: (0..n).map(|y| inst.aplus.iter().all(|&a| soc.qualifies(y, a))).collect(),
        }
    }

    fn price(&self, i: usize) -> u64 {
        self.inst.prices.individual(i)
    }

    fn search(&self) -> SearchOutcome {
        let soc = &self.inst.society;
        let n = self.n;
        let mut out = SearchOutcome { best: None, iterations: 0, guesses: 0 };
        let plus_self_dis: Vec<usize> =
            self.inst.aplus.iter().copied().filter(|&a| !soc.qualifies(a, a)).collect();

        for anchor in (0..n).filter(|&a| !self.minus[a]) {
            out.guesses += 1;
            let mut forced = vec![false; n];
            for &a in &plus_self_dis {
                forced[a] = true;
            }
            for b in (0..n).filter(|&b| !soc.qualifies(b, anchor)) {
                forced[b] = true;
            }
            if !self.good[anchor] {
                forced[anchor] = true;
            }
            self.extend(&forced, 3, &mut out);
        }
        if self.lic || self.inst.aplus.is_empty() {
            let mut forced = vec![false; n];
            for &a in &plus_self_dis {
                forced[a] = true;
            }
            if self.lic {
                for &a in self.inst.aminus.iter().filter(|&&a| soc.qualifies(a, a)) {
                    forced[a] = true;
                }
            }
            self.extend(&forced, 2, &mut out);
        }
        out
    }

    /// Tries `forced ∪ X` for every `X` of at most `extra` further
    /// individuals, cheapest first, and records the first feasible one if it
    /// beats the best found so far.
    fn extend(&self, forced: &[bool], extra: usize, out: &mut SearchOutcome) {
        let base: u64 = members(forced).iter().map(|&i| self.price(i)).sum();
        let bound = out.best.as_ref().map_or(u64::MAX, |b| b.1);
        if base >= bound {
            return;
        }
        let free: Vec<usize> = (0..self.n).filter(|&i| !forced[i]).collect();
        let mut candidates: Vec<(u64, Vec<usize>)> = vec![(0, Vec::new())];
        for (p, &x) in free.iter().enumerate() {
            if extra >= 1 {
                candidates.push((self.price(x), vec![x]));
            }
            for (q, &y) in free.iter().enumerate().skip(p + 1) {
                if extra >= 2 {
                    candidates.push((self.price(x) + self.price(y), vec![x, y]));
                }
                if extra >= 3 {
                    for &z in free.iter().skip(q + 1) {
                        candidates.push((self.price(x) + self.price(y) + self.price(z), vec![x, y, z]));
                    }
                }
            }
        }
        candidates.sort();
        let mut bribed = forced.to_vec();
        for (cost, extra_set) in candidates {
            if base + cost >= bound {
                break;
            }
            out.iterations += 1;
            for &x in &extra_set {
                bribed[x] = true;
            }
            let plan = self.plan(&bribed);
            for &x in &extra_set {
                bribed[x] = false;
            }
            if let Some(rows) = plan {
                out.best = Some((rows, base + cost));
                return;
            }
        }
    }

    /// Replacement rows for exactly the individuals in `bribed` meeting both
    /// targets, if any exist.
    fn plan(&self, bribed: &[bool]) -> Option<Rows> {
        let soc = &self.inst.society;
        let n = self.n;
        let aplus = &self.inst.aplus;
        let aminus = &self.inst.aminus;
        if aplus.iter().any(|&a| !bribed[a] && !soc.qualifies(a, a)) {
            return None;
        }
        let b_list = members(bribed);
        let in_c: Vec<bool> = (0..n).map(|y| (0..n).all(|i| bribed[i] || soc.qualifies(i, y))).collect();

        // Nobody unanimous: the qualified set is empty (2IC) or the
        // self-qualifiers (2LIC).
        if self.lic || aplus.is_empty() {
            let excluded = (0..n)
                .filter(|&y| in_c[y])
                .all(|y| b_list.iter().any(|&b| b != y || !self.plus[y]));
            let minus_ok = !self.lic || aminus.iter().all(|&z| bribed[z] || !soc.qualifies(z, z));
            if excluded && minus_ok {
                let rows =
                    b_list.iter().map(|&b| (b, (0..n).map(|j| j == b && self.plus[b]).collect())).collect();
                return self.checked(rows);
            }
        }

        let g: Vec<usize> =
            (0..n).filter(|&y| in_c[y] && !bribed[y] && self.good[y] && !self.minus[y]).collect();
        let must_exclude: Vec<usize> =
            (0..n).filter(|&y| in_c[y] && !bribed[y] && (!self.good[y] || self.minus[y])).collect();
        let bc: Vec<usize> = (0..n).filter(|&y| in_c[y] && bribed[y] && !self.minus[y]).collect();
        let uncovered_minus: Vec<usize> = aminus
            .iter()
            .copied()
            .filter(|&z| !bribed[z] && soc.qualifies(z, z))
            .collect();
        let minus_covered_by_g =
            uncovered_minus.iter().all(|&z| g.iter().any(|&k| !soc.qualifies(k, z)));

        let mut choices: Vec<Vec<usize>> = Vec::new();
        if b_list.len() >= 3 {
            choices.push(Vec::new());
            choices.extend(bc.iter().map(|&s| vec![s]));
        } else {
            for mask in 0u32..(1 << bc.len()) {
                choices.push((0..bc.len()).filter(|&i| mask >> i & 1 == 1).map(|i| bc[i]).collect());
            }
        }
        for s in choices {
            if g.is_empty() && s.is_empty() {
                continue;
            }
            if s.is_empty() && !minus_covered_by_g {
                continue;
            }
            let in_s: Vec<bool> = (0..n).map(|y| s.contains(&y)).collect();
            let rest: Vec<usize> = b_list.iter().copied().filter(|&b| !in_s[b]).collect();
            let excluded = must_exclude
                .iter()
                .chain(bc.iter().filter(|&&y| !in_s[y]))
                .all(|&y| if self.plus[y] { rest.iter().any(|&b| b != y) } else { !b_list.is_empty() });
            if !excluded {
                continue;
            }
            let mut in_k = vec![false; n];
            for &k in g.iter().chain(&s) {
                in_k[k] = true;
            }
            let rows = b_list
                .iter()
                .map(|&b| {
                    let row = if in_s[b] {
                        (0..n).map(|j| in_k[j] || self.plus[j]).collect()
                    } else {
                        (0..n).map(|j| in_k[j] || (j == b && self.plus[b])).collect()
                    };
                    (b, row)
                })
                .collect();
            return self.checked(rows);
        }
        None
    }

    fn checked(&self, rows: Rows) -> Option<Rows> {
        debug_assert!(
            {
                let mut soc = self.inst.society.clone();
                for (&i, row) in &rows {
                    soc.set_row(i, row);
                }
                targets_met(self.inst, &soc.everyone(), &soc).is_ok()
            },
            "bribery plan does not meet the targets"
        );
        Some(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{verify_solution, Prices, Society};

    #[test]
    fn destructive_bribes_the_cheapest() {
        let soc = Society::uniform(3, true);
        let inst = AttackInstance::new(soc, RuleId::Ic, Kind::Bribery, vec![], vec![0], 5)
            .with_prices(Prices::PerIndividual(vec![4, 2, 3]));
        let r = solve_ic_2ic_dgb_priced(&inst).unwrap();
        assert_eq!(r.verdict.cost, 2);
        assert!(verify_solution(&inst, r.verdict.witness.as_ref().unwrap()).unwrap().is_valid());
    }

    #[test]
    fn constructive_fixes_a_self_disqualifier() {
        let soc = Society::from_rows(&[vec![1, 1], vec![1, -1]]).unwrap();
        let inst = AttackInstance::new(soc, RuleId::TwoIc, Kind::Bribery, vec![1], vec![], 1);
        let r = solve_2ic_gb_unpriced(&inst).unwrap();
        assert!(r.verdict.is_yes());
        assert!(verify_solution(&inst, r.verdict.witness.as_ref().unwrap()).unwrap().is_valid());
    }
}
