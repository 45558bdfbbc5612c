//! Brute-force oracles for every attack kind and exhaustive immunity checks.
//!
//! The oracles enumerate candidate attacks in a fixed total order (cheapest
//! first, then lexicographically), so the first verifying candidate is both a
//! minimum-cost witness and deterministic. Inputs beyond the configured caps
//! are refused with [`Error::CapExceeded`]; nothing is silently truncated.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{
    classify_instance, solution_cost, AttackInstance, Kind, Objective, RuleId, Society,
    Solution, Verdict,
};
use crate::rules::{evaluate_mask, from_mask, to_mask};

const NAME: &str = "brute_force";

/// Hard caps on oracle inputs. These are configuration: callers with
/// structured inputs (such as reduction outputs) may raise them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    /// Largest society for control attacks.
    pub control_max_n: usize,
    /// Largest society for bribery.
    pub bribery_max_n: usize,
    /// Largest number of flips the microbribery oracle will ever combine.
    pub max_flip_budget: usize,
    /// Largest number of candidate attacks examined before giving up.
    pub work_limit: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { control_max_n: 7, bribery_max_n: 5, max_flip_budget: 4, work_limit: 4_000_000 }
    }
}

impl OracleLimits {
    /// Limits suited to the larger but highly structured instances emitted
    /// by the reduction generators.
    pub fn generous() -> Self {
        OracleLimits { control_max_n: 40, bribery_max_n: 20, max_flip_budget: 4, work_limit: 20_000_000 }
    }
}

/// Bitmask evaluation supports at most this many individuals.
const MASK_WIDTH: usize = 63;

/// Dispatches to the oracle for the instance's attack kind.
pub fn brute_force(inst: &AttackInstance, limits: &OracleLimits) -> Result<Verdict> {
    match inst.kind {
        Kind::AddIndividuals | Kind::DeleteIndividuals | Kind::RelaxedDeleteIndividuals => {
            brute_control(inst, limits)
        }
        Kind::Bribery => brute_bribery(inst, limits),
        Kind::Microbribery => brute_microbribery(inst, limits),
    }
}

/// Target check on bitmasks.
struct Goal {
    plus: u64,
    minus: u64,
}

impl Goal {
    fn of(inst: &AttackInstance) -> Self {
        Goal { plus: to_mask(&inst.aplus), minus: to_mask(&inst.aminus) }
    }

    fn met(&self, rule: RuleId, t: u64, rows: &[u64]) -> bool {
        let f = evaluate_mask(rule, t, rows);
        f & self.plus == self.plus && f & self.minus == 0
    }
}

fn cap(what: String) -> Error {
    Error::CapExceeded(what)
}

struct Work {
    done: u64,
    limit: u64,
}

impl Work {
    fn tick(&mut self) -> Result<()> {
        self.done += 1;
        if self.done > self.limit {
            Err(cap(format!("more than {} candidates", self.limit)))
        } else {
            Ok(())
        }
    }
}

/// Calls `visit` on every `k`-subset of `pool` in lexicographic order until
/// it returns `Ok(true)`.
fn for_each_subset(
    pool: &[usize],
    k: usize,
    visit: &mut dyn FnMut(&[usize]) -> Result<bool>,
) -> Result<bool> {
    fn go(
        pool: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> Result<bool>,
    ) -> Result<bool> {
        if cur.len() == k {
            return visit(cur);
        }
        for i in start..pool.len() {
            if pool.len() - i < k - cur.len() {
                break;
            }
            cur.push(pool[i]);
            if go(pool, k, i + 1, cur, visit)? {
                return Ok(true);
            }
            cur.pop();
        }
        Ok(false)
    }
    go(pool, k, 0, &mut Vec::with_capacity(k), visit)
}

/// Exhaustive search over addition/deletion sets, by size then lexicographically.
pub fn brute_control(inst: &AttackInstance, limits: &OracleLimits) -> Result<Verdict> {
    inst.validate()?;
    let n = inst.n();
    if !inst.kind.is_control() {
        return Err(Error::Precondition("brute_control needs a control attack".into()));
    }
    if n > limits.control_max_n.min(MASK_WIDTH) {
        return Err(cap(format!("control oracle handles n <= {}, got {n}", limits.control_max_n)));
    }
    let rows = inst.society.row_masks();
    let goal = Goal::of(inst);
    let t0 = to_mask(&inst.participants());
    let plus = inst.in_aplus();
    let minus = inst.in_aminus();
    let pool: Vec<usize> = match inst.kind {
        Kind::AddIndividuals => (0..n).filter(|&i| t0 >> i & 1 == 0).collect(),
        Kind::DeleteIndividuals => (0..n).filter(|&i| !plus[i] && !minus[i]).collect(),
        _ => (0..n).filter(|&i| !plus[i]).collect(),
    };
    let add = inst.kind == Kind::AddIndividuals;
    let max_k = pool.len().min(usize::try_from(inst.budget).unwrap_or(usize::MAX));
    let mut work = Work { done: 0, limit: limits.work_limit };
    let mut found: Option<Vec<usize>> = None;
    for k in 0..=max_k {
        let hit = for_each_subset(&pool, k, &mut |u| {
            work.tick()?;
            let m = to_mask(u);
            let t = if add { t0 | m } else { t0 & !m };
            if goal.met(inst.rule, t, &rows) {
                found = Some(u.to_vec());
                Ok(true)
            } else {
                Ok(false)
            }
        })?;
        if hit {
            break;
        }
    }
    Ok(match found {
        Some(u) => {
            let cost = u.len() as u64;
            let sol = if add { Solution::AddSet(u) } else { Solution::DeleteSet(u) };
            Verdict::yes(sol, cost, NAME)
        }
        None => Verdict::no(NAME),
    })
}

/// Number of subsets of an `m`-set with at most `k` elements, saturating.
fn subsets_up_to(m: usize, k: usize) -> u64 {
    let mut total: u64 = 0;
    let mut c: u128 = 1;
    for j in 0..=k.min(m) {
        if j > 0 {
            c = c * (m - j + 1) as u128 / j as u128;
        }
        total = total.saturating_add(u64::try_from(c).unwrap_or(u64::MAX));
    }
    total
}

/// Largest number of items from `prices` whose total fits in `budget`.
fn affordable_count(prices: &[u64], budget: u64) -> usize {
    let mut sorted = prices.to_vec();
    sorted.sort_unstable();
    let mut spent = 0u64;
    let mut count = 0;
    for p in sorted {
        if spent + p > budget {
            break;
        }
        spent += p;
        count += 1;
    }
    count
}

/// Subsets of `0..prices.len()` with at most `max_size` elements and total
/// price at most `budget`, ordered by (price, lex). Items priced above the
/// budget never appear. Refuses to materialise more than `limit` subsets.
fn priced_subsets(prices: &[u64], budget: u64, max_size: usize, limit: u64) -> Result<Vec<(u64, Vec<usize>)>> {
    let pool: Vec<usize> = (0..prices.len()).filter(|&i| prices[i] <= budget).collect();
    let count = subsets_up_to(pool.len(), max_size);
    if count > limit {
        return Err(cap(format!("{count} candidate sets exceed the work limit {limit}")));
    }
    let mut out = Vec::new();
    for k in 0..=max_size.min(pool.len()) {
        for_each_subset(&pool, k, &mut |u| {
            let p: u64 = u.iter().map(|&i| prices[i]).sum();
            if p <= budget {
                out.push((p, u.to_vec()));
            }
            Ok(false)
        })?;
    }
    out.sort();
    Ok(out)
}

/// Exhaustive bribery: bribed sets by increasing total price, then every
/// joint assignment of their rows. Under consent rules only the columns of
/// target members are varied (a consent verdict on `a` depends on column `a`
/// alone); other rules vary whole rows.
pub fn brute_bribery(inst: &AttackInstance, limits: &OracleLimits) -> Result<Verdict> {
    inst.validate()?;
    let n = inst.n();
    if inst.kind != Kind::Bribery {
        return Err(Error::Precondition("brute_bribery needs a bribery instance".into()));
    }
    if n > limits.bribery_max_n.min(MASK_WIDTH) {
        return Err(cap(format!("bribery oracle handles n <= {}, got {n}", limits.bribery_max_n)));
    }
    let prices: Vec<u64> = (0..n).map(|i| inst.prices.individual(i)).collect();
    let max_bribed = affordable_count(&prices, inst.budget);
    let base = inst.society.row_masks();
    let goal = Goal::of(inst);
    let all = to_mask(&inst.society.everyone());
    let free_cols: Vec<usize> = match inst.rule {
        RuleId::Consent { .. } => {
            let mut c: Vec<usize> = inst.aplus.iter().chain(&inst.aminus).copied().collect();
            c.sort_unstable();
            c
        }
        _ => (0..n).collect(),
    };
    let w = free_cols.len();
    let mut work = Work { done: 0, limit: limits.work_limit };
    for (_, b) in priced_subsets(&prices, inst.budget, max_bribed, limits.work_limit)? {
        let bits = w * b.len();
        if bits >= 63 {
            return Err(cap(format!("{bits} free profile bits")));
        }
        let mut rows = base.clone();
        for code in 0u64..(1u64 << bits) {
            work.tick()?;
            for (slot, &i) in b.iter().enumerate() {
                let chunk = (code >> (slot * w)) & ((1u64 << w) - 1);
                let mut r = base[i];
                for (c, &j) in free_cols.iter().enumerate() {
                    if chunk >> c & 1 == 1 {
                        r |= 1 << j;
                    } else {
                        r &= !(1 << j);
                    }
                }
                rows[i] = r;
            }
            if goal.met(inst.rule, all, &rows) {
                let map: BTreeMap<usize, Vec<bool>> =
                    b.iter().map(|&i| (i, (0..n).map(|j| rows[i] >> j & 1 == 1).collect())).collect();
                let sol = Solution::Bribe(map);
                let cost = solution_cost(inst, &sol);
                return Ok(Verdict::yes(sol, cost, NAME));
            }
        }
    }
    Ok(Verdict::no(NAME))
}

/// Exhaustive microbribery: flip sets by increasing cost, then lexicographically.
pub fn brute_microbribery(inst: &AttackInstance, limits: &OracleLimits) -> Result<Verdict> {
    inst.validate()?;
    let n = inst.n();
    if inst.kind != Kind::Microbribery {
        return Err(Error::Precondition("brute_microbribery needs a microbribery instance".into()));
    }
    if n > MASK_WIDTH {
        return Err(cap(format!("microbribery oracle handles n <= {MASK_WIDTH}, got {n}")));
    }
    let entries: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let prices: Vec<u64> = entries.iter().map(|&(i, j)| inst.prices.entry(i, j)).collect();
    // The largest number of flips the budget could pay for.
    let affordable = affordable_count(&prices, inst.budget);
    let max_flips = affordable.min(limits.max_flip_budget);
    let base = inst.society.row_masks();
    let goal = Goal::of(inst);
    let all = to_mask(&inst.society.everyone());
    let mut work = Work { done: 0, limit: limits.work_limit };
    for (_, set) in priced_subsets(&prices, inst.budget, max_flips, limits.work_limit)? {
        work.tick()?;
        let mut rows = base.clone();
        for &e in &set {
            let (i, j) = entries[e];
            rows[i] ^= 1 << j;
        }
        if goal.met(inst.rule, all, &rows) {
            let flips: Vec<(usize, usize)> = set.iter().map(|&e| entries[e]).collect();
            let sol = Solution::Microbribe(flips);
            let cost = solution_cost(inst, &sol);
            return Ok(Verdict::yes(sol, cost, NAME));
        }
    }
    if affordable > limits.max_flip_budget {
        return Err(cap(format!(
            "budget affords {affordable} flips, the oracle combines at most {}",
            limits.max_flip_budget
        )));
    }
    Ok(Verdict::no(NAME))
}

/// Estimated number of candidate attacks the oracle examines before it can
/// answer NO (saturating). It ignores early exits on YES-instances, so it is
/// an upper bound that lets callers skip runs too large to finish. It is
/// `u64::MAX` when the caps keep the oracle from ever answering NO.
pub fn oracle_effort(inst: &AttackInstance, limits: &OracleLimits) -> u64 {
    let n = inst.n();
    let budget = usize::try_from(inst.budget).unwrap_or(usize::MAX);
    let max_n = match inst.kind {
        Kind::Bribery => limits.bribery_max_n,
        Kind::Microbribery => MASK_WIDTH,
        _ => limits.control_max_n,
    };
    if n > max_n.min(MASK_WIDTH) {
        return u64::MAX;
    }
    match inst.kind {
        Kind::AddIndividuals | Kind::DeleteIndividuals | Kind::RelaxedDeleteIndividuals => {
            let plus = inst.in_aplus();
            let minus = inst.in_aminus();
            let t0 = inst.participants();
            let pool = match inst.kind {
                Kind::AddIndividuals => n - t0.len(),
                Kind::DeleteIndividuals => (0..n).filter(|&i| !plus[i] && !minus[i]).count(),
                _ => (0..n).filter(|&i| !plus[i]).count(),
            };
            subsets_up_to(pool, budget)
        }
        Kind::Bribery => {
            let prices: Vec<u64> = (0..n).map(|i| inst.prices.individual(i)).collect();
            let m = prices.iter().filter(|&&p| p <= inst.budget).count();
            let k = affordable_count(&prices, inst.budget);
            let w = match inst.rule {
                RuleId::Consent { .. } => inst.aplus.len() + inst.aminus.len(),
                _ => n,
            };
            let mut total: u64 = 0;
            for b in 0..=k.min(m) {
                let bits = (w * b) as u32;
                let rows = if bits >= 64 { u64::MAX } else { 1u64 << bits };
                let sets = subsets_up_to(m, b).saturating_sub(if b == 0 { 0 } else { subsets_up_to(m, b - 1) });
                total = total.saturating_add(sets.saturating_mul(rows));
            }
            total
        }
        Kind::Microbribery => {
            let prices: Vec<u64> =
                (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| inst.prices.entry(i, j)).collect();
            let m = prices.iter().filter(|&&p| p <= inst.budget).count();
            let k = affordable_count(&prices, inst.budget);
            if k > limits.max_flip_budget {
                return u64::MAX;
            }
            subsets_up_to(m, k)
        }
    }
}

/// Outcome of an immunity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ImmunityOutcome {
    /// No instance examined admitted a successful attack.
    NoWitnessFound { trials: u64 },
    /// An instance with initially unmet targets and an attack meeting them.
    SusceptibilityWitness { instance: Box<AttackInstance>, solution: Solution },
}

impl ImmunityOutcome {
    pub fn is_immune(&self) -> bool {
        matches!(self, ImmunityOutcome::NoWitnessFound { .. })
    }
}

/// How instances are produced for [`immunity_check`].
#[derive(Clone, Debug, PartialEq)]
pub enum Sampler {
    /// Every profile and every target choice for each `n` up to `max_n`.
    Exhaustive { max_n: usize },
    /// Seeded random instances with `n` drawn from `min_n..=max_n`.
    Random { seed: u64, min_n: usize, max_n: usize },
}

/// Whether the targets of `inst` are all initially unmet: some member of a
/// nonempty `A⁺` is not qualified and some member of a nonempty `A⁻` is.
pub fn targets_initially_unmet(inst: &AttackInstance) -> bool {
    let c = classify_instance(inst);
    (inst.aplus.is_empty() || !c.aplus_initially_met) && (inst.aminus.is_empty() || !c.aminus_initially_met)
}

/// Target choices `(A⁺, A⁻)` over `pool` matching `objective`. General
/// objectives need both sets nonempty; exact ones partition the pool with
/// `A⁺` nonempty.
fn target_choices(pool: &[usize], objective: Objective, kind: Kind) -> Vec<(Vec<usize>, Vec<usize>)> {
    let m = pool.len();
    let mut out = Vec::new();
    for code in 0..3usize.pow(m as u32) {
        let (mut p, mut q) = (Vec::new(), Vec::new());
        let mut c = code;
        for &a in pool {
            match c % 3 {
                1 => p.push(a),
                2 => q.push(a),
                _ => {}
            }
            c /= 3;
        }
        let covers = p.len() + q.len() == m;
        let keep = match objective {
            Objective::Constructive => !p.is_empty() && q.is_empty(),
            Objective::Destructive => p.is_empty() && !q.is_empty(),
            Objective::Exact => covers && !p.is_empty() && kind != Kind::DeleteIndividuals,
            Objective::General => {
                !p.is_empty() && !q.is_empty() && !(kind == Kind::DeleteIndividuals && covers)
            }
        };
        if keep {
            out.push((p, q));
        }
    }
    out
}

/// Instances for one profile: every legal `T` (adding) and target choice,
/// with budget `n`, keeping only those whose targets are initially unmet.
fn instances_for(soc: &Society, rule: RuleId, kind: Kind, objective: Objective) -> Vec<AttackInstance> {
    let n = soc.n();
    let ts: Vec<Vec<usize>> = if kind == Kind::AddIndividuals {
        (1u64..(1 << n)).map(from_mask).collect()
    } else {
        vec![soc.everyone()]
    };
    let mut out = Vec::new();
    for t in ts {
        for (p, q) in target_choices(&t, objective, kind) {
            let mut inst = AttackInstance::new(soc.clone(), rule, kind, p, q, n as u64);
            if kind == Kind::AddIndividuals {
                inst = inst.with_initial(t.clone());
            }
            if targets_initially_unmet(&inst) {
                out.push(inst);
            }
        }
    }
    out
}

/// Searches for an instance of the cell whose initially unmet targets can
/// be met by an attack of the given kind (budget `n`).
///
/// The exhaustive sampler enumerates all `2^(n²)` profiles for each `n` up
/// to its bound together with all target choices; the random sampler draws
/// `trials` profiles and tries every target choice on each.
pub fn immunity_check(
    rule: RuleId,
    kind: Kind,
    objective: Objective,
    sampler: &Sampler,
    trials: u64,
    limits: &OracleLimits,
) -> Result<ImmunityOutcome> {
    let mut examined = 0u64;
    let mut probe = |soc: Society| -> Result<Option<ImmunityOutcome>> {
        for inst in instances_for(&soc, rule, kind, objective) {
            examined += 1;
            let v = brute_force(&inst, limits)?;
            if let Some(sol) = v.witness {
                return Ok(Some(ImmunityOutcome::SusceptibilityWitness { instance: Box::new(inst), solution: sol }));
            }
        }
        Ok(None)
    };
    match sampler {
        Sampler::Exhaustive { max_n } => {
            for n in 1..=*max_n {
                let cells = n * n;
                if cells >= 32 {
                    return Err(cap(format!("exhaustive enumeration of {n}×{n} profiles")));
                }
                for code in 0u64..(1u64 << cells) {
                    let soc = Society::from_fn(n, |i, j| code >> (i * n + j) & 1 == 1);
                    if let Some(w) = probe(soc)? {
                        return Ok(w);
                    }
                }
            }
        }
        Sampler::Random { seed, min_n, max_n } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for _ in 0..trials {
                let n = rng.gen_range(*min_n..=*max_n);
                let density = rng.gen_range(0.2..0.9);
                let soc = Society::from_fn(n, |_, _| rng.gen_bool(density));
                if let Some(w) = probe(soc)? {
                    return Ok(w);
                }
            }
        }
    }
    Ok(ImmunityOutcome::NoWitnessFound { trials: examined })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::verify_solution;

    #[test]
    fn add_with_full_t_only_tries_empty_set() {
        let soc = Society::uniform(3, false);
        let inst = AttackInstance::new(soc, RuleId::Lsr, Kind::AddIndividuals, vec![0], vec![], 3)
            .with_initial(vec![0, 1, 2]);
        let v = brute_control(&inst, &OracleLimits::default()).unwrap();
        assert!(!v.is_yes());
    }

    #[test]
    fn destructive_bribery_one_bribe() {
        let soc = Society::uniform(3, true);
        for rule in [RuleId::Ic, RuleId::TwoIc] {
            let inst = AttackInstance::new(soc.clone(), rule, Kind::Bribery, vec![], vec![1], 1);
            let v = brute_bribery(&inst, &OracleLimits::default()).unwrap();
            assert_eq!(v.cost, 1);
            assert!(verify_solution(&inst, v.witness.as_ref().unwrap()).unwrap().is_valid());
        }
    }

    #[test]
    fn zero_budget_and_unmet_targets_is_no() {
        let soc = Society::uniform(3, true);
        let inst = AttackInstance::new(soc, RuleId::Ic, Kind::Bribery, vec![], vec![1], 0);
        assert!(!brute_bribery(&inst, &OracleLimits::default()).unwrap().is_yes());
    }

    #[test]
    fn single_flip_self_qualifies() {
        let soc = Society::uniform(3, false);
        let inst = AttackInstance::new(soc, RuleId::TwoLic, Kind::Microbribery, vec![2], vec![], 4);
        let v = brute_microbribery(&inst, &OracleLimits::default()).unwrap();
        assert_eq!(v.witness, Some(Solution::Microbribe(vec![(2, 2)])));
    }

    #[test]
    fn caps_are_errors() {
        let soc = Society::uniform(8, true);
        let inst = AttackInstance::new(soc, RuleId::Lsr, Kind::DeleteIndividuals, vec![], vec![0], 2);
        assert!(matches!(brute_control(&inst, &OracleLimits::default()), Err(Error::CapExceeded(_))));
    }
}
