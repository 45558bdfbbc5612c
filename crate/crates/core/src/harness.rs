//! Cross-checks between independent deciders: polynomial solvers against the
//! oracle, immunity sweeps, reduction round trips and the worked examples.
//!
//! Every suite is deterministic given its seed. Trials are independent and
//! run on a small worker pool; records are sorted by trial id before the
//! report is assembled, so thread scheduling never shows in the output.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{brute_force, immunity_check, oracle_effort, ImmunityOutcome, OracleLimits, Sampler};
use crate::json::{instance_to_value, society_from_json, instance_from_json, solution_to_value, verdict_to_value};
use crate::model::{
    random_instance_with, solution_cost, verify_solution, AttackInstance, Kind, Objective, RandomOptions, RuleId,
    Verdict,
};
use crate::poly::{select_solver, solver_by_name, solve_csr_dgcdi_corrected, solve_csr_dgcdi_naive_ery20};
use crate::reductions::{build_reduction_for, solve_source, source_corpus, SourceProblem, Theorem};
use crate::rules::evaluate;

/// The profile of the introductory worked example.
pub const EX1_JSON: &str = include_str!("../../../fixtures/ex1.json");
/// The destructive-deletion instance on which the naive CSR loop fails.
pub const EX2_JSON: &str = include_str!("../../../fixtures/ex2.json");

/// A cross-check suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    PolyVsOracle,
    Immunity,
    ReductionRoundtrip,
    Fixtures,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::PolyVsOracle, Suite::Immunity, Suite::ReductionRoundtrip, Suite::Fixtures];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::PolyVsOracle => "poly-vs-oracle",
            Suite::Immunity => "immunity",
            Suite::ReductionRoundtrip => "reduction-roundtrip",
            Suite::Fixtures => "fixtures",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|s| s.name() == text.trim())
            .ok_or_else(|| Error::Usage(format!("unknown suite `{text}`")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Oracle caps for a run. `max_effort` bounds [`oracle_effort`]; trials
/// estimated above it are reported as capped without running the oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    pub limits: OracleLimits,
    pub max_effort: u64,
}

impl Caps {
    /// The caps each suite uses unless told otherwise.
    pub fn for_suite(suite: Suite) -> Self {
        match suite {
            Suite::ReductionRoundtrip => Caps { limits: OracleLimits::generous(), max_effort: 2_000_000 },
            _ => Caps { limits: OracleLimits::default(), max_effort: u64::MAX },
        }
    }
}

/// Outcome of one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrialStatus {
    /// Both sides agree.
    Agree,
    /// The sides disagree, or a witness failed verification.
    Disagree,
    /// The oracle could not finish within the caps.
    Capped,
    /// The trial does not apply (e.g. the source violates a precondition).
    Skipped,
}

impl TrialStatus {
    pub fn name(&self) -> &'static str {
        match self {
            TrialStatus::Agree => "agree",
            TrialStatus::Disagree => "disagree",
            TrialStatus::Capped => "capped",
            TrialStatus::Skipped => "skipped",
        }
    }
}

/// One side of a comparison: who decided, and what.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Side {
    pub name: String,
    pub verdict: Verdict,
}

/// One trial of a suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial: u64,
    /// Solver, cell, theorem or fixture check the trial belongs to.
    pub subject: String,
    /// Seed that regenerates the trial's instance, when it is random.
    pub seed: Option<u64>,
    pub status: TrialStatus,
    pub detail: Option<String>,
    pub instance: Option<AttackInstance>,
    pub source: Option<SourceProblem>,
    pub left: Option<Side>,
    pub right: Option<Side>,
    /// Wall time spent per decider.
    pub timings: Vec<(String, Duration)>,
}

impl TrialRecord {
    fn new(trial: u64, subject: impl Into<String>) -> Self {
        TrialRecord {
            trial,
            subject: subject.into(),
            seed: None,
            status: TrialStatus::Agree,
            detail: None,
            instance: None,
            source: None,
            left: None,
            right: None,
            timings: Vec::new(),
        }
    }

    fn fail(&mut self, why: impl Into<String>) {
        self.status = TrialStatus::Disagree;
        self.detail = Some(why.into());
    }

    fn cap(&mut self, why: impl Into<String>) {
        self.status = TrialStatus::Capped;
        self.detail = Some(why.into());
    }

    /// The record as one JSON object. Disagreements carry the full instance;
    /// other records only the verdicts.
    pub fn to_value(&self) -> Value {
        let mut m = serde_json::Map::new();
        m.insert("trial".into(), json!(self.trial));
        m.insert("subject".into(), json!(self.subject));
        if let Some(s) = self.seed {
            m.insert("seed".into(), json!(s));
        }
        m.insert("status".into(), json!(self.status.name()));
        if let Some(d) = &self.detail {
            m.insert("detail".into(), json!(d));
        }
        if let Some(src) = &self.source {
            m.insert("source".into(), serde_json::to_value(src).expect("source serialises"));
        }
        if self.status == TrialStatus::Disagree {
            if let Some(inst) = &self.instance {
                m.insert("instance".into(), instance_to_value(inst));
            }
        }
        for (key, side) in [("left", &self.left), ("right", &self.right)] {
            if let Some(s) = side {
                m.insert(key.into(), json!({ "name": s.name, "verdict": verdict_to_value(&s.verdict) }));
            }
        }
        Value::Object(m)
    }
}

/// Per-subject tallies.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub agree: u64,
    pub disagree: u64,
    pub capped: u64,
    pub skipped: u64,
}

/// Result of [`run_crosscheck`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: u64,
    /// Records sorted by trial id.
    pub records: Vec<TrialRecord>,
    /// Wall time per decider, summed over trials.
    pub wall_time: BTreeMap<String, Duration>,
}

impl CrossCheckReport {
    fn count(&self, status: TrialStatus) -> u64 {
        self.records.iter().filter(|r| r.status == status).count() as u64
    }

    pub fn agreements(&self) -> u64 {
        self.count(TrialStatus::Agree)
    }

    pub fn capped(&self) -> u64 {
        self.count(TrialStatus::Capped)
    }

    pub fn disagreements(&self) -> Vec<&TrialRecord> {
        self.records.iter().filter(|r| r.status == TrialStatus::Disagree).collect()
    }

    pub fn passed(&self) -> bool {
        self.disagreements().is_empty()
    }

    /// Tallies per subject, in subject order.
    pub fn by_subject(&self) -> BTreeMap<String, Tally> {
        let mut out: BTreeMap<String, Tally> = BTreeMap::new();
        for r in &self.records {
            let t = out.entry(r.subject.clone()).or_default();
            match r.status {
                TrialStatus::Agree => t.agree += 1,
                TrialStatus::Disagree => t.disagree += 1,
                TrialStatus::Capped => t.capped += 1,
                TrialStatus::Skipped => t.skipped += 1,
            }
        }
        out
    }

    /// The closing summary record. Wall times are included only on request
    /// because they differ between otherwise identical runs.
    pub fn summary_value(&self, timings: bool) -> Value {
        let subjects: serde_json::Map<String, Value> = self
            .by_subject()
            .into_iter()
            .map(|(k, t)| {
                (k, json!({ "agree": t.agree, "disagree": t.disagree, "capped": t.capped, "skipped": t.skipped }))
            })
            .collect();
        let mut m = serde_json::Map::new();
        m.insert("summary".into(), json!(true));
        m.insert("suite".into(), json!(self.suite.name()));
        m.insert("seed".into(), json!(self.seed));
        m.insert("trials".into(), json!(self.trials));
        m.insert("records".into(), json!(self.records.len()));
        m.insert("agreements".into(), json!(self.agreements()));
        m.insert("disagreements".into(), json!(self.disagreements().len()));
        m.insert("capped".into(), json!(self.capped()));
        m.insert("passed".into(), json!(self.passed()));
        m.insert("subjects".into(), Value::Object(subjects));
        if timings {
            let t: serde_json::Map<String, Value> =
                self.wall_time.iter().map(|(k, d)| (k.clone(), json!(d.as_secs_f64() * 1e3))).collect();
            m.insert("wall_time_ms".into(), Value::Object(t));
        }
        Value::Object(m)
    }

    /// Newline-delimited JSON: one line per record, then the summary.
    pub fn to_ndjson(&self, timings: bool) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.to_value().to_string());
            out.push('\n');
        }
        out.push_str(&self.summary_value(timings).to_string());
        out.push('\n');
        out
    }
}

/// Runs a suite.
///
/// * `poly-vs-oracle`: `trials` random instances, spread round-robin over
///   the solver cells (`0` means 500 per solver).
/// * `immunity`: every claimed immune cell is swept exhaustively for
///   `n <= 3`, plus `trials` random profiles with `n` in 4..=5; every probed
///   susceptible cell must yield a witness.
/// * `reduction-roundtrip`: per theorem, `trials` sources sampled from the
///   exhaustive corpus (`0` means the whole corpus).
/// * `fixtures`: the worked examples; `trials` is ignored.
pub fn run_crosscheck(suite: Suite, seed: u64, trials: u64, caps: &Caps) -> CrossCheckReport {
    let records = match suite {
        Suite::PolyVsOracle => poly_vs_oracle(seed, trials, caps),
        Suite::Immunity => immunity(seed, trials, caps),
        Suite::ReductionRoundtrip => reduction_roundtrip(seed, trials, caps),
        Suite::Fixtures => fixtures(),
    };
    let mut wall_time: BTreeMap<String, Duration> = BTreeMap::new();
    for r in &records {
        for (name, d) in &r.timings {
            *wall_time.entry(name.clone()).or_default() += *d;
        }
    }
    CrossCheckReport { suite, seed, trials, records, wall_time }
}

/// Maps `f` over `items` on a worker pool; results keep the input order.
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let next = AtomicUsize::new(0);
    let done = Mutex::new(Vec::with_capacity(items.len()));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                done.lock().expect("worker panicked").push((i, r));
            });
        }
    });
    let mut done = done.into_inner().expect("worker panicked");
    done.sort_by_key(|(i, _)| *i);
    done.into_iter().map(|(_, r)| r).collect()
}

/// Seed for attempt `b` of trial `a` under `seed` (SplitMix64 finaliser).
fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn timed<R>(f: impl FnOnce() -> R) -> (R, Duration) {
    let start = Instant::now();
    let r = f();
    (r, start.elapsed())
}

/// The instances a polynomial solver is checked on.
#[derive(Clone, Debug)]
pub struct PolyCell {
    pub solver: &'static str,
    pub rules: Vec<RuleId>,
    pub kinds: Vec<Kind>,
    pub objectives: Vec<Objective>,
    pub priced: Vec<bool>,
    pub max_n: usize,
    pub max_budget: u64,
    /// The solver returns a minimum-cost witness.
    pub optimal: bool,
}

fn consent_rules(s_max: usize) -> Vec<RuleId> {
    (1..=s_max).flat_map(|s| (1..=3).map(move |t| RuleId::consent(s, t))).collect()
}

/// One cell per solver dispatched by [`select_solver`].
pub fn poly_cells() -> Vec<PolyCell> {
    use Kind::*;
    use Objective::*;
    let cell = |solver, rules, kinds, objectives, priced, max_n, max_budget, optimal| PolyCell {
        solver,
        rules,
        kinds,
        objectives,
        priced,
        max_n,
        max_budget,
        optimal,
    };
    let control = vec![DeleteIndividuals, RelaxedDeleteIndividuals];
    let mut easy_rules = consent_rules(3);
    easy_rules.extend([RuleId::Lsr, RuleId::Csr]);
    vec![
        cell("solve_consent_s1_rdgcdi", consent_rules(1), vec![RelaxedDeleteIndividuals], vec![Destructive], vec![false], 6, 6, true),
        cell("solve_consent_easy_cases", easy_rules, control.clone(), Objective::ALL.to_vec(), vec![false], 6, 6, false),
        cell("solve_lsr_rdgcdi", vec![RuleId::Lsr], vec![RelaxedDeleteIndividuals], vec![Destructive], vec![false], 6, 6, true),
        cell("solve_csr_dgcdi_corrected", vec![RuleId::Csr], vec![DeleteIndividuals], vec![Destructive], vec![false], 6, 6, false),
        cell("solve_csr_rdgcdi", vec![RuleId::Csr], vec![RelaxedDeleteIndividuals], vec![Destructive], vec![false], 6, 1, false),
        cell("solve_csr_regcdi", vec![RuleId::Csr], vec![RelaxedDeleteIndividuals], vec![Exact], vec![false], 6, 6, true),
        cell("solve_2ic_cgcdi", vec![RuleId::TwoIc], control.clone(), vec![Constructive], vec![false], 6, 6, true),
        cell("solve_2lic_cgcdi", vec![RuleId::TwoLic], control, vec![Constructive], vec![false], 6, 6, true),
        cell("solve_ic_2ic_dgb_priced", vec![RuleId::Ic, RuleId::TwoIc], vec![Bribery], vec![Destructive], vec![true, false], 5, 3, true),
        cell("solve_2ic_cgb_priced", vec![RuleId::TwoIc], vec![Bribery], vec![Constructive], vec![true], 5, 3, true),
        cell("solve_2lic_cgb_priced", vec![RuleId::TwoLic], vec![Bribery], vec![Constructive], vec![true], 5, 3, true),
        cell("solve_2ic_gb_unpriced", vec![RuleId::TwoIc], vec![Bribery], Objective::ALL.to_vec(), vec![false], 5, 3, true),
        cell("solve_2lic_gb_unpriced", vec![RuleId::TwoLic], vec![Bribery], Objective::ALL.to_vec(), vec![false], 5, 3, true),
        cell("solve_2ic_cgmb", vec![RuleId::TwoIc], vec![Microbribery], vec![Constructive], vec![false], 5, 4, true),
        cell("solve_2lic_cgmb", vec![RuleId::TwoLic], vec![Microbribery], vec![Constructive], vec![false], 5, 4, true),
    ]
}

/// Draws instances from `cell` with sizes up to `max_n` until the
/// dispatcher hands one to `dispatched` (at most `attempts` draws).
fn draw_for_cell(
    cell: &PolyCell,
    dispatched: &str,
    n_range: (usize, usize),
    max_budget: Option<u64>,
    seed: u64,
    trial: u64,
    attempts: u64,
) -> Option<(u64, AttackInstance)> {
    for a in 0..attempts {
        let s = derive_seed(seed, trial, a);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let rule = cell.rules[rng.gen_range(0..cell.rules.len())];
        let kind = cell.kinds[rng.gen_range(0..cell.kinds.len())];
        let objective = cell.objectives[rng.gen_range(0..cell.objectives.len())];
        let priced = cell.priced[rng.gen_range(0..cell.priced.len())];
        let n = rng.gen_range(n_range.0..=n_range.1);
        let density = [0.3, 0.5, 0.7, 0.85][rng.gen_range(0..4)];
        let opts = RandomOptions { priced, max_price: 3, max_budget };
        let inst = random_instance_with(s, n, rule, kind, objective, density, &opts);
        if inst.validate().is_err() {
            continue;
        }
        if matches!(select_solver(&inst), Ok((name, _)) if name == dispatched) {
            return Some((s, inst));
        }
    }
    None
}

fn poly_vs_oracle(seed: u64, trials: u64, caps: &Caps) -> Vec<TrialRecord> {
    let cells = poly_cells();
    let trials = if trials == 0 { 500 * cells.len() as u64 } else { trials };
    let ids: Vec<u64> = (0..trials).collect();
    par_map(&ids, |&trial| {
        let cell = &cells[(trial % cells.len() as u64) as usize];
        let mut rec = TrialRecord::new(trial, cell.solver);
        let Some((s, inst)) =
            draw_for_cell(cell, cell.solver, (1, cell.max_n), Some(cell.max_budget), seed, trial, 100_000)
        else {
            rec.status = TrialStatus::Skipped;
            rec.detail = Some("no random instance reached the solver".into());
            return rec;
        };
        rec.seed = Some(s);
        let solver = solver_by_name(cell.solver).expect("cell names a known solver");
        let (poly, t_poly) = timed(|| solver(&inst));
        rec.timings.push((cell.solver.to_string(), t_poly));
        let (oracle, t_oracle) = timed(|| brute_force(&inst, &caps.limits));
        rec.timings.push(("brute_force".into(), t_oracle));
        compare(&mut rec, &inst, poly.map(|r| r.verdict), oracle, cell.solver, cell.optimal);
        rec.instance = Some(inst);
        rec
    })
}

/// Fills `rec` from a solver verdict and an oracle verdict.
fn compare(
    rec: &mut TrialRecord,
    inst: &AttackInstance,
    poly: Result<Verdict>,
    oracle: Result<Verdict>,
    name: &str,
    optimal: bool,
) {
    let poly = match poly {
        Ok(v) => v,
        Err(e) => return rec.fail(format!("{name} failed: {e}")),
    };
    rec.left = Some(Side { name: name.to_string(), verdict: poly.clone() });
    let oracle = match oracle {
        Ok(v) => v,
        Err(Error::CapExceeded(why)) => return rec.cap(why),
        Err(e) => return rec.fail(format!("oracle failed: {e}")),
    };
    rec.right = Some(Side { name: "brute_force".into(), verdict: oracle.clone() });
    if poly.answer != oracle.answer {
        return rec.fail(format!("{name} answers {}, the oracle {}", poly.answer, oracle.answer));
    }
    for side in [&poly, &oracle] {
        if let Some(w) = &side.witness {
            match verify_solution(inst, w) {
                Ok(v) if v.is_valid() => {}
                other => return rec.fail(format!("{} witness does not verify: {other:?}", side.certifier)),
            }
        }
    }
    if optimal && poly.is_yes() && poly.cost != oracle.cost {
        rec.fail(format!("{name} cost {} but the oracle finds {}", poly.cost, oracle.cost));
    }
}

/// A cell of the immunity tables with its claimed status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ImmunityCell {
    pub rule: RuleId,
    pub kind: Kind,
    pub objective: Objective,
    pub immune: bool,
}

impl ImmunityCell {
    /// E.g. `consent(1,1) R-CGCDI`.
    pub fn name(&self) -> String {
        let relaxed = if self.kind == Kind::RelaxedDeleteIndividuals { "R-" } else { "" };
        let letter = match self.objective {
            Objective::Constructive => "C",
            Objective::Destructive => "D",
            Objective::Exact => "E",
            Objective::General => "",
        };
        format!("{} {relaxed}{letter}GCDI", self.rule)
    }
}

/// The immune deletion cells, and the susceptible but hard cells probed for
/// witnesses. Open-ended parameters are sampled at `s, t <= 3`.
pub fn immunity_cells() -> Vec<ImmunityCell> {
    use Kind::*;
    use Objective::*;
    let c = RuleId::consent;
    let mut out = Vec::new();
    let mut add = |rules: &[RuleId], kind, objective, immune| {
        for &rule in rules {
            out.push(ImmunityCell { rule, kind, objective, immune });
        }
    };
    let t1 = [c(1, 1), c(2, 1), c(3, 1), RuleId::Lsr];
    add(&t1, DeleteIndividuals, Constructive, true);
    add(&[c(1, 1), c(1, 2), c(1, 3)], DeleteIndividuals, Destructive, true);
    add(&[c(1, 1), c(1, 2), c(1, 3), c(2, 1), c(3, 1), RuleId::Csr, RuleId::Lsr], DeleteIndividuals, General, true);
    add(&t1, RelaxedDeleteIndividuals, Constructive, true);
    add(&t1, RelaxedDeleteIndividuals, Exact, true);
    add(&t1, RelaxedDeleteIndividuals, General, true);
    add(&[RuleId::Csr], RelaxedDeleteIndividuals, General, false);
    add(&[c(2, 2), c(3, 2)], RelaxedDeleteIndividuals, Destructive, false);
    out
}

fn immunity(seed: u64, trials: u64, caps: &Caps) -> Vec<TrialRecord> {
    let cells = immunity_cells();
    let ids: Vec<u64> = (0..cells.len() as u64).collect();
    par_map(&ids, |&trial| {
        let cell = cells[trial as usize];
        let mut rec = TrialRecord::new(trial, cell.name());
        let mut samplers = vec![Sampler::Exhaustive { max_n: 3 }];
        let random = if cell.immune { trials } else { trials.max(500) };
        if random > 0 {
            let s = derive_seed(seed, trial, 0);
            rec.seed = Some(s);
            samplers.push(Sampler::Random { seed: s, min_n: 4, max_n: 5 });
        }
        let start = Instant::now();
        let mut examined = 0;
        let mut witness = None;
        for sampler in &samplers {
            match immunity_check(cell.rule, cell.kind, cell.objective, sampler, random, &caps.limits) {
                Ok(ImmunityOutcome::NoWitnessFound { trials }) => examined += trials,
                Ok(ImmunityOutcome::SusceptibilityWitness { instance, solution }) => {
                    witness = Some((instance, solution));
                    break;
                }
                Err(e) => {
                    rec.cap(e.to_string());
                    return rec;
                }
            }
        }
        rec.timings.push(("immunity_check".into(), start.elapsed()));
        match (witness, cell.immune) {
            (None, true) => rec.detail = Some(format!("no witness among {examined} instances")),
            (None, false) => rec.fail(format!("claimed susceptible, but no witness among {examined} instances")),
            (Some((inst, sol)), immune) => {
                let cost = solution_cost(&inst, &sol);
                rec.right = Some(Side { name: "immunity_check".into(), verdict: Verdict::yes(sol, cost, "brute_force") });
                if immune {
                    rec.fail("claimed immune, but a susceptibility witness exists");
                } else {
                    rec.detail = Some("susceptibility witness found".into());
                }
                rec.instance = Some(*inst);
            }
        }
        rec
    })
}

/// Theorems whose construction admits attacks that do not come
/// from source certificates; their round trips are expected to disagree.
pub const KNOWN_UNSOUND: [Theorem; 2] = [Theorem::IcCgb, Theorem::IcGb];

/// A unit of reduction work: one source, or a tally of corpus sources left
/// out of a sampled run.
enum RoundTrip {
    One(Theorem, SourceProblem),
    Omitted { theorem: Theorem, over_cap: usize, invalid: usize, corpus: usize, forward_failures: Vec<String> },
}

fn reduction_roundtrip(seed: u64, trials: u64, caps: &Caps) -> Vec<TrialRecord> {
    let mut work = Vec::new();
    for (ti, th) in Theorem::ALL.into_iter().enumerate() {
        let corpus = source_corpus(th.source_kind());
        if trials == 0 {
            work.extend(corpus.into_iter().map(|src| RoundTrip::One(th, src)));
            continue;
        }
        // Sample among the sources the oracle can decide; count the rest.
        let (mut over_cap, mut invalid) = (0, 0);
        let mut feasible = Vec::new();
        let mut forward_failures = Vec::new();
        for (i, src) in corpus.iter().enumerate() {
            match build_reduction_for(th, src, None) {
                Ok(out) if oracle_effort(&out.instance, &caps.limits) <= caps.max_effort => feasible.push(i),
                Ok(out) => {
                    over_cap += 1;
                    if let Some(why) = forward_failure(&out) {
                        forward_failures.push(format!("{src:?}: {why}"));
                    }
                }
                Err(_) => invalid += 1,
            }
        }
        let mut picked = if trials as usize >= feasible.len() {
            feasible
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, ti as u64, 0));
            sample(&mut rng, feasible.len(), trials as usize).into_iter().map(|k| feasible[k]).collect()
        };
        picked.sort_unstable();
        let total = corpus.len();
        work.extend(picked.into_iter().map(|i| RoundTrip::One(th, corpus[i].clone())));
        if over_cap + invalid > 0 {
            work.push(RoundTrip::Omitted { theorem: th, over_cap, invalid, corpus: total, forward_failures });
        }
    }
    let ids: Vec<usize> = (0..work.len()).collect();
    par_map(&ids, |&i| match &work[i] {
        RoundTrip::One(th, src) => roundtrip_one(i as u64, *th, src, caps),
        RoundTrip::Omitted { theorem, over_cap, invalid, corpus, forward_failures } => {
            let mut rec = TrialRecord::new(i as u64, theorem.id());
            rec.status = if *over_cap > 0 { TrialStatus::Capped } else { TrialStatus::Skipped };
            rec.detail = Some(format!(
                "not sampled: {over_cap} of {corpus} corpus sources exceed the oracle effort cap \
                 (their forward maps were checked), {invalid} violate preconditions"
            ));
            if !forward_failures.is_empty() {
                rec.fail(format!("forward maps fail on unsampled sources: {}", forward_failures.join("; ")));
            }
            rec
        }
    })
}

/// Why the forward map fails on `out`, if it does: the certificate of a
/// YES source must map to a verifying attack.
fn forward_failure(out: &crate::reductions::ReductionOutput) -> Option<String> {
    let cert = solve_source(&out.source)?;
    match out.forward(&cert) {
        Ok(sol) => match verify_solution(&out.instance, &sol) {
            Ok(v) if v.is_valid() => None,
            other => Some(format!("forward-mapped certificate does not verify: {other:?}")),
        },
        Err(e) => Some(format!("forward map failed: {e}")),
    }
}

/// Builds `theorem` on `src` and checks it against the source solver and the oracle.
pub fn roundtrip_one(trial: u64, theorem: Theorem, src: &SourceProblem, caps: &Caps) -> TrialRecord {
    let mut rec = TrialRecord::new(trial, theorem.id());
    rec.source = Some(src.clone());
    let out = match build_reduction_for(theorem, src, None) {
        Ok(o) => o,
        Err(e) => {
            rec.status = TrialStatus::Skipped;
            rec.detail = Some(e.to_string());
            return rec;
        }
    };
    let inst = &out.instance;
    let (cert, t_src) = timed(|| solve_source(src));
    rec.timings.push(("solve_source".into(), t_src));
    let left = match &cert {
        Some(c) => match out.forward(c) {
            Ok(sol) => {
                let cost = solution_cost(inst, &sol);
                if !verify_solution(inst, &sol).is_ok_and(|v| v.is_valid()) {
                    rec.fail("forward-mapped certificate does not verify");
                }
                Verdict::yes(sol, cost, "forward")
            }
            Err(e) => {
                rec.fail(format!("forward map failed: {e}"));
                Verdict::no("forward")
            }
        },
        None => Verdict::no("solve_source"),
    };
    rec.left = Some(Side { name: "source".into(), verdict: left });
    rec.instance = Some(inst.clone());
    if rec.status == TrialStatus::Disagree {
        return rec;
    }
    let effort = oracle_effort(inst, &caps.limits);
    if effort > caps.max_effort {
        rec.cap(format!("estimated oracle effort {effort} exceeds {}", caps.max_effort));
        return rec;
    }
    let (oracle, t_oracle) = timed(|| brute_force(inst, &caps.limits));
    rec.timings.push(("brute_force".into(), t_oracle));
    let oracle = match oracle {
        Ok(v) => v,
        Err(Error::CapExceeded(why)) => {
            rec.cap(why);
            return rec;
        }
        Err(e) => {
            rec.fail(format!("oracle failed: {e}"));
            return rec;
        }
    };
    rec.right = Some(Side { name: "brute_force".into(), verdict: oracle.clone() });
    if oracle.is_yes() != cert.is_some() {
        rec.fail(format!(
            "source answers {}, the oracle {}",
            if cert.is_some() { "YES" } else { "NO" },
            oracle.answer
        ));
    } else if let Some(w) = &oracle.witness {
        if let Err(e) = out.backward(w) {
            rec.fail(format!("backward map failed: {e}"));
        }
    }
    rec
}

/// One labelled-set check of a worked example.
fn set_check(trial: u64, subject: &str, got: Vec<usize>, expected: &[usize]) -> TrialRecord {
    let mut rec = TrialRecord::new(trial, subject);
    rec.detail = Some(format!("expected {expected:?}, got {got:?}"));
    if got != expected {
        rec.status = TrialStatus::Disagree;
    }
    rec
}

fn fixtures() -> Vec<TrialRecord> {
    let mut out = Vec::new();
    let soc = society_from_json(EX1_JSON).expect("bundled fixture ex1 parses");
    let all = soc.everyone();
    let mut primed = soc.clone();
    primed.set(0, 0, false);
    primed.set(1, 1, false);
    let ex1: [(&str, RuleId, &_, &[usize]); 8] = [
        ("ex1 consent(1,1)", RuleId::consent(1, 1), &soc, &[0, 1, 3, 4, 5]),
        ("ex1 consent(3,4)", RuleId::consent(3, 4), &soc, &[0, 1, 2, 3]),
        ("ex1 lsr", RuleId::Lsr, &soc, &[0, 1, 2, 3, 4, 5]),
        ("ex1 csr", RuleId::Csr, &soc, &[0, 1, 2, 3, 4]),
        ("ex1 ic", RuleId::Ic, &soc, &[0, 1, 3, 4]),
        ("ex1 2ic", RuleId::TwoIc, &soc, &[0, 1, 3]),
        ("ex1 2lic", RuleId::TwoLic, &soc, &[0, 1, 3]),
        ("ex1' 2lic", RuleId::TwoLic, &primed, &[3, 4, 5]),
    ];
    for (subject, rule, s, expected) in ex1 {
        out.push(set_check(out.len() as u64, subject, evaluate(rule, &all, s), expected));
    }

    let ex2 = instance_from_json(EX2_JSON).expect("bundled fixture ex2 parses");
    for budget in [2u64, 1] {
        let mut inst = ex2.clone();
        inst.budget = budget;
        let naive = solve_csr_dgcdi_naive_ery20(&inst).map(|r| r.verdict);
        let corrected = solve_csr_dgcdi_corrected(&inst).map(|r| r.verdict);
        let oracle = brute_force(&inst, &OracleLimits::default());
        let expect_yes = budget == 2;

        let mut rec = TrialRecord::new(out.len() as u64, format!("ex2 budget {budget} naive"));
        match &naive {
            Ok(v) if !v.is_yes() => rec.detail = Some("NO, as the naive loop answers".into()),
            other => rec.fail(format!("expected NO, got {other:?}")),
        }
        rec.left = naive.ok().map(|verdict| Side { name: "solve_csr_dgcdi_naive_ery20".into(), verdict });
        out.push(rec);

        let mut rec = TrialRecord::new(out.len() as u64, format!("ex2 budget {budget} corrected"));
        compare(&mut rec, &inst, corrected, oracle, "solve_csr_dgcdi_corrected", false);
        let answer = rec.left.as_ref().map(|s| s.verdict.clone());
        if rec.status == TrialStatus::Agree {
            match answer {
                Some(v) if v.is_yes() != expect_yes => rec.fail(format!("expected {}", if expect_yes { "YES" } else { "NO" })),
                Some(v) if expect_yes && v.cost != 2 => rec.fail(format!("expected cost 2, got {}", v.cost)),
                _ => {}
            }
        }
        out.push(rec);
    }

    let mut rec = TrialRecord::new(out.len() as u64, "ex2 witness");
    let witness = crate::model::Solution::DeleteSet(vec![3, 4]);
    match verify_solution(&ex2, &witness) {
        Ok(v) if v.is_valid() && solution_cost(&ex2, &witness) == 2 => rec.detail = Some("Valid, cost 2".into()),
        other => rec.fail(format!("deleting a4 and a5 should work: {other:?}")),
    }
    out.push(rec);
    out
}

/// One row of [`bench_scaling`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchPoint {
    pub n: usize,
    /// Seed of the benchmarked instance.
    pub seed: u64,
    pub runs: usize,
    pub median: Duration,
}

/// Runs per size in [`bench_scaling`].
pub const BENCH_RUNS: usize = 5;

/// Wall time of `solver` on one seeded instance per size, median of
/// [`BENCH_RUNS`] runs. Raw measurements only; nothing is asserted.
pub fn bench_scaling(solver: &str, sizes: &[usize], seed: u64) -> Result<Vec<BenchPoint>> {
    let f = solver_by_name(solver).ok_or_else(|| Error::Usage(format!("unknown polynomial solver `{solver}`")))?;
    let mut out = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let (s, inst) = bench_instance(solver, n, derive_seed(seed, i as u64, 0))?;
        let mut times = Vec::with_capacity(BENCH_RUNS);
        for _ in 0..BENCH_RUNS {
            let (r, d) = timed(|| f(&inst));
            r?;
            times.push(d);
        }
        times.sort();
        out.push(BenchPoint { n, seed: s, runs: BENCH_RUNS, median: times[BENCH_RUNS / 2] });
    }
    Ok(out)
}

/// A seeded random instance with `n` individuals that `solver` handles,
/// together with the seed that generated it.
pub fn bench_instance(solver: &str, n: usize, seed: u64) -> Result<(u64, AttackInstance)> {
    if solver_by_name(solver).is_none() {
        return Err(Error::Usage(format!("unknown polynomial solver `{solver}`")));
    }
    if n == 0 {
        return Err(Error::Usage("sizes must be positive".into()));
    }
    // The naive CSR loop runs on the corrected solver's cell.
    let dispatched = if solver == "solve_csr_dgcdi_naive_ery20" { "solve_csr_dgcdi_corrected" } else { solver };
    let cell = poly_cells()
        .into_iter()
        .find(|c| c.solver == dispatched)
        .expect("every registered solver has a cell");
    draw_for_cell(&cell, dispatched, (n, n), None, seed, 0, 10_000)
        .ok_or_else(|| Error::Precondition(format!("no random instance of size {n} reaches {solver}")))
}

/// The witness of a record's right side as JSON, if any.
pub fn right_witness(rec: &TrialRecord) -> Option<Value> {
    rec.right.as_ref().and_then(|s| s.verdict.witness.as_ref()).map(solution_to_value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_pass() {
        let r = run_crosscheck(Suite::Fixtures, 0, 0, &Caps::for_suite(Suite::Fixtures));
        assert!(r.passed(), "{}", r.to_ndjson(false));
        assert_eq!(r.records.len(), 13);
    }

    #[test]
    fn poly_vs_oracle_is_deterministic() {
        let caps = Caps::for_suite(Suite::PolyVsOracle);
        let a = run_crosscheck(Suite::PolyVsOracle, 7, 60, &caps);
        let b = run_crosscheck(Suite::PolyVsOracle, 7, 60, &caps);
        assert!(a.passed());
        assert_eq!(a.to_ndjson(false), b.to_ndjson(false));
        assert_eq!(a.records.len(), 60);
    }

    #[test]
    fn empty_sizes_give_empty_table() {
        assert!(bench_scaling("solve_lsr_rdgcdi", &[], 1).unwrap().is_empty());
        assert!(bench_scaling("no_such_solver", &[5], 1).is_err());
    }

    #[test]
    fn bench_table_follows_sizes() {
        let t = bench_scaling("solve_lsr_rdgcdi", &[8, 16], 3).unwrap();
        assert_eq!(t.iter().map(|p| p.n).collect::<Vec<_>>(), vec![8, 16]);
        assert!(t.iter().all(|p| p.runs >= 5));
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::parse(s.name()).unwrap(), s);
        }
        assert!(Suite::parse("nope").is_err());
    }
}
