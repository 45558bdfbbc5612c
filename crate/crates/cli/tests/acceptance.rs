//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Expected values come from the worked examples, from exhaustive oracles,
//! or are recomputed here from first principles (degrees, lcm, family
//! sizes) rather than read back from the generators.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use groupid::harness::{poly_cells, run_crosscheck, Caps, Suite, KNOWN_UNSOUND};
use groupid::json::{instance_from_json, society_from_json};
use groupid::poly::{solve_csr_dgcdi_corrected, solve_csr_dgcdi_naive_ery20};
use groupid::reductions::{build_reduction, source_corpus, SourceProblem};
use groupid::{brute_force, evaluate, verify_solution, OracleLimits, RuleId};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).expect("fixture exists")
}

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn ensure(cond: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why())
    }
}

fn worked_example() -> Outcome {
    let start = Instant::now();
    let soc = society_from_json(&read("ex1.json")).map_err(|e| e.to_string())?;
    let all = soc.everyone();
    let mut primed = soc.clone();
    primed.set(0, 0, false);
    primed.set(1, 1, false);
    let checks: [(RuleId, &_, Vec<usize>); 7] = [
        (RuleId::consent(1, 1), &soc, vec![0, 1, 3, 4, 5]),
        (RuleId::consent(3, 4), &soc, vec![0, 1, 2, 3]),
        (RuleId::Lsr, &soc, vec![0, 1, 2, 3, 4, 5]),
        (RuleId::Csr, &soc, vec![0, 1, 2, 3, 4]),
        (RuleId::Ic, &soc, vec![0, 1, 3, 4]),
        (RuleId::TwoIc, &soc, vec![0, 1, 3]),
        (RuleId::TwoLic, &primed, vec![3, 4, 5]),
    ];
    for (rule, s, expected) in &checks {
        let got = evaluate(*rule, &all, s);
        ensure(&got == expected, || format!("{rule}: expected {expected:?}, got {got:?}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed.as_secs_f64() < 1.0, || format!("took {elapsed:?}"))?;
    Ok(format!("7 rule evaluations exact in {elapsed:?}"))
}

fn counterexample() -> Outcome {
    let start = Instant::now();
    let base = instance_from_json(&read("ex2.json")).map_err(|e| e.to_string())?;
    ensure(base.aminus == vec![5], || "A- should be {a6}".into())?;
    let limits = OracleLimits::default();
    for budget in [2u64, 1] {
        let mut inst = base.clone();
        inst.budget = budget;
        let naive = solve_csr_dgcdi_naive_ery20(&inst).map_err(|e| e.to_string())?.verdict;
        let fixed = solve_csr_dgcdi_corrected(&inst).map_err(|e| e.to_string())?.verdict;
        let oracle = brute_force(&inst, &limits).map_err(|e| e.to_string())?;
        ensure(!naive.is_yes(), || format!("budget {budget}: naive loop answers YES"))?;
        if budget == 2 {
            ensure(fixed.is_yes() && oracle.is_yes(), || "budget 2: corrected loop or oracle answers NO".into())?;
            let w = fixed.witness.as_ref().unwrap();
            let v = verify_solution(&inst, w).map_err(|e| e.to_string())?;
            ensure(v.is_valid() && fixed.cost == 2 && w.size() == 2, || format!("witness {w:?}: {v:?}"))?;
        } else {
            ensure(!fixed.is_yes() && !oracle.is_yes(), || "budget 1 should be NO".into())?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed.as_secs_f64() < 1.0, || format!("took {elapsed:?}"))?;
    Ok(format!("naive NO / corrected YES at budget 2, all NO at budget 1, in {elapsed:?}"))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let solvers: Vec<&str> = poly_cells().iter().map(|c| c.solver).collect();
    let trials = 520 * solvers.len() as u64;
    let report = run_crosscheck(Suite::PolyVsOracle, 42, trials, &Caps::for_suite(Suite::PolyVsOracle));
    if let Some(d) = report.disagreements().first() {
        return Err(format!("{} disagreement(s), first: {}", report.disagreements().len(), d.to_value()));
    }
    let tallies = report.by_subject();
    for name in &solvers {
        let agree = tallies.get(*name).map_or(0, |t| t.agree);
        ensure(agree >= 500, || format!("{name}: only {agree} decided instances"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed.as_secs() < 600, || format!("took {elapsed:?}"))?;
    Ok(format!("{} solvers x >= 500 instances, zero disagreements, in {elapsed:?}", solvers.len()))
}

fn immunity() -> Outcome {
    let report = run_crosscheck(Suite::Immunity, 42, 0, &Caps::for_suite(Suite::Immunity));
    if !report.passed() {
        let names: Vec<&str> = report.disagreements().iter().map(|r| r.subject.as_str()).collect();
        return Err(format!("cells contradict the tables: {names:?}"));
    }
    Ok(format!("{} cells swept exhaustively at n <= 3, all as claimed", report.records.len()))
}

fn reduction_soundness() -> Outcome {
    let start = Instant::now();
    let report = run_crosscheck(Suite::ReductionRoundtrip, 42, 100, &Caps::for_suite(Suite::ReductionRoundtrip));
    let tallies = report.by_subject();
    let decided: u64 = tallies.values().map(|t| t.agree + t.disagree).sum();
    let failing: BTreeSet<String> = report.disagreements().iter().map(|r| r.subject.clone()).collect();
    let expected: BTreeSet<String> = KNOWN_UNSOUND.iter().map(|t| t.id().to_string()).collect();
    for (subject, t) in &tallies {
        if t.agree + t.disagree == 0 {
            return Err(format!("{subject}: no source decided within the caps"));
        }
    }

    // One variable, one clause: exactly three flips are needed.
    let src = SourceProblem::CnfSat { variables: 1, clauses: vec![vec![1]] };
    let out = build_reduction("T-GMB-PROT", &src).map_err(|e| e.to_string())?;
    let limits = OracleLimits::generous();
    let at = |budget: u64| {
        let mut inst = out.instance.clone();
        inst.budget = budget;
        brute_force(&inst, &limits).map(|v| v.is_yes()).map_err(|e| e.to_string())
    };
    ensure(at(3)? && !at(2)?, || "T-GMB-PROT at m = 1 should be YES at 3 and NO at 2".into())?;

    let elapsed = start.elapsed();
    if failing.is_empty() {
        return Ok(format!("{decided} round trips agree, in {elapsed:?}"));
    }
    let summary: Vec<String> = failing
        .iter()
        .map(|s| {
            let t = &tallies[s];
            format!("{s} ({} of {} decided sources disagree)", t.disagree, t.agree + t.disagree)
        })
        .collect();
    let sound: u64 = tallies.iter().filter(|(s, _)| !failing.contains(*s)).map(|(_, t)| t.agree).sum();
    let message = format!(
        "constructions unsound: {}; the other {} theorems agree on all {sound} decided round trips",
        summary.join(", "),
        tallies.len() - failing.len()
    );
    if failing == expected {
        // These constructions admit a one-bribe attack that no
        // cover induces; this failure is reported, not hidden.
        Err(format!("{message} [expected]"))
    } else {
        panic!("unexpected reduction failures: {message}")
    }
}

/// `D = lcm` of the degrees after isolated vertices are dropped.
fn independent_set_budget(vertices: usize, edges: &[[usize; 2]], k: usize) -> Option<u64> {
    let mut degree = vec![0u64; vertices];
    for e in edges {
        degree[e[0]] += 1;
        degree[e[1]] += 1;
    }
    let kept: Vec<u64> = degree.iter().copied().filter(|&d| d > 0).collect();
    if kept.is_empty() {
        return None;
    }
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    let d = kept.iter().fold(1, |acc, &x| acc / gcd(acc, x) * x);
    let isolated = vertices - kept.len();
    let k = k.saturating_sub(isolated) as u64;
    Some(kept.len() as u64 * (d + 1) - k)
}

fn structural() -> Outcome {
    let mut checked = 0;
    for src in source_corpus("set-cover") {
        let SourceProblem::SetCover { universe, family, k } = &src else { unreachable!() };
        // A trailing empty set is ensured and k kept below |F|.
        let f = family.len() + usize::from(!family.iter().any(Vec::is_empty));
        let k = (*k).min(f - 1);
        let out = build_reduction("T-IC-CGB", &src).map_err(|e| e.to_string())?;
        let n = universe + (k + 1) * f + (k + 1);
        ensure(out.instance.n() == n, || format!("T-IC-CGB {src:?}: |N| = {}, expected {n}", out.instance.n()))?;
        checked += 1;
    }
    for src in source_corpus("independent-set") {
        let SourceProblem::IndependentSet { vertices, edges, k } = &src else { unreachable!() };
        match (independent_set_budget(*vertices, edges, *k), build_reduction("T-2IC-CGMB", &src)) {
            (None, Err(_)) => {}
            (Some(budget), Ok(out)) => {
                ensure(out.instance.budget == budget, || {
                    format!("T-2IC-CGMB {src:?}: budget {}, expected {budget}", out.instance.budget)
                })?;
                checked += 1;
            }
            (want, got) => return Err(format!("T-2IC-CGMB {src:?}: expected {want:?}, got {:?}", got.map(|_| ()))),
        }
    }
    let gmb = build_reduction("T-GMB-PROT", &SourceProblem::CnfSat { variables: 1, clauses: vec![vec![1]] })
        .map_err(|e| e.to_string())?;
    ensure(gmb.instance.n() == 8, || format!("T-GMB-PROT: n = {}", gmb.instance.n()))?;
    let sc = SourceProblem::SetCover { universe: 2, family: vec![vec![0], vec![1]], k: 2 };
    let add = build_reduction("T-IC-DGCAI", &sc).map_err(|e| e.to_string())?;
    let i = &add.instance;
    ensure(i.n() == 4 && i.aminus == vec![0, 1] && i.initial == Some(vec![0, 1]) && i.budget == 2, || {
        format!("T-IC-DGCAI: n {}, A- {:?}, T {:?}, budget {}", i.n(), i.aminus, i.initial, i.budget)
    })?;
    Ok(format!("{} generated instances match their formulas", checked + 2))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_groupid");
    let dir = std::env::temp_dir().join(format!("groupid-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let source = dir.join("setcover.json");
    std::fs::write(&source, r#"{"problem": "set-cover", "universe": 3, "family": [[0, 1], [1, 2], [2]], "k": 2}"#)
        .map_err(|e| e.to_string())?;
    let ex1 = fixture("ex1.json");
    let ex2 = fixture("ex2.json");
    let witness = fixture("ex2_witness.json");
    let (ex1, ex2, witness, source) =
        (ex1.to_str().unwrap(), ex2.to_str().unwrap(), witness.to_str().unwrap(), source.to_str().unwrap());
    let runs: Vec<Vec<&str>> = vec![
        vec!["eval", "--rule", "csr", "--in", ex1],
        vec!["eval", "--rule", "2ic", "--in", ex1, "--format", "json"],
        vec!["trace", "--rule", "ic", "--in", ex1, "--format", "json"],
        vec!["solve", "--in", ex2, "--format", "json"],
        vec!["solve", "--algo", "brute", "--in", ex2],
        vec!["verify", "--in", ex2, "--solution", witness],
        vec!["reduce", "--theorem", "T-IC-DGCAI", "--in", source, "--format", "json"],
        vec!["immunity", "--rule", "csr", "--kind", "relaxed-delete-individuals", "--objective", "general", "--format", "json"],
        vec!["gen", "--n", "5", "--rule", "2lic", "--kind", "bribery", "--objective", "general", "--seed", "9", "--format", "json"],
        vec!["crosscheck", "--suite", "fixtures", "--format", "json"],
        vec!["crosscheck", "--suite", "poly-vs-oracle", "--trials", "60", "--seed", "5", "--format", "json"],
    ];
    let expected_first = "{a1,a2,a3,a4,a5}\n";
    for args in &runs {
        let once = || Command::new(bin).args(args).output().map_err(|e| e.to_string());
        let (a, b) = (once()?, once()?);
        ensure(a.status.success(), || format!("{args:?} exited with {}", a.status))?;
        ensure(a.stdout == b.stdout && a.stderr == b.stderr && a.status == b.status, || {
            format!("{args:?} differs between runs")
        })?;
        if args[0] == "eval" && args[2] == "csr" {
            ensure(a.stdout == expected_first.as_bytes(), || {
                format!("eval csr printed {}", String::from_utf8_lossy(&a.stdout))
            })?;
        }
        if args[0] == "verify" {
            ensure(a.stdout == b"Valid, cost 2\n", || format!("verify printed {}", String::from_utf8_lossy(&a.stdout)))?;
        }
    }
    let gen = Command::new(bin)
        .args(["gen", "--n", "4", "--rule", "ic", "--kind", "bribery", "--objective", "constructive", "--seed", "3"])
        .args(["--format", "json", "--out", dir.join("hard.json").to_str().unwrap()])
        .status()
        .map_err(|e| e.to_string())?;
    ensure(gen.success(), || "gen failed".into())?;
    let poly = Command::new(bin)
        .args(["solve", "--algo", "poly", "--in", dir.join("hard.json").to_str().unwrap()])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(
        poly.status.code() == Some(2) && String::from_utf8_lossy(&poly.stderr).contains("no polynomial algorithm known"),
        || format!("solve --algo poly on an NP-hard cell: {:?}", poly.status),
    )?;
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} invocations byte-identical across two runs", runs.len()))
}

fn main() {
    let criteria: [(&str, Check); 7] = [
        ("1 worked example", worked_example),
        ("2 counterexample", counterexample),
        ("3 oracle equivalence", oracle_equivalence),
        ("4 immunity", immunity),
        ("5 reduction soundness", reduction_soundness),
        ("6 structural conformance", structural),
        ("7 determinism", determinism),
    ];
    let mut unexpected = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(msg) => println!("criterion {name}: PASS - {msg}"),
            Err(msg) => {
                println!("criterion {name}: FAIL - {msg}");
                if !msg.ends_with("[expected]") {
                    unexpected.push(name);
                }
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
