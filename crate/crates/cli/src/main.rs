use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use groupid::harness::{bench_scaling, run_crosscheck, Caps, Suite};
use groupid::json::{
    instance_from_json, instance_to_json, instance_to_value, pretty, society_from_json, solution_from_json,
    solution_to_value, trace_to_value, verdict_to_value,
};
use groupid::reductions::build_reduction_for;
use groupid::{
    brute_force, evaluate, immunity_check, random_instance_with, select_solver, trace, verify_solution,
    AttackInstance, Error, ImmunityOutcome, Kind, Objective, OracleLimits, RandomOptions, RuleId, Sampler,
    Society, Solution, SourceProblem, Theorem, Validity, Verdict,
};

#[derive(Parser, Debug)]
#[command(name = "groupid", version, about = "Group Identification: rules, attacks, solvers and reductions")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Input file (instance, profile or source problem).
    #[arg(long = "in", global = true)]
    input: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Auto,
    Poly,
    Brute,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Socially qualified individuals under a rule.
    Eval {
        #[arg(long)]
        rule: String,
        /// Participants (comma-separated indices); everyone by default.
        #[arg(long, value_delimiter = ',')]
        participants: Option<Vec<usize>>,
    },
    /// Stage-by-stage evaluation of a rule.
    Trace {
        #[arg(long)]
        rule: String,
        #[arg(long, value_delimiter = ',')]
        participants: Option<Vec<usize>>,
    },
    /// Decides an attack instance.
    Solve {
        #[arg(long, value_enum, default_value_t = Algo::Auto)]
        algo: Algo,
    },
    /// Checks a proposed attack against an instance.
    Verify {
        #[arg(long)]
        solution: String,
    },
    /// Generates the attack instance of a hardness reduction.
    Reduce {
        #[arg(long)]
        theorem: String,
        /// Rule to build for; the theorem's default when absent.
        #[arg(long)]
        rule: Option<String>,
    },
    /// Searches a cell for a susceptibility witness.
    Immunity {
        #[arg(long)]
        rule: String,
        #[arg(long)]
        kind: String,
        #[arg(long)]
        objective: String,
        /// Exhaustive sweep bound on the number of individuals.
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        /// Random profiles (n in 4..=5) tried after the exhaustive sweep.
        #[arg(long, default_value_t = 0)]
        trials: u64,
    },
    /// Runs a cross-check suite and emits newline-delimited JSON.
    Crosscheck {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        trials: u64,
        /// Include wall times in the summary (makes output run-dependent).
        #[arg(long)]
        timings: bool,
    },
    /// Median wall time of a polynomial solver per instance size.
    Bench {
        #[arg(long)]
        solver: String,
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
    },
    /// Writes a seeded random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rule: String,
        #[arg(long)]
        kind: String,
        #[arg(long)]
        objective: String,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long)]
        priced: bool,
        #[arg(long)]
        max_budget: Option<u64>,
    },
}

/// A failed run: exit code and message.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded(_) => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

/// Output of a subcommand and the exit code it asks for.
struct Output {
    body: String,
    code: u8,
}

impl Output {
    fn ok(body: String) -> Self {
        Output { body, code: 0 }
    }
}

fn read_input(global: &Global) -> Result<String, Failure> {
    let path = global.input.as_deref().ok_or_else(|| usage("this subcommand needs --in FILE"))?;
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}")))
}

fn set_text(soc: &Society, set: &[usize]) -> String {
    let names: Vec<String> = set.iter().map(|&i| soc.label(i)).collect();
    format!("{{{}}}", names.join(","))
}

fn participants(soc: &Society, given: &Option<Vec<usize>>) -> Result<Vec<usize>, Failure> {
    match given {
        None => Ok(soc.everyone()),
        Some(t) => {
            if let Some(&bad) = t.iter().find(|&&i| i >= soc.n()) {
                return Err(Error::IndexOutOfRange { index: bad, n: soc.n() }.into());
            }
            let mut t = t.clone();
            t.sort_unstable();
            t.dedup();
            Ok(t)
        }
    }
}

fn solution_text(soc: &Society, sol: &Solution) -> String {
    match sol {
        Solution::AddSet(u) => format!("add {}", set_text(soc, u)),
        Solution::DeleteSet(u) => format!("delete {}", set_text(soc, u)),
        Solution::Bribe(rows) => {
            let parts: Vec<String> = rows
                .iter()
                .map(|(&i, row)| {
                    let q: Vec<usize> = (0..row.len()).filter(|&j| row[j]).collect();
                    format!("{} now qualifies {}", soc.label(i), set_text(soc, &q))
                })
                .collect();
            format!("bribe {}", parts.join("; "))
        }
        Solution::Microbribe(flips) => {
            let parts: Vec<String> =
                flips.iter().map(|&(i, j)| format!("({},{})", soc.label(i), soc.label(j))).collect();
            format!("flip {}", parts.join(" "))
        }
    }
}

fn verdict_text(soc: &Society, v: &Verdict) -> String {
    let mut s = match &v.witness {
        Some(w) => format!("YES, cost {} ({})\n{}", v.cost, v.certifier, solution_text(soc, w)),
        None => format!("NO ({})", v.certifier),
    };
    if let Some(r) = &v.reason {
        s.push_str(&format!("\n{r}"));
    }
    s
}

fn parse_rule(text: &str) -> Result<RuleId, Failure> {
    Ok(RuleId::parse(text)?)
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let g = &cli.global;
    let json_mode = g.format == Format::Json;
    match &cli.command {
        Command::Eval { rule, participants: given } => {
            let soc = society_from_json(&read_input(g)?)?;
            let rule = parse_rule(rule)?;
            let t = participants(&soc, given)?;
            let set = evaluate(rule, &t, &soc);
            Ok(Output::ok(if json_mode {
                pretty(&json!({ "rule": rule.to_string(), "qualified": set }))
            } else {
                format!("{}\n", set_text(&soc, &set))
            }))
        }
        Command::Trace { rule, participants: given } => {
            let soc = society_from_json(&read_input(g)?)?;
            let rule = parse_rule(rule)?;
            let t = participants(&soc, given)?;
            let tr = trace(rule, &t, &soc);
            Ok(Output::ok(if json_mode {
                pretty(&trace_to_value(rule, &tr))
            } else {
                let mut s = String::new();
                for (i, stage) in tr.stages.iter().enumerate() {
                    s.push_str(&format!("K{i} = {}\n", set_text(&soc, stage)));
                }
                if let Some(q) = &tr.newly_qualified {
                    for (i, stage) in q.iter().enumerate() {
                        s.push_str(&format!("Q{i} = {}\n", set_text(&soc, stage)));
                    }
                }
                s.push_str(&format!("{rule} = {}\n", set_text(&soc, &tr.final_set)));
                s
            }))
        }
        Command::Solve { algo } => {
            let inst = instance_from_json(&read_input(g)?)?;
            let verdict = match algo {
                Algo::Brute => brute_force(&inst, &OracleLimits::default())?,
                Algo::Poly => {
                    let (_, solver) = select_solver(&inst)?;
                    solver(&inst)?.verdict
                }
                Algo::Auto => match select_solver(&inst) {
                    Ok((_, solver)) => solver(&inst)?.verdict,
                    Err(Error::NoPolynomialAlgorithm(_)) => brute_force(&inst, &OracleLimits::default())?,
                    Err(e) => return Err(e.into()),
                },
            };
            Ok(Output::ok(if json_mode {
                pretty(&verdict_to_value(&verdict))
            } else {
                format!("{}\n", verdict_text(&inst.society, &verdict))
            }))
        }
        Command::Verify { solution } => {
            let inst = instance_from_json(&read_input(g)?)?;
            let text = fs::read_to_string(solution).map_err(|e| usage(format!("cannot read {solution}: {e}")))?;
            let sol = solution_from_json(&text)?;
            let validity = verify_solution(&inst, &sol)?;
            let code = if validity.is_valid() { 0 } else { 1 };
            let body = match (&validity, json_mode) {
                (Validity::Valid(c), true) => pretty(&json!({ "valid": true, "cost": c })),
                (Validity::Invalid(why), true) => pretty(&json!({ "valid": false, "reason": why })),
                (Validity::Valid(c), false) => format!("Valid, cost {c}\n"),
                (Validity::Invalid(why), false) => format!("Invalid: {why}\n"),
            };
            Ok(Output { body, code })
        }
        Command::Reduce { theorem, rule } => {
            let theorem = Theorem::parse(theorem)?;
            let text = read_input(g)?;
            let source: SourceProblem = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
            let rule = rule.as_deref().map(parse_rule).transpose()?;
            let out = build_reduction_for(theorem, &source, rule)?;
            Ok(Output::ok(if json_mode {
                instance_to_json(&out.instance)
            } else {
                let inst = &out.instance;
                let mut s = format!(
                    "{}: {} individuals, rule {}, {}, budget {}\nA+ = {}\nA- = {}\n",
                    out.theorem_id(),
                    inst.n(),
                    inst.rule,
                    inst.kind,
                    inst.budget,
                    set_text(&inst.society, &inst.aplus),
                    set_text(&inst.society, &inst.aminus),
                );
                if let Some(t) = &inst.initial {
                    s.push_str(&format!("T = {}\n", set_text(&inst.society, t)));
                }
                for m in &out.metadata {
                    s.push_str(&format!("note: {m}\n"));
                }
                s
            }))
        }
        Command::Immunity { rule, kind, objective, max_n, trials } => {
            let rule = parse_rule(rule)?;
            let kind = Kind::parse(kind)?;
            let objective = Objective::parse(objective)?;
            let limits = OracleLimits::default();
            let mut outcome = immunity_check(rule, kind, objective, &Sampler::Exhaustive { max_n: *max_n }, 0, &limits)?;
            if let (ImmunityOutcome::NoWitnessFound { trials: seen }, true) = (&outcome, *trials > 0) {
                let seen = *seen;
                let sampler = Sampler::Random { seed: g.seed, min_n: 4, max_n: 5 };
                outcome = match immunity_check(rule, kind, objective, &sampler, *trials, &limits)? {
                    ImmunityOutcome::NoWitnessFound { trials: more } => {
                        ImmunityOutcome::NoWitnessFound { trials: seen + more }
                    }
                    w => w,
                };
            }
            Ok(Output::ok(immunity_output(&outcome, json_mode)))
        }
        Command::Crosscheck { suite, trials, timings } => {
            let suite = Suite::parse(suite)?;
            let report = run_crosscheck(suite, g.seed, *trials, &Caps::for_suite(suite));
            let body = if json_mode {
                report.to_ndjson(*timings)
            } else {
                let mut s = String::new();
                for (subject, t) in report.by_subject() {
                    s.push_str(&format!(
                        "{subject}: {} agree, {} disagree, {} capped, {} skipped\n",
                        t.agree, t.disagree, t.capped, t.skipped
                    ));
                }
                for d in report.disagreements() {
                    s.push_str(&format!(
                        "DISAGREE trial {} {}: {}\n",
                        d.trial,
                        d.subject,
                        d.detail.as_deref().unwrap_or("")
                    ));
                }
                s.push_str(&format!(
                    "{}: {} records, {} disagreements, {}\n",
                    report.suite,
                    report.records.len(),
                    report.disagreements().len(),
                    if report.passed() { "PASS" } else { "FAIL" }
                ));
                s
            };
            Ok(Output { body, code: if report.passed() { 0 } else { 1 } })
        }
        Command::Bench { solver, sizes } => {
            let table = bench_scaling(solver, sizes, g.seed)?;
            Ok(Output::ok(if json_mode {
                let rows: Vec<Value> = table
                    .iter()
                    .map(|p| json!({ "n": p.n, "seed": p.seed, "runs": p.runs, "median_us": p.median.as_secs_f64() * 1e6 }))
                    .collect();
                pretty(&json!({ "solver": solver, "points": rows }))
            } else {
                let mut s = format!("{solver}\n{:>8} {:>14}\n", "n", "median_us");
                for p in &table {
                    s.push_str(&format!("{:>8} {:>14.1}\n", p.n, p.median.as_secs_f64() * 1e6));
                }
                s
            }))
        }
        Command::Gen { n, rule, kind, objective, density, priced, max_budget } => {
            if *n == 0 {
                return Err(usage("--n must be positive"));
            }
            let rule = parse_rule(rule)?;
            let kind = Kind::parse(kind)?;
            let objective = Objective::parse(objective)?;
            let opts = RandomOptions { priced: *priced, max_price: 3, max_budget: *max_budget };
            let inst = random_instance_with(g.seed, *n, rule, kind, objective, *density, &opts);
            inst.validate()?;
            Ok(Output::ok(if json_mode { instance_to_json(&inst) } else { instance_text(&inst) }))
        }
    }
}

fn instance_text(inst: &AttackInstance) -> String {
    let soc = &inst.society;
    let mut s = format!("rule {}, {}, budget {}\n", inst.rule, inst.kind, inst.budget);
    for i in 0..soc.n() {
        let row: Vec<&str> = (0..soc.n()).map(|j| if soc.qualifies(i, j) { "+" } else { "-" }).collect();
        s.push_str(&format!("{:>4} {}\n", soc.label(i), row.join(" ")));
    }
    s.push_str(&format!("A+ = {}\nA- = {}\n", set_text(soc, &inst.aplus), set_text(soc, &inst.aminus)));
    if let Some(t) = &inst.initial {
        s.push_str(&format!("T = {}\n", set_text(soc, t)));
    }
    s
}

fn immunity_output(outcome: &ImmunityOutcome, json_mode: bool) -> String {
    match (outcome, json_mode) {
        (ImmunityOutcome::NoWitnessFound { trials }, true) => pretty(&json!({ "witness": null, "examined": trials })),
        (ImmunityOutcome::NoWitnessFound { trials }, false) => {
            format!("no susceptibility witness among {trials} instances\n")
        }
        (ImmunityOutcome::SusceptibilityWitness { instance, solution }, true) => pretty(&json!({
            "witness": { "instance": instance_to_value(instance), "solution": solution_to_value(solution) }
        })),
        (ImmunityOutcome::SusceptibilityWitness { instance, solution }, false) => format!(
            "susceptible: {}\n{}",
            solution_text(&instance.society, solution),
            instance_text(instance)
        ),
    }
}

fn emit(global: &Global, body: &str) -> Result<(), Failure> {
    match &global.out {
        Some(path) => fs::write(path, body).map_err(|e| usage(format!("cannot write {path}: {e}"))),
        None => io::stdout().write_all(body.as_bytes()).map_err(|e| usage(format!("cannot write output: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| emit(&cli.global, &out.body).map(|()| out.code));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
