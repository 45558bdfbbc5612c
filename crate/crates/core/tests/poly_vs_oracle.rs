//! Every polynomial solver agrees with the exhaustive oracle on random
//! instances of its cell: same YES/NO answer, a verifying witness, and —
//! where the solver is cost-optimal — the same minimum cost.

use groupid::exact::brute_force;
use groupid::poly::select_solver;
use groupid::{
    random_instance_with, verify_solution, Kind, Objective, OracleLimits, RandomOptions, RuleId,
};

struct Cell {
    solver: &'static str,
    rules: Vec<RuleId>,
    kinds: Vec<Kind>,
    objectives: Vec<Objective>,
    priced: bool,
    max_n: usize,
    max_budget: u64,
    /// The solver returns a minimum-cost witness.
    optimal: bool,
    /// Both answers are expected among the samples.
    mixed: bool,
}

const PER_SOLVER: usize = 500;

fn run(cell: &Cell) {
    let limits = OracleLimits::default();
    let mut checked = 0;
    let mut yes = 0;
    let mut seed = 0u64;
    let opts = RandomOptions { priced: cell.priced, max_price: 3, max_budget: Some(cell.max_budget) };
    while checked < PER_SOLVER {
        seed += 1;
        assert!(seed < 200_000, "{}: too few instances land in the cell", cell.solver);
        let pick = seed as usize;
        let rule = cell.rules[pick % cell.rules.len()];
        let kind = cell.kinds[(pick / 7) % cell.kinds.len()];
        let objective = cell.objectives[(pick / 3) % cell.objectives.len()];
        let n = 1 + (pick / 11) % cell.max_n;
        let density = [0.3, 0.5, 0.7, 0.85][pick % 4];
        let inst = random_instance_with(seed, n, rule, kind, objective, density, &opts);
        if inst.validate().is_err() {
            continue;
        }
        match select_solver(&inst) {
            Ok((name, solver)) if name == cell.solver => {
                let poly = solver(&inst).unwrap_or_else(|e| panic!("{name} seed {seed}: {e}"));
                let oracle = brute_force(&inst, &limits).unwrap();
                assert_eq!(
                    poly.verdict.answer, oracle.answer,
                    "{name} disagrees with the oracle on seed {seed}: {inst:?}\npoly {:?}\noracle {:?}",
                    poly.verdict, oracle
                );
                if let Some(w) = &poly.verdict.witness {
                    yes += 1;
                    let v = verify_solution(&inst, w).unwrap();
                    assert!(v.is_valid(), "{name} witness fails on seed {seed}: {v:?} {inst:?} {w:?}");
                    if cell.optimal {
                        assert_eq!(poly.verdict.cost, oracle.cost, "{name} cost on seed {seed}: {inst:?}");
                    }
                }
                checked += 1;
            }
            _ => {}
        }
    }
    let no = checked - yes;
    eprintln!("{}: {yes} YES / {no} NO", cell.solver);
    assert!(!cell.mixed || (yes >= 10 && no >= 10), "{}: degenerate mix {yes} YES / {no} NO", cell.solver);
}

fn consent_rules(s_range: std::ops::RangeInclusive<usize>) -> Vec<RuleId> {
    let mut v = Vec::new();
    for s in s_range {
        for t in 1..=3 {
            v.push(RuleId::consent(s, t));
        }
    }
    v
}

use Objective::*;

#[test]
fn consent_s1_relaxed_destructive() {
    run(&Cell {
        solver: "solve_consent_s1_rdgcdi",
        rules: consent_rules(1..=1),
        kinds: vec![Kind::RelaxedDeleteIndividuals],
        objectives: vec![Destructive],
        priced: false,
        max_n: 6,
        max_budget: 6,
        optimal: true,
        mixed: true,
    });
}

#[test]
fn consent_easy_cases() {
    let mut rules = consent_rules(1..=3);
    rules.extend([RuleId::Lsr, RuleId::Csr]);
    run(&Cell {
        solver: "solve_consent_easy_cases",
        rules,
        kinds: vec![Kind::DeleteIndividuals, Kind::RelaxedDeleteIndividuals],
        objectives: vec![Constructive, Destructive, Exact, General],
        priced: false,
        max_n: 6,
        max_budget: 6,
        optimal: false,
        mixed: true,
    });
}

#[test]
fn lsr_relaxed_destructive() {
    run(&Cell {
        solver: "solve_lsr_rdgcdi",
        rules: vec![RuleId::Lsr],
        kinds: vec![Kind::RelaxedDeleteIndividuals],
        objectives: vec![Destructive],
        priced: false,
        max_n: 6,
        max_budget: 6,
        optimal: true,
        mixed: true,
    });
}

#[test]
fn csr_destructive_corrected() {
    run(&Cell {
        solver: "solve_csr_dgcdi_corrected",
        rules: vec![RuleId::Csr],
        kinds: vec![Kind::DeleteIndividuals],
        objectives: vec![Destructive],
        priced: false,
        max_n: 6,
        max_budget: 6,
        optimal: false,
        mixed: true,
    });
}

#[test]
fn csr_relaxed_destructive() {
    run(&Cell {
        solver: "solve_csr_rdgcdi",
        rules: vec![RuleId::Csr],
        kinds: vec![Kind::RelaxedDeleteIndividuals],
        objectives: vec![Destructive],
        priced: false,
        max_n: 6,
        max_budget: 1,
        optimal: false,
        mixed: true,
    });
}

#[test]
fn csr_relaxed_exact() {
    run(&Cell {
        solver: "solve_csr_regcdi",
        rules: vec![RuleId::Csr],
        kinds: vec![Kind::RelaxedDeleteIndividuals],
        objectives: vec![Exact],
        priced: false,
        max_n: 6,
        max_budget: 6,
        optimal: true,
        mixed: true,
    });
}

#[test]
fn two_stage_constructive_deletion() {
    for (solver, rule) in [("solve_2ic_cgcdi", RuleId::TwoIc), ("solve_2lic_cgcdi", RuleId::TwoLic)] {
        run(&Cell {
            solver,
            rules: vec![rule],
            kinds: vec![Kind::DeleteIndividuals, Kind::RelaxedDeleteIndividuals],
            objectives: vec![Constructive],
            priced: false,
            max_n: 6,
            max_budget: 6,
            optimal: true,
            mixed: true,
        });
    }
}

#[test]
fn destructive_bribery() {
    for priced in [true, false] {
        run(&Cell {
            solver: "solve_ic_2ic_dgb_priced",
            rules: vec![RuleId::Ic, RuleId::TwoIc],
            kinds: vec![Kind::Bribery],
            objectives: vec![Destructive],
            priced,
            max_n: 5,
            max_budget: 3,
            optimal: true,
            // One unpriced bribe always breaks every consensus.
            mixed: priced,
        });
    }
}

#[test]
fn priced_constructive_bribery() {
    for (solver, rule) in [("solve_2ic_cgb_priced", RuleId::TwoIc), ("solve_2lic_cgb_priced", RuleId::TwoLic)] {
        run(&Cell {
            solver,
            rules: vec![rule],
            kinds: vec![Kind::Bribery],
            objectives: vec![Constructive],
            priced: true,
            max_n: 5,
            max_budget: 3,
            optimal: true,
            mixed: true,
        });
    }
}

#[test]
fn unpriced_general_bribery() {
    for (solver, rule) in [("solve_2ic_gb_unpriced", RuleId::TwoIc), ("solve_2lic_gb_unpriced", RuleId::TwoLic)] {
        run(&Cell {
            solver,
            rules: vec![rule],
            kinds: vec![Kind::Bribery],
            objectives: vec![Constructive, Exact, General, Destructive],
            priced: false,
            max_n: 5,
            max_budget: 3,
            optimal: true,
            mixed: true,
        });
    }
}

#[test]
fn unpriced_constructive_microbribery() {
    for (solver, rule) in [("solve_2ic_cgmb", RuleId::TwoIc), ("solve_2lic_cgmb", RuleId::TwoLic)] {
        run(&Cell {
            solver,
            rules: vec![rule],
            kinds: vec![Kind::Microbribery],
            objectives: vec![Constructive],
            priced: false,
            max_n: 5,
            max_budget: 4,
            optimal: true,
            mixed: true,
        });
    }
}
