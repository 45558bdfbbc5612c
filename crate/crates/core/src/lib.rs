//! Group Identification: social rules, manipulative attacks on them,
//! polynomial-time solvers, brute-force oracles, hardness-reduction
//! generators and a cross-checking harness.

pub mod error;
pub mod exact;
pub mod graph;
pub mod harness;
pub mod json;
pub mod model;
pub mod poly;
pub mod reductions;
pub mod rules;

pub use error::{Error, Result};
pub use exact::{brute_force, immunity_check, oracle_effort, ImmunityOutcome, OracleLimits, Sampler};
pub use harness::{bench_instance, bench_scaling, run_crosscheck, BenchPoint, Caps, CrossCheckReport, Suite, TrialRecord, TrialStatus};
pub use model::{
    apply_solution, classify_instance, random_instance, random_instance_with, solution_cost,
    verify_solution, Answer, AttackInstance, Classification, Kind, Objective, Prices,
    RandomOptions, RuleId, Society, Solution, Validity, Verdict,
};
pub use poly::{select_solver, solve_poly, SolverReport};
pub use rules::{evaluate, trace, RuleTrace};
pub use reductions::{build_reduction, build_reduction_for, ReductionOutput, SourceCertificate, SourceProblem, Theorem};
