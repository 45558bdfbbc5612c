//! Immunity claims: exhaustive sweeps over every profile and target choice
//! with at most three individuals.

use groupid::harness::{immunity_cells, run_crosscheck, Caps, Suite};
use groupid::{immunity_check, Kind, Objective, OracleLimits, RuleId, Sampler};

#[test]
fn liberal_constructive_deletion_is_immune() {
    let out = immunity_check(
        RuleId::consent(1, 1),
        Kind::DeleteIndividuals,
        Objective::Constructive,
        &Sampler::Exhaustive { max_n: 3 },
        0,
        &OracleLimits::default(),
    )
    .unwrap();
    assert!(out.is_immune());
}

#[test]
fn csr_relaxed_general_deletion_has_a_witness() {
    let out = immunity_check(
        RuleId::Csr,
        Kind::RelaxedDeleteIndividuals,
        Objective::General,
        &Sampler::Exhaustive { max_n: 3 },
        0,
        &OracleLimits::default(),
    )
    .unwrap();
    assert!(!out.is_immune());
}

#[test]
fn immunity_suite_matches_the_tables() {
    let report = run_crosscheck(Suite::Immunity, 3, 40, &Caps::for_suite(Suite::Immunity));
    assert!(report.passed(), "{}", report.to_ndjson(false));
    assert_eq!(report.records.len(), immunity_cells().len());
}
