//! Reduction generators against the source solvers and the oracle, plus the
//! cardinality formulas of the constructions.

use groupid::harness::{run_crosscheck, Caps, Suite, KNOWN_UNSOUND};
use groupid::reductions::{build_reduction, solve_source, SourceProblem, Theorem};
use groupid::{brute_force, verify_solution, Kind, OracleLimits, Solution};

fn set_cover(universe: usize, family: &[&[usize]], k: usize) -> SourceProblem {
    SourceProblem::SetCover { universe, family: family.iter().map(|s| s.to_vec()).collect(), k }
}

#[test]
fn sampled_round_trips_agree_except_known_unsound() {
    let report = run_crosscheck(Suite::ReductionRoundtrip, 11, 12, &Caps::for_suite(Suite::ReductionRoundtrip));
    for (subject, tally) in report.by_subject() {
        let unsound = KNOWN_UNSOUND.iter().any(|t| t.id() == subject);
        if !unsound {
            assert_eq!(tally.disagree, 0, "{subject}: {tally:?}");
        }
        assert!(tally.agree > 0, "{subject}: nothing decided {tally:?}");
    }
}

#[test]
fn single_star_bribe_breaks_ic_cgb() {
    // {x1, x2} cannot be covered by {{x1}}, yet one bribe qualifies everyone.
    let src = set_cover(2, &[&[0]], 1);
    assert!(solve_source(&src).is_none());
    let out = build_reduction("T-IC-CGB", &src).unwrap();
    let v = brute_force(&out.instance, &OracleLimits::generous()).unwrap();
    assert!(v.is_yes());
    let Some(Solution::Bribe(rows)) = &v.witness else { panic!("expected a bribery witness") };
    assert_eq!(rows.len(), 1);
    assert!(verify_solution(&out.instance, v.witness.as_ref().unwrap()).unwrap().is_valid());
    assert!(out.backward(v.witness.as_ref().unwrap()).is_err());
}

#[test]
fn ic_cgb_cardinality() {
    for (universe, family, k) in [(2, vec![vec![0], vec![1]], 1), (3, vec![vec![0, 1], vec![2], vec![1, 2]], 2)] {
        let src = SourceProblem::SetCover { universe, family: family.clone(), k };
        let out = build_reduction("T-IC-CGB", &src).unwrap();
        // After the preprocessing the family ends with an empty set.
        let f = family.len() + 1;
        assert_eq!(out.instance.n(), universe + (k + 1) * f + (k + 1), "{src:?}");
        assert_eq!(out.instance.budget, k as u64);
    }
}

#[test]
fn two_ic_cgmb_budget() {
    // Path 0-1-2 plus a triangle 3-4-5: degrees 1, 2, 1, 2, 2, 2, so D = 2.
    let edges = vec![[0, 1], [1, 2], [3, 4], [4, 5], [3, 5]];
    let src = SourceProblem::IndependentSet { vertices: 6, edges, k: 3 };
    let out = build_reduction("T-2IC-CGMB", &src).unwrap();
    assert_eq!(out.instance.budget, 6 * (2 + 1) - 3);
    assert_eq!(out.instance.kind, Kind::Microbribery);
}

#[test]
fn gmb_prot_single_variable() {
    let src = SourceProblem::CnfSat { variables: 1, clauses: vec![vec![1]] };
    let out = build_reduction("T-GMB-PROT", &src).unwrap();
    assert_eq!(out.instance.n(), 8);
    assert_eq!(out.instance.budget, 3);
    let limits = OracleLimits::generous();
    assert!(brute_force(&out.instance, &limits).unwrap().is_yes());
    let mut tight = out.instance.clone();
    tight.budget = 2;
    assert!(!brute_force(&tight, &limits).unwrap().is_yes());
}

#[test]
fn ic_dgcai_two_singletons() {
    let src = set_cover(2, &[&[0], &[1]], 2);
    let out = build_reduction("T-IC-DGCAI", &src).unwrap();
    assert_eq!(out.instance.n(), 4);
    assert_eq!(out.instance.aminus, vec![0, 1]);
    assert_eq!(out.instance.initial, Some(vec![0, 1]));
    assert_eq!(out.instance.budget, 2);
}

#[test]
fn every_theorem_parses_and_rejects_wrong_sources() {
    let cnf = SourceProblem::CnfSat { variables: 1, clauses: vec![vec![1]] };
    for th in Theorem::ALL {
        assert_eq!(Theorem::parse(th.id()).unwrap(), th);
        if th.source_kind() != "cnf-sat" {
            assert!(build_reduction(th.id(), &cnf).is_err(), "{th}");
        }
    }
}
