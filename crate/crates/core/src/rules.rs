//! The six social rules and their iteration traces.
//!
//! [`evaluate`] works for any number of individuals; [`evaluate_mask`] is a
//! bitmask variant for `n <= 64` used by the brute-force oracles.

use crate::model::{members, membership, RuleId, Society};

/// Per-stage record of an iterative rule's fixpoint computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleTrace {
    /// Cumulative stages `K_0, K_1, …` (for 2IC/2LIC exactly `K_0, K_1`;
    /// for consent rules the single final set).
    pub stages: Vec<Vec<usize>>,
    /// For IC only: the newly qualified sets `Q_0, Q_1, …`, ending with `∅`.
    pub newly_qualified: Option<Vec<Vec<usize>>>,
    /// The socially qualified set.
    pub final_set: Vec<usize>,
}

/// Socially qualified subset of `t` (only opinions among `t` count).
pub fn evaluate(rule: RuleId, t: &[usize], soc: &Society) -> Vec<usize> {
    trace(rule, t, soc).final_set
}

/// Evaluates `rule` on `t` and records every stage.
pub fn trace(rule: RuleId, t: &[usize], soc: &Society) -> RuleTrace {
    let n = soc.n();
    let in_t = membership(n, t);
    let t: Vec<usize> = members(&in_t);
    let guard = n + 1;

    let unanimous = |a: usize| t.iter().all(|&b| soc.qualifies(b, a));
    let k0: Vec<usize> = t.iter().copied().filter(|&a| unanimous(a)).collect();
    let self_qualifiers: Vec<usize> = t.iter().copied().filter(|&a| soc.qualifies(a, a)).collect();

    match rule {
        RuleId::Consent { s, t: tt } => {
            let final_set: Vec<usize> = t
                .iter()
                .copied()
                .filter(|&a| {
                    let q = t.iter().filter(|&&b| soc.qualifies(b, a)).count();
                    if soc.qualifies(a, a) {
                        q >= s
                    } else {
                        t.len() - q < tt
                    }
                })
                .collect();
            RuleTrace { stages: vec![final_set.clone()], newly_qualified: None, final_set }
        }
        RuleId::Lsr | RuleId::Csr => {
            let start = if rule == RuleId::Lsr { self_qualifiers } else { k0 };
            let mut stages = vec![start];
            loop {
                let cur = stages.last().unwrap();
                let mut next = membership(n, cur);
                for &b in cur {
                    for &a in &t {
                        if soc.qualifies(b, a) {
                            next[a] = true;
                        }
                    }
                }
                let next = members(&next);
                if next == *cur {
                    break;
                }
                stages.push(next);
                assert!(stages.len() <= guard, "closure did not stabilise within n+1 stages");
            }
            let final_set = stages.last().unwrap().clone();
            RuleTrace { stages, newly_qualified: None, final_set }
        }
        RuleId::Ic => {
            let mut in_k = membership(n, &k0);
            let mut stages = vec![k0.clone()];
            let mut qs = vec![k0];
            loop {
                let prev = qs.last().unwrap();
                let q: Vec<usize> = if prev.is_empty() {
                    Vec::new()
                } else {
                    t.iter()
                        .copied()
                        .filter(|&a| {
                            !in_k[a] && soc.qualifies(a, a) && prev.iter().all(|&b| soc.qualifies(b, a))
                        })
                        .collect()
                };
                let done = q.is_empty();
                for &a in &q {
                    in_k[a] = true;
                }
                qs.push(q);
                if done {
                    break;
                }
                stages.push(members(&in_k));
                assert!(stages.len() <= guard, "iterative consensus did not stabilise");
            }
            let final_set = members(&in_k);
            RuleTrace { stages, newly_qualified: Some(qs), final_set }
        }
        RuleId::TwoIc | RuleId::TwoLic => {
            let k1: Vec<usize> = if k0.is_empty() {
                if rule == RuleId::TwoLic {
                    self_qualifiers
                } else {
                    Vec::new()
                }
            } else {
                t.iter()
                    .copied()
                    .filter(|&a| soc.qualifies(a, a) && k0.iter().all(|&b| soc.qualifies(b, a)))
                    .collect()
            };
            RuleTrace { stages: vec![k0, k1.clone()], newly_qualified: None, final_set: k1 }
        }
    }
}

/// Individuals of `t` qualified by everyone in `t`.
pub fn unanimous_set(t: &[usize], soc: &Society) -> Vec<usize> {
    t.iter().copied().filter(|&a| t.iter().all(|&b| soc.qualifies(b, a))).collect()
}

/// Column masks from row masks: bit `i` of `cols[j]` is set iff `i` qualifies `j`.
pub fn column_masks(rows: &[u64]) -> Vec<u64> {
    let n = rows.len();
    let mut cols = vec![0u64; n];
    for (i, &r) in rows.iter().enumerate() {
        let mut bits = r;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            if j < n {
                cols[j] |= 1 << i;
            }
            bits &= bits - 1;
        }
    }
    cols
}

/// Bitmask evaluation for `n <= 64`: `rows[i]` has bit `j` set iff `i`
/// qualifies `j`; `t` is the set of participants. Returns `f(T, φ)` as a mask.
pub fn evaluate_mask(rule: RuleId, t: u64, rows: &[u64]) -> u64 {
    let cols = column_masks(rows);
    evaluate_mask_with_cols(rule, t, rows, &cols)
}

/// As [`evaluate_mask`] but with precomputed column masks.
pub fn evaluate_mask_with_cols(rule: RuleId, t: u64, rows: &[u64], cols: &[u64]) -> u64 {
    let iter = |mut m: u64| {
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(j)
            }
        })
    };
    let self_q = iter(t).filter(|&a| rows[a] >> a & 1 == 1).fold(0u64, |m, a| m | 1 << a);
    let k0 = iter(t).filter(|&a| cols[a] & t == t).fold(0u64, |m, a| m | 1 << a);
    // Consensus of a nonempty group: individuals qualified by all of `g`.
    let consensus = |g: u64| iter(g).fold(t, |m, b| m & rows[b]);
    match rule {
        RuleId::Consent { s, t: tt } => {
            let size = t.count_ones() as usize;
            iter(t)
                .filter(|&a| {
                    let q = (cols[a] & t).count_ones() as usize;
                    if rows[a] >> a & 1 == 1 {
                        q >= s
                    } else {
                        size - q < tt
                    }
                })
                .fold(0u64, |m, a| m | 1 << a)
        }
        RuleId::Lsr | RuleId::Csr => {
            let mut k = if rule == RuleId::Lsr { self_q } else { k0 };
            loop {
                let next = iter(k).fold(k, |m, b| m | (rows[b] & t));
                if next == k {
                    return k;
                }
                k = next;
            }
        }
        RuleId::Ic => {
            let mut k = k0;
            let mut q = k0;
            while q != 0 {
                q = consensus(q) & self_q & !k;
                k |= q;
            }
            k
        }
        RuleId::TwoIc | RuleId::TwoLic => {
            if k0 == 0 {
                if rule == RuleId::TwoLic {
                    self_q
                } else {
                    0
                }
            } else {
                k0 | (consensus(k0) & self_q)
            }
        }
    }
}

/// Converts a sorted index list into a bitmask.
pub fn to_mask(set: &[usize]) -> u64 {
    set.iter().fold(0u64, |m, &a| m | 1 << a)
}

/// Converts a bitmask into a sorted index list.
pub fn from_mask(mut m: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ALL_RULES: [RuleId; 8] = [
        RuleId::Consent { s: 1, t: 1 },
        RuleId::Consent { s: 2, t: 2 },
        RuleId::Consent { s: 3, t: 1 },
        RuleId::Lsr,
        RuleId::Csr,
        RuleId::Ic,
        RuleId::TwoIc,
        RuleId::TwoLic,
    ];

    fn society(n: usize, bits: &[bool]) -> Society {
        Society::from_fn(n, |i, j| bits[i * n + j])
    }

    #[test]
    fn unanimous_profiles() {
        for rule in ALL_RULES {
            let all = Society::uniform(3, true);
            let none = Society::uniform(3, false);
            let expected_all = match rule {
                RuleId::Consent { s, .. } if s > 3 => vec![],
                _ => vec![0, 1, 2],
            };
            assert_eq!(evaluate(rule, &[0, 1, 2], &all), expected_all, "{rule}");
            let expected_none = match rule {
                // With t > |T| nobody collects enough disqualifications.
                RuleId::Consent { t, .. } if t > 3 => vec![0, 1, 2],
                _ => vec![],
            };
            assert_eq!(evaluate(rule, &[0, 1, 2], &none), expected_none, "{rule}");
        }
    }

    #[test]
    fn lsr_trace_on_silent_profile() {
        let tr = trace(RuleId::Lsr, &[0, 1, 2], &Society::uniform(3, false));
        assert_eq!(tr.stages, vec![Vec::<usize>::new()]);
        assert!(tr.final_set.is_empty());
    }

    proptest! {
        #[test]
        fn mask_evaluator_matches_general(n in 1usize..7, bits in proptest::collection::vec(any::<bool>(), 36), tbits in any::<u64>()) {
            let soc = society(n, &bits);
            let full = (1u64 << n) - 1;
            let t = tbits & full;
            let rows = soc.row_masks();
            for rule in ALL_RULES {
                let general = evaluate(rule, &from_mask(t), &soc);
                prop_assert_eq!(to_mask(&general), evaluate_mask(rule, t, &rows), "rule {}", rule);
            }
        }

        #[test]
        fn rule_invariants(n in 1usize..7, bits in proptest::collection::vec(any::<bool>(), 36)) {
            let soc = society(n, &bits);
            let t: Vec<usize> = (0..n).collect();
            let k0 = unanimous_set(&t, &soc);
            let two_ic = evaluate(RuleId::TwoIc, &t, &soc);
            let two_lic = evaluate(RuleId::TwoLic, &t, &soc);
            if k0.is_empty() {
                prop_assert!(two_ic.is_empty());
                let selfq: Vec<usize> = t.iter().copied().filter(|&a| soc.qualifies(a, a)).collect();
                prop_assert_eq!(&two_lic, &selfq);
            } else {
                prop_assert_eq!(&two_ic, &two_lic);
            }
            for rule in [RuleId::Ic, RuleId::TwoIc, RuleId::TwoLic] {
                let f = evaluate(rule, &t, &soc);
                prop_assert!(k0.iter().all(|a| f.contains(a)));
            }
            let c11 = evaluate(RuleId::consent(1, 1), &t, &soc);
            let selfq: Vec<usize> = t.iter().copied().filter(|&a| soc.qualifies(a, a)).collect();
            prop_assert_eq!(c11, selfq);
            for rule in [RuleId::Lsr, RuleId::Csr, RuleId::Ic] {
                let tr = trace(rule, &t, &soc);
                prop_assert!(tr.stages.len() <= n + 1);
                prop_assert!(tr.stages.windows(2).all(|w| w[0].iter().all(|a| w[1].contains(a))));
                if let Some(qs) = &tr.newly_qualified {
                    let mut seen = vec![false; n];
                    for q in qs {
                        for &a in q {
                            prop_assert!(!seen[a]);
                            seen[a] = true;
                        }
                    }
                }
            }
            // Closure rules are fixpoints: one more closure step changes nothing.
            for rule in [RuleId::Lsr, RuleId::Csr] {
                let f = evaluate(rule, &t, &soc);
                let grown: Vec<usize> = t.iter().copied().filter(|&a| f.contains(&a) || f.iter().any(|&b| soc.qualifies(b, a))).collect();
                prop_assert_eq!(f, grown);
            }
        }

        #[test]
        fn results_stay_inside_t(n in 1usize..7, bits in proptest::collection::vec(any::<bool>(), 36), tbits in any::<u64>()) {
            let soc = society(n, &bits);
            let t = from_mask(tbits & ((1u64 << n) - 1));
            for rule in ALL_RULES {
                prop_assert!(evaluate(rule, &t, &soc).iter().all(|a| t.contains(a)));
            }
        }
    }
}
