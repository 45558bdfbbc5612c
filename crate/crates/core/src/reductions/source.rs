//! Source problems of the hardness reductions, their certificates, structural
//! validation and brute-force solvers.

use serde::{Deserialize, Serialize};

/// A combinatorial source problem. Elements and vertices are `0..size`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SourceProblem {
    /// CNF formula over variables `0..variables`; literal `+v` is variable
    /// `v-1`, literal `-v` its negation (DIMACS convention).
    CnfSat { variables: usize, clauses: Vec<Vec<i64>> },
    /// Is there a subfamily of at most `k` sets covering `0..universe`?
    SetCover { universe: usize, family: Vec<Vec<usize>>, k: usize },
    /// Is there a vertex cover of size at most `k`?
    VertexCover { vertices: usize, edges: Vec<[usize; 2]>, k: usize },
    /// Is there an independent set of size at least `k`?
    IndependentSet { vertices: usize, edges: Vec<[usize; 2]>, k: usize },
    /// Restricted exact cover by 3-sets: `universe = 3m`, every set has three
    /// elements and every element lies in exactly three sets.
    Rx3c { universe: usize, family: Vec<Vec<usize>> },
}

/// A certificate for a source problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum SourceCertificate {
    /// Truth value per variable.
    Assignment(Vec<bool>),
    /// Chosen sets (by family index) or vertices, ascending.
    Selection(Vec<usize>),
}

impl SourceProblem {
    /// Short name of the variant, as used in JSON.
    pub fn name(&self) -> &'static str {
        match self {
            SourceProblem::CnfSat { .. } => "cnf-sat",
            SourceProblem::SetCover { .. } => "set-cover",
            SourceProblem::VertexCover { .. } => "vertex-cover",
            SourceProblem::IndependentSet { .. } => "independent-set",
            SourceProblem::Rx3c { .. } => "rx3c",
        }
    }
}

fn check_graph(vertices: usize, edges: &[[usize; 2]], out: &mut Vec<String>) {
    let mut seen = std::collections::BTreeSet::new();
    for &[u, v] in edges {
        if u >= vertices || v >= vertices {
            out.push(format!("edge {{{u},{v}}} leaves the vertex range 0..{vertices}"));
        } else if u == v {
            out.push(format!("self-loop at vertex {u}"));
        } else if !seen.insert((u.min(v), u.max(v))) {
            out.push(format!("edge {{{u},{v}}} listed twice"));
        }
    }
}

fn check_family(universe: usize, family: &[Vec<usize>], out: &mut Vec<String>) {
    for (i, set) in family.iter().enumerate() {
        for &x in set {
            if x >= universe {
                out.push(format!("set {i} contains {x}, outside the universe 0..{universe}"));
            }
        }
        let mut sorted = set.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != set.len() {
            out.push(format!("set {i} repeats an element"));
        }
    }
}

/// Structural violations of the problem statement; empty means valid.
pub fn validate_source(source: &SourceProblem) -> Vec<String> {
    let mut out = Vec::new();
    match source {
        SourceProblem::CnfSat { variables, clauses } => {
            for (c, clause) in clauses.iter().enumerate() {
                for &lit in clause {
                    if lit == 0 || lit.unsigned_abs() as usize > *variables {
                        out.push(format!("clause {c} has literal {lit} outside ±1..±{variables}"));
                    }
                }
            }
        }
        SourceProblem::SetCover { universe, family, .. } => check_family(*universe, family, &mut out),
        SourceProblem::VertexCover { vertices, edges, .. }
        | SourceProblem::IndependentSet { vertices, edges, .. } => check_graph(*vertices, edges, &mut out),
        SourceProblem::Rx3c { universe, family } => {
            check_family(*universe, family, &mut out);
            if universe % 3 != 0 {
                out.push(format!("universe size {universe} is not a multiple of three"));
            }
            if family.len() != *universe {
                out.push(format!("family has {} sets, expected {universe}", family.len()));
            }
            for (i, set) in family.iter().enumerate() {
                if set.len() != 3 {
                    out.push(format!("set {i} has {} elements, expected 3", set.len()));
                }
            }
            let mut count = vec![0usize; *universe];
            for &x in family.iter().flatten() {
                if x < *universe {
                    count[x] += 1;
                }
            }
            for (x, &c) in count.iter().enumerate() {
                if c != 3 {
                    out.push(format!("element {x} lies in {c} sets, expected 3"));
                }
            }
        }
    }
    out
}

fn literal_true(lit: i64, assignment: &[bool]) -> bool {
    let v = lit.unsigned_abs() as usize - 1;
    assignment[v] == (lit > 0)
}

fn covered(universe: usize, family: &[Vec<usize>], chosen: &[usize]) -> Vec<usize> {
    let mut count = vec![0usize; universe];
    for &i in chosen {
        for &x in &family[i] {
            count[x] += 1;
        }
    }
    count
}

fn is_distinct_selection(sel: &[usize], bound: usize) -> bool {
    sel.windows(2).all(|w| w[0] < w[1]) && sel.iter().all(|&i| i < bound)
}

/// Whether `cert` certifies that `source` is a YES-instance.
pub fn check_certificate(source: &SourceProblem, cert: &SourceCertificate) -> bool {
    match (source, cert) {
        (SourceProblem::CnfSat { variables, clauses }, SourceCertificate::Assignment(a)) => {
            a.len() == *variables && clauses.iter().all(|c| c.iter().any(|&l| literal_true(l, a)))
        }
        (SourceProblem::SetCover { universe, family, k }, SourceCertificate::Selection(sel)) => {
            is_distinct_selection(sel, family.len())
                && sel.len() <= *k
                && covered(*universe, family, sel).iter().all(|&c| c > 0)
        }
        (SourceProblem::VertexCover { vertices, edges, k }, SourceCertificate::Selection(sel)) => {
            let inside = crate::model::membership(*vertices, sel);
            is_distinct_selection(sel, *vertices)
                && sel.len() <= *k
                && edges.iter().all(|&[u, v]| inside[u] || inside[v])
        }
        (SourceProblem::IndependentSet { vertices, edges, k }, SourceCertificate::Selection(sel)) => {
            let inside = crate::model::membership(*vertices, sel);
            is_distinct_selection(sel, *vertices)
                && sel.len() >= *k
                && edges.iter().all(|&[u, v]| !(inside[u] && inside[v]))
        }
        (SourceProblem::Rx3c { universe, family }, SourceCertificate::Selection(sel)) => {
            is_distinct_selection(sel, family.len())
                && covered(*universe, family, sel).iter().all(|&c| c == 1)
        }
        _ => false,
    }
}

/// Exhaustive solver: the first certificate in a fixed order (assignments
/// by binary counting, selections by size then lexicographically), if any.
pub fn solve_source(source: &SourceProblem) -> Option<SourceCertificate> {
    match source {
        SourceProblem::CnfSat { variables, .. } => (0u64..1 << variables)
            .map(|code| SourceCertificate::Assignment((0..*variables).map(|v| code >> v & 1 == 1).collect()))
            .find(|c| check_certificate(source, c)),
        SourceProblem::SetCover { family, .. } | SourceProblem::Rx3c { family, .. } => {
            first_selection(source, family.len())
        }
        SourceProblem::VertexCover { vertices, .. } | SourceProblem::IndependentSet { vertices, .. } => {
            first_selection(source, *vertices)
        }
    }
}

fn first_selection(source: &SourceProblem, m: usize) -> Option<SourceCertificate> {
    let mut masks: Vec<u64> = (0u64..1 << m).collect();
    masks.sort_by_key(|&c| (c.count_ones(), std::cmp::Reverse(c.reverse_bits())));
    masks
        .into_iter()
        .map(|c| SourceCertificate::Selection((0..m).filter(|&i| c >> i & 1 == 1).collect()))
        .find(|c| check_certificate(source, c))
}

/// All RX3C families over `3m` elements (as multisets of 3-sets, listed in
/// non-decreasing order) satisfying the regularity condition.
pub fn rx3c_families(m: usize) -> Vec<Vec<Vec<usize>>> {
    let u = 3 * m;
    let mut triples = Vec::new();
    for a in 0..u {
        for b in a + 1..u {
            for c in b + 1..u {
                triples.push(vec![a, b, c]);
            }
        }
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    let mut load = vec![0usize; u];
    fn go(
        triples: &[Vec<usize>],
        start: usize,
        need: usize,
        cur: &mut Vec<usize>,
        load: &mut [usize],
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if cur.len() == need {
            if load.iter().all(|&l| l == 3) {
                out.push(cur.iter().map(|&t| triples[t].clone()).collect());
            }
            return;
        }
        // The smallest element not yet at load 3 must be covered by a
        // triple containing it; triples are visited in order, so prune on
        // the first triple's leading element.
        for t in start..triples.len() {
            if triples[t].iter().any(|&x| load[x] == 3) {
                continue;
            }
            if let Some(first) = load.iter().position(|&l| l < 3) {
                if triples[t][0] > first {
                    break;
                }
            }
            for &x in &triples[t] {
                load[x] += 1;
            }
            cur.push(t);
            go(triples, t, need, cur, load, out);
            cur.pop();
            for &x in &triples[t] {
                load[x] -= 1;
            }
        }
    }
    go(&triples, 0, u, &mut cur, &mut load, &mut out);
    out
}

/// Exhaustive corpus of small sources of one kind: CNF formulas over at
/// most three variables with at most three distinct clauses (clauses with
/// complementary literals only up to two variables), Set Cover with
/// `|X| <= 4`, `|F| <= 4` and `k <= 3`, graphs on two to five vertices with
/// `k <= 3`, and RX3C with `m <= 2`.
pub fn source_corpus(kind: &str) -> Vec<SourceProblem> {
    let mut out = Vec::new();
    match kind {
        "cnf-sat" => {
            for variables in 1..=3i64 {
                let lits: Vec<i64> = (1..=variables).flat_map(|v| [v, -v]).collect();
                let clauses: Vec<Vec<i64>> = (1u32..1 << lits.len())
                    .map(|mask| (0..lits.len()).filter(|&b| mask >> b & 1 == 1).map(|b| lits[b]).collect::<Vec<_>>())
                    .filter(|c| variables <= 2 || !c.iter().any(|l| c.contains(&-l)))
                    .collect();
                for size in 0..=3 {
                    for combo in combinations(clauses.len(), size) {
                        out.push(SourceProblem::CnfSat {
                            variables: variables as usize,
                            clauses: combo.iter().map(|&i| clauses[i].clone()).collect(),
                        });
                    }
                }
            }
        }
        "set-cover" => {
            for universe in 1..=4usize {
                let subsets: Vec<Vec<usize>> = (0u32..1 << universe)
                    .map(|mask| (0..universe).filter(|&b| mask >> b & 1 == 1).collect())
                    .collect();
                for size in 1..=4usize {
                    for combo in combinations(subsets.len(), size) {
                        let family: Vec<Vec<usize>> = combo.iter().map(|&i| subsets[i].clone()).collect();
                        for k in 1..=3 {
                            out.push(SourceProblem::SetCover { universe, family: family.clone(), k });
                        }
                    }
                }
            }
        }
        "vertex-cover" | "independent-set" => {
            for vertices in 2..=5usize {
                let pairs: Vec<[usize; 2]> =
                    (0..vertices).flat_map(|u| (u + 1..vertices).map(move |v| [u, v])).collect();
                for mask in 0u32..1 << pairs.len() {
                    let edges: Vec<[usize; 2]> =
                        (0..pairs.len()).filter(|&b| mask >> b & 1 == 1).map(|b| pairs[b]).collect();
                    for k in 1..=3 {
                        out.push(if kind == "vertex-cover" {
                            SourceProblem::VertexCover { vertices, edges: edges.clone(), k }
                        } else {
                            SourceProblem::IndependentSet { vertices, edges: edges.clone(), k }
                        });
                    }
                }
            }
        }
        "rx3c" => {
            for m in 1..=2 {
                for family in rx3c_families(m) {
                    out.push(SourceProblem::Rx3c { universe: 3 * m, family });
                }
            }
        }
        _ => {}
    }
    out
}

/// All `size`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    go(0, n, size, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rx3c_regularity_is_checked() {
        let bad = SourceProblem::Rx3c { universe: 3, family: vec![vec![0, 1, 2], vec![0, 1, 2], vec![0, 1, 2]] };
        assert!(validate_source(&bad).is_empty());
        let worse = SourceProblem::Rx3c { universe: 3, family: vec![vec![0, 1, 2], vec![0, 1, 2]] };
        assert!(!validate_source(&worse).is_empty());
    }

    #[test]
    fn rx3c_enumeration_is_regular() {
        assert_eq!(rx3c_families(1).len(), 1);
        let two = rx3c_families(2);
        assert!(!two.is_empty());
        for f in two {
            let p = SourceProblem::Rx3c { universe: 6, family: f };
            assert!(validate_source(&p).is_empty());
        }
    }

    #[test]
    fn brute_solvers() {
        let sat = SourceProblem::CnfSat { variables: 2, clauses: vec![vec![1, 2], vec![-1], vec![-2, 1]] };
        assert_eq!(solve_source(&sat), None);
        let sc = SourceProblem::SetCover { universe: 3, family: vec![vec![0], vec![1, 2], vec![0, 1]], k: 2 };
        assert_eq!(solve_source(&sc), Some(SourceCertificate::Selection(vec![0, 1])));
        let vc = SourceProblem::VertexCover { vertices: 3, edges: vec![[0, 1], [1, 2]], k: 1 };
        assert_eq!(solve_source(&vc), Some(SourceCertificate::Selection(vec![1])));
    }
}
