//! Qualification graphs, auxiliary separator graphs, vertex merging and
//! minimum vertex separators.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::model::{membership, Society};
use crate::rules::unanimous_set;

/// What a vertex stands for.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VertexTag {
    /// The vertex of an individual.
    Individual(usize),
    /// The auxiliary source `v*`.
    Source,
    /// The auxiliary sink `w`.
    Sink,
    /// A vertex obtained by merging the listed original vertices.
    Merged(Vec<usize>),
}

/// A simple directed graph with sorted, duplicate-free adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiGraph {
    adj: Vec<Vec<usize>>,
    tags: Vec<VertexTag>,
}

impl DiGraph {
    pub fn new(tags: Vec<VertexTag>) -> Self {
        DiGraph { adj: vec![Vec::new(); tags.len()], tags }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn add_vertex(&mut self, tag: VertexTag) -> usize {
        self.adj.push(Vec::new());
        self.tags.push(tag);
        self.adj.len() - 1
    }

    /// Adds `u → v` unless it already exists.
    pub fn add_arc(&mut self, u: usize, v: usize) {
        if let Err(pos) = self.adj[u].binary_search(&v) {
            self.adj[u].insert(pos, v);
        }
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn out_neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn arc_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn tag(&self, v: usize) -> &VertexTag {
        &self.tags[v]
    }

    /// The vertex carrying `tag`, if any.
    pub fn find(&self, tag: &VertexTag) -> Option<usize> {
        self.tags.iter().position(|t| t == tag)
    }

    /// The vertex of individual `a`, if present.
    pub fn vertex_of(&self, a: usize) -> Option<usize> {
        self.find(&VertexTag::Individual(a))
    }

    /// Individuals represented by `vertices` (merged vertices expand), ascending.
    pub fn individuals(&self, vertices: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = vertices
            .iter()
            .flat_map(|&v| match &self.tags[v] {
                VertexTag::Individual(a) => vec![*a],
                VertexTag::Merged(g) => g.clone(),
                _ => vec![],
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// A copy without the listed vertices (indices are compacted, order kept).
    pub fn without(&self, removed: &[usize]) -> DiGraph {
        let gone = membership(self.len(), removed);
        let mut new_index = vec![usize::MAX; self.len()];
        let mut tags = Vec::new();
        for v in 0..self.len() {
            if !gone[v] {
                new_index[v] = tags.len();
                tags.push(self.tags[v].clone());
            }
        }
        let mut g = DiGraph::new(tags);
        for u in 0..self.len() {
            if gone[u] {
                continue;
            }
            for &v in &self.adj[u] {
                if !gone[v] {
                    g.adj[new_index[u]].push(new_index[v]);
                }
            }
        }
        g
    }

    /// Whether `sink` is reachable from `source` while avoiding `blocked`.
    pub fn reaches(&self, source: usize, sink: usize, blocked: &[bool]) -> bool {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([source]);
        seen[source] = true;
        while let Some(u) = queue.pop_front() {
            if u == sink {
                return true;
            }
            for &v in &self.adj[u] {
                if !seen[v] && !blocked[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        false
    }
}

/// Arc `(a, b)` iff `a` qualifies `b`, self-loops included.
pub fn qualification_graph(soc: &Society) -> DiGraph {
    let n = soc.n();
    let mut g = DiGraph::new((0..n).map(VertexTag::Individual).collect());
    for a in 0..n {
        g.adj[a] = (0..n).filter(|&b| soc.qualifies(a, b)).collect();
    }
    g
}

/// A graph together with its source `v*` and sink `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxGraph {
    pub graph: DiGraph,
    pub source: usize,
    pub sink: usize,
}

/// Qualification graph plus `v* → u` for every self-qualifier `u` and
/// `v → w` for every `v ∈ A⁻` (no merging).
pub fn lsr_aux_graph(soc: &Society, aminus: &[usize]) -> AuxGraph {
    let mut g = qualification_graph(soc);
    let source = g.add_vertex(VertexTag::Source);
    let sink = g.add_vertex(VertexTag::Sink);
    for a in 0..soc.n() {
        if soc.qualifies(a, a) {
            g.add_arc(source, a);
        }
    }
    for &a in aminus {
        g.add_arc(a, sink);
    }
    AuxGraph { graph: g, source, sink }
}

/// Qualification graph plus `v* → v` for every individual qualified by
/// everyone. With `merge`, the vertices of `A⁻` are merged into the sink `w`;
/// otherwise `w` is added with arcs `v → w` for `v ∈ A⁻`.
///
/// Fails with [`Error::Precondition`] when someone in `A⁻` is qualified by
/// everyone (such an individual can never be separated from `v*`).
pub fn csr_aux_graph(soc: &Society, aminus: &[usize], merge: bool) -> Result<AuxGraph> {
    let everyone = soc.everyone();
    let consensus = unanimous_set(&everyone, soc);
    let minus = membership(soc.n(), aminus);
    if let Some(&a) = consensus.iter().find(|&&a| minus[a]) {
        return Err(Error::Precondition(format!(
            "{} is in A- and qualified by everyone",
            soc.label(a)
        )));
    }
    let mut g = qualification_graph(soc);
    let source = g.add_vertex(VertexTag::Source);
    for &a in &consensus {
        g.add_arc(source, a);
    }
    if merge {
        let (mut merged, map) = merge_vertices(&g, aminus);
        let sink = merged.len() - 1;
        merged.tags[sink] = VertexTag::Sink;
        Ok(AuxGraph { graph: merged, source: map[source], sink })
    } else {
        let sink = g.add_vertex(VertexTag::Sink);
        for &a in aminus {
            g.add_arc(a, sink);
        }
        Ok(AuxGraph { graph: g, source, sink })
    }
}

/// Merges `group` into one new vertex `w`, appended last.
///
/// Every arc entering the group from outside becomes an arc into `w`, every
/// arc leaving the group becomes an arc out of `w`, the group's vertices are
/// deleted, and arcs inside the group produce no self-loop. Returns the new
/// graph and the old→new index map (group members map to `w`).
pub fn merge_vertices(g: &DiGraph, group: &[usize]) -> (DiGraph, Vec<usize>) {
    assert!(!group.is_empty(), "cannot merge an empty group");
    let inside = membership(g.len(), group);
    let mut map = vec![0; g.len()];
    let mut tags = Vec::new();
    for v in 0..g.len() {
        if !inside[v] {
            map[v] = tags.len();
            tags.push(g.tags[v].clone());
        }
    }
    let w = tags.len();
    tags.push(VertexTag::Merged(g.individuals(group)));
    for &v in group {
        map[v] = w;
    }
    let mut out = DiGraph::new(tags);
    for u in 0..g.len() {
        for &v in &g.adj[u] {
            let (mu, mv) = (map[u], map[v]);
            if inside[u] && inside[v] {
                continue;
            }
            out.add_arc(mu, mv);
        }
    }
    (out, map)
}

/// Minimum set of vertices (excluding source, sink and `forbidden`) whose
/// removal disconnects `sink` from `source`.
///
/// Vertices are split into unit-capacity in/out pairs and a maximum flow is
/// found by breadth-first augmenting paths. The returned cut is canonical:
/// the vertices whose in-node is reachable from the source in the residual
/// graph while their out-node is not. Returns [`Error::Infeasible`] when no
/// such set exists (e.g. a direct source→sink arc).
pub fn min_vertex_separator(
    g: &DiGraph,
    source: usize,
    sink: usize,
    forbidden: &[usize],
) -> Result<Vec<usize>> {
    assert_ne!(source, sink, "source and sink must differ");
    let nv = g.len();
    let blocked = membership(nv, forbidden);
    let cuttable = |v: usize| v != source && v != sink && !blocked[v];
    let big = nv as i64 + 1;

    // Flow network: node 2v = in(v), 2v+1 = out(v).
    let mut net = FlowNet::new(2 * nv);
    for v in 0..nv {
        net.add_edge(2 * v, 2 * v + 1, if cuttable(v) { 1 } else { big });
    }
    for u in 0..nv {
        for &v in g.out_neighbors(u) {
            if u != v {
                net.add_edge(2 * u + 1, 2 * v, big);
            }
        }
    }
    let s = 2 * source + 1;
    let t = 2 * sink;
    let flow = net.max_flow(s, t, big);
    if flow >= big {
        return Err(Error::Infeasible);
    }
    let reach = net.residual_reachable(s);
    let cut: Vec<usize> =
        (0..nv).filter(|&v| cuttable(v) && reach[2 * v] && !reach[2 * v + 1]).collect();
    debug_assert_eq!(cut.len() as i64, flow);
    Ok(cut)
}

struct FlowNet {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
}

impl FlowNet {
    fn new(nodes: usize) -> Self {
        FlowNet { head: vec![Vec::new(); nodes], to: Vec::new(), cap: Vec::new() }
    }

    fn add_edge(&mut self, u: usize, v: usize, c: i64) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    /// Edmonds–Karp; stops early once the flow reaches `limit`.
    fn max_flow(&mut self, s: usize, t: usize, limit: i64) -> i64 {
        let mut flow = 0;
        while flow < limit {
            let mut prev_edge = vec![usize::MAX; self.head.len()];
            let mut seen = vec![false; self.head.len()];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &e in &self.head[u] {
                    let v = self.to[e];
                    if !seen[v] && self.cap[e] > 0 {
                        seen[v] = true;
                        prev_edge[v] = e;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                break;
            }
            let mut bottleneck = limit - flow;
            let mut v = t;
            while v != s {
                let e = prev_edge[v];
                bottleneck = bottleneck.min(self.cap[e]);
                v = self.to[e ^ 1];
            }
            let mut v = t;
            while v != s {
                let e = prev_edge[v];
                self.cap[e] -= bottleneck;
                self.cap[e ^ 1] += bottleneck;
                v = self.to[e ^ 1];
            }
            flow += bottleneck;
        }
        flow
    }

    fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if !seen[v] && self.cap[e] > 0 {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ex1() -> Society {
        Society::from_rows(&[
            vec![1, 1, 1, 1, -1, -1],
            vec![1, 1, -1, 1, -1, -1],
            vec![1, 1, -1, -1, -1, -1],
            vec![1, 1, -1, 1, 1, -1],
            vec![1, 1, 1, -1, 1, -1],
            vec![1, 1, 1, -1, -1, 1],
        ])
        .unwrap()
    }

    fn ex2() -> Society {
        Society::from_rows(&[
            vec![1, -1, -1, 1, 1, -1],
            vec![1, 1, -1, 1, 1, -1],
            vec![1, 1, 1, 1, 1, -1],
            vec![1, 1, 1, -1, -1, 1],
            vec![1, 1, 1, -1, -1, 1],
            vec![1, 1, 1, -1, -1, -1],
        ])
        .unwrap()
    }

    #[test]
    fn qualification_graph_basics() {
        let g = qualification_graph(&ex1());
        assert_eq!(g.out_neighbors(2), &[0, 1]);
        assert_eq!(qualification_graph(&Society::uniform(3, false)).arc_count(), 0);
        let full = qualification_graph(&Society::uniform(2, true));
        assert_eq!(full.arc_count(), 4);
        assert!(full.has_arc(0, 0) && full.has_arc(1, 1));
    }

    #[test]
    fn lsr_aux_graph_arcs() {
        let soc = Society::from_fn(3, |i, j| i == 0 && j == 0);
        let aux = lsr_aux_graph(&soc, &[1]);
        assert!(aux.graph.has_arc(aux.source, 0));
        assert!(aux.graph.has_arc(1, aux.sink));
        let all = lsr_aux_graph(&soc, &[0, 1, 2]);
        assert!((0..3).all(|v| all.graph.has_arc(v, all.sink)));
        let e = lsr_aux_graph(&ex1(), &[2]);
        assert_eq!(e.graph.out_neighbors(e.source), &[0, 1, 3, 4, 5]);
    }

    #[test]
    fn csr_aux_graph_on_counterexample() {
        let aux = csr_aux_graph(&ex2(), &[5], true).unwrap();
        assert_eq!(aux.graph.individuals(aux.graph.out_neighbors(aux.source)), vec![0]);
        let sep = min_vertex_separator(&aux.graph, aux.source, aux.sink, &[]).unwrap();
        assert_eq!(aux.graph.individuals(&sep), vec![0]);

        // After deleting a1 only a2 is qualified by everyone.
        let rest = ex2().restrict(&[1, 2, 3, 4, 5]);
        let aux = csr_aux_graph(&rest, &[4], true).unwrap();
        assert_eq!(aux.graph.out_neighbors(aux.source).len(), 1);
        assert_eq!(aux.graph.tag(aux.graph.out_neighbors(aux.source)[0]), &VertexTag::Individual(0));

        let bad = Society::uniform(2, true);
        assert!(csr_aux_graph(&bad, &[1], true).is_err());
    }

    #[test]
    fn merging() {
        // 2-cycle {0,1} with external in-neighbour 2.
        let mut g = DiGraph::new((0..3).map(VertexTag::Individual).collect());
        g.add_arc(0, 1);
        g.add_arc(1, 0);
        g.add_arc(2, 0);
        let (m, map) = merge_vertices(&g, &[0, 1]);
        assert_eq!(m.len(), 2);
        assert!(m.has_arc(map[2], map[0]));
        assert!(!m.has_arc(map[0], map[0]));

        let (single, _) = merge_vertices(&g, &[2]);
        assert_eq!(single.arc_count(), g.arc_count());

        let q = qualification_graph(&ex2());
        let (m, map) = merge_vertices(&q, &[3, 4]);
        let w = map[3];
        assert_eq!(m.individuals(m.out_neighbors(w)), vec![0, 1, 2, 5]);
    }

    #[test]
    fn disconnected_needs_no_separator() {
        let mut g = DiGraph::new(vec![VertexTag::Source, VertexTag::Individual(0), VertexTag::Sink]);
        g.add_arc(0, 1);
        assert_eq!(min_vertex_separator(&g, 0, 2, &[]).unwrap(), Vec::<usize>::new());
        g.add_arc(0, 2);
        assert_eq!(min_vertex_separator(&g, 0, 2, &[]), Err(Error::Infeasible));
    }

    fn brute_min_separator(g: &DiGraph, s: usize, t: usize, forbidden: &[usize]) -> Option<usize> {
        let cand: Vec<usize> = (0..g.len()).filter(|&v| v != s && v != t && !forbidden.contains(&v)).collect();
        let mut best = None;
        for mask in 0u32..(1 << cand.len()) {
            let mut blocked = vec![false; g.len()];
            for (k, &v) in cand.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    blocked[v] = true;
                }
            }
            if !g.reaches(s, t, &blocked) {
                let size = mask.count_ones() as usize;
                best = Some(best.map_or(size, |b: usize| b.min(size)));
            }
        }
        best
    }

    proptest! {
        #[test]
        fn separator_is_minimum(n in 3usize..9, arcs in proptest::collection::vec((0usize..8, 0usize..8), 0..30), forb in proptest::collection::vec(0usize..8, 0..2)) {
            let mut g = DiGraph::new((0..n).map(VertexTag::Individual).collect());
            for (u, v) in arcs {
                if u < n && v < n {
                    g.add_arc(u, v);
                }
            }
            let forbidden: Vec<usize> = forb.into_iter().filter(|&v| v < n && v != 0 && v != n - 1).collect();
            let expected = brute_min_separator(&g, 0, n - 1, &forbidden);
            match min_vertex_separator(&g, 0, n - 1, &forbidden) {
                Ok(sep) => {
                    prop_assert_eq!(Some(sep.len()), expected);
                    let mut blocked = membership(n, &sep);
                    prop_assert!(!g.reaches(0, n - 1, &blocked));
                    for &v in &sep {
                        blocked[v] = false;
                        prop_assert!(g.reaches(0, n - 1, &blocked));
                        blocked[v] = true;
                    }
                }
                Err(Error::Infeasible) => prop_assert_eq!(expected, None),
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}
