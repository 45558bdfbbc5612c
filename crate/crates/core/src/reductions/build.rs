//! The constructions behind [`super::Theorem`] and their witness maps.

use std::collections::{BTreeMap, BTreeSet};

use super::{ReductionOutput, SourceCertificate, SourceProblem, Theorem};
use crate::error::{Error, Result};
use crate::model::{AttackInstance, Kind, Prices, RuleId, Society, Solution};

/// Where the construction put the individuals the witness maps need.
#[derive(Clone, Debug, Default)]
pub(super) struct Layout {
    /// CNF: literal individuals per variable.
    pos: Vec<usize>,
    neg: Vec<usize>,
    /// CNF: the `d` individuals of each variable gadget.
    var_d: Vec<Vec<usize>>,
    /// CNF: `a*`; set-family microbribery: the individual `d`.
    star: usize,
    /// Sets (after preprocessing): origin in the source family.
    set_origin: Vec<Option<usize>>,
    /// Sets: the main set individual `a_F`.
    set_main: Vec<usize>,
    /// Sets: the individual the attack acts on (`ã_F`, or `a_F^{k+1}`).
    set_tilde: Vec<usize>,
    /// Sets: elements covered by each internal set.
    set_elements: Vec<Vec<usize>>,
    /// Graphs: individual per (kept) vertex, and its source id.
    vertex_ind: Vec<usize>,
    vertex_origin: Vec<usize>,
    /// Graphs: padding dummies per vertex.
    vertex_dummies: Vec<Vec<usize>>,
    /// Graphs: adjacency over kept vertices, and incident edge individuals.
    adjacency: Vec<Vec<usize>>,
    incident: Vec<Vec<usize>>,
    /// Source vertices dropped before the construction (isolated).
    dropped: Vec<usize>,
    /// Further individuals the forward map also deletes, bribes or flips.
    extra: Vec<usize>,
}

/// Incrementally numbered society with labels; entries default to −1.
struct Builder {
    labels: Vec<String>,
    rows: Vec<Vec<bool>>,
}

impl Builder {
    fn new() -> Self {
        Builder { labels: Vec::new(), rows: Vec::new() }
    }

    fn add(&mut self, label: impl Into<String>) -> usize {
        for r in &mut self.rows {
            r.push(false);
        }
        self.labels.push(label.into());
        let n = self.labels.len();
        self.rows.push(vec![false; n]);
        n - 1
    }

    fn n(&self) -> usize {
        self.labels.len()
    }

    fn set(&mut self, i: usize, j: usize, v: bool) {
        self.rows[i][j] = v;
    }

    fn q(&mut self, i: usize, j: usize) {
        self.rows[i][j] = true;
    }

    /// `i` qualifies everyone (itself included).
    fn all(&mut self, i: usize) {
        self.rows[i].iter_mut().for_each(|e| *e = true);
    }

    /// Everyone qualifies `j`.
    fn all_qualify(&mut self, j: usize) {
        for r in &mut self.rows {
            r[j] = true;
        }
    }

    fn society(self) -> Society {
        let rows = self.rows;
        Society::from_fn(rows.len(), |i, j| rows[i][j]).with_labels(self.labels)
    }
}

/// Set family after preprocessing, remembering where each set came from.
struct Family {
    universe: usize,
    sets: Vec<Vec<usize>>,
    origin: Vec<Option<usize>>,
    k: usize,
}

impl Family {
    fn new(universe: usize, family: &[Vec<usize>], k: usize) -> Self {
        Family { universe, sets: family.to_vec(), origin: (0..family.len()).map(Some).collect(), k }
    }

    /// Ensures `|F| > k`: a cover never needs more than `|F|` sets, so when
    /// `k ≥ |F|` an empty set is appended and `k` lowered to the old `|F|`.
    fn pad_above_k(&mut self, notes: &mut Vec<String>) {
        if self.k >= self.sets.len() {
            let m = self.sets.len();
            self.sets.push(Vec::new());
            self.origin.push(None);
            notes.push(format!("appended an empty set and lowered k from {} to {m} so that |F| > k", self.k));
            self.k = m;
        }
    }

    /// Ensures the last set is empty (moving an existing empty set there, or
    /// appending one) and then `|F| > k`.
    fn empty_last_above_k(&mut self, notes: &mut Vec<String>) {
        if self.sets.last().is_none_or(|s| !s.is_empty()) {
            if let Some(p) = self.sets.iter().position(Vec::is_empty) {
                let s = self.sets.remove(p);
                let o = self.origin.remove(p);
                self.sets.push(s);
                self.origin.push(o);
                notes.push(format!("moved the empty set {p} to the end of the family"));
            } else {
                self.sets.push(Vec::new());
                self.origin.push(None);
                notes.push("appended an empty set to the end of the family".into());
            }
        }
        let m = self.sets.len();
        if self.k >= m {
            notes.push(format!("lowered k from {} to {} so that |F| > k", self.k, m - 1));
            self.k = m - 1;
        }
    }
}

fn element_labels(b: &mut Builder, universe: usize) -> Vec<usize> {
    (0..universe).map(|x| b.add(format!("x{x}"))).collect()
}

pub(super) fn construct(
    th: Theorem,
    source: &SourceProblem,
    rule: RuleId,
) -> Result<(AttackInstance, Layout, Vec<String>)> {
    let mut notes = Vec::new();
    let (inst, layout) = match source {
        SourceProblem::CnfSat { variables, clauses } => cnf(th, *variables, clauses, rule),
        SourceProblem::VertexCover { vertices, edges, k } => vertex_cover(th, *vertices, edges, *k, rule),
        SourceProblem::IndependentSet { vertices, edges, k } => {
            independent_set(*vertices, edges, *k, rule, &mut notes)?
        }
        SourceProblem::Rx3c { universe, family } => match th {
            Theorem::RegcdiRx3c => rx3c_delete(*universe, family, rule),
            _ => rx3c_micro(th, *universe, family, rule),
        },
        SourceProblem::SetCover { universe, family, k } => {
            let mut fam = Family::new(*universe, family, *k);
            match th {
                Theorem::IcDgcai | Theorem::IcCgcai | Theorem::TwoIcEgcai | Theorem::IcEgcai => {
                    set_cover_add(th, &fam, rule)
                }
                Theorem::IcCgcdi | Theorem::IcGcdi => {
                    fam.pad_above_k(&mut notes);
                    chain_delete(th, &fam, rule)
                }
                Theorem::IcDgcdi | Theorem::TwoIcGcdi => tilde_delete(th, &fam, rule),
                Theorem::IcCgb | Theorem::IcGb | Theorem::IcCgmb => {
                    fam.empty_last_above_k(&mut notes);
                    copies(th, &fam, rule)
                }
                Theorem::TwoLicDgb | Theorem::TwoIcEgb => {
                    if th == Theorem::TwoIcEgb {
                        fam.pad_above_k(&mut notes);
                    }
                    priced_bribery(th, &fam, rule)
                }
                _ => unreachable!("source kind checked by the caller"),
            }
        }
    };
    Ok((inst, layout, notes))
}

// ---------------------------------------------------------------- CNF-SAT

fn cnf(th: Theorem, vars: usize, clauses: &[Vec<i64>], rule: RuleId) -> (AttackInstance, Layout) {
    let micro = th == Theorem::GmbProt;
    let mut b = Builder::new();
    let mut lay = Layout::default();
    let mut qs: Vec<Vec<usize>> = Vec::new();
    let mut dx: Vec<usize> = Vec::new();
    for v in 1..=vars {
        lay.pos.push(b.add(format!("x{v}")));
        lay.neg.push(b.add(format!("~x{v}")));
        if micro {
            qs.push(vec![b.add(format!("q1_x{v}")), b.add(format!("q2_x{v}"))]);
        } else {
            qs.push(vec![b.add(format!("q_x{v}"))]);
        }
        let dcount = if micro { 2 } else { 4 };
        lay.var_d.push((1..=dcount).map(|i| b.add(format!("d{i}_x{v}"))).collect());
        if th == Theorem::CsrGcdiProt {
            dx.push(b.add(format!("d_x{v}")));
        }
    }
    let cl: Vec<usize> = (1..=clauses.len()).map(|c| b.add(format!("c{c}"))).collect();
    let star = b.add("a*");
    let star2 = (th == Theorem::CsrRgcdi).then(|| b.add("a**"));
    lay.star = star;
    let n = b.n();
    for i in 0..n {
        if Some(i) != star2 {
            b.q(i, star);
        }
    }
    if let Some(s2) = star2 {
        b.all_qualify(s2);
        lay.extra.push(s2);
    }
    for x in 0..vars {
        let (p, m) = (lay.pos[x], lay.neg[x]);
        b.q(star, p);
        b.q(star, m);
        for &q in &qs[x] {
            b.q(p, q);
            b.q(m, q);
        }
        let d = &lay.var_d[x];
        if micro {
            for &di in d {
                b.q(p, di);
                b.q(m, di);
            }
        } else {
            b.q(p, d[0]);
            b.q(p, d[1]);
            b.q(m, d[2]);
            b.q(m, d[3]);
        }
        if let Some(&dxx) = dx.get(x) {
            for &di in d {
                b.q(di, dxx);
            }
        }
    }
    for (c, clause) in clauses.iter().enumerate() {
        for &lit in clause {
            let v = lit.unsigned_abs() as usize - 1;
            let src = if lit > 0 { lay.pos[v] } else { lay.neg[v] };
            b.q(src, cl[c]);
        }
    }
    let mut aplus: Vec<usize> = vec![star];
    aplus.extend(&cl);
    aplus.extend(qs.iter().flatten());
    let (kind, aminus, budget) = match th {
        Theorem::GmbProt => (Kind::Microbribery, lay.var_d.iter().flatten().copied().collect(), 3 * vars),
        Theorem::CsrRgcdi => {
            let mut am: Vec<usize> = lay.var_d.iter().flatten().copied().collect();
            am.extend(star2);
            (Kind::RelaxedDeleteIndividuals, am, 3 * vars + 1)
        }
        _ => (Kind::DeleteIndividuals, dx, 3 * vars),
    };
    let inst = AttackInstance::new(b.society(), rule, kind, aplus, aminus, budget as u64);
    (inst, lay)
}

// ---------------------------------------------------------------- graphs

fn vertex_cover(th: Theorem, vertices: usize, edges: &[[usize; 2]], k: usize, rule: RuleId) -> (AttackInstance, Layout) {
    let s = match rule {
        RuleId::Consent { s, .. } => s,
        _ => unreachable!("rule checked by the caller"),
    };
    let mut b = Builder::new();
    let mut lay = Layout::default();
    lay.vertex_ind = (0..vertices).map(|v| b.add(format!("v{v}"))).collect();
    lay.vertex_origin = (0..vertices).collect();
    lay.adjacency = vec![Vec::new(); vertices];
    for &[u, v] in edges {
        lay.adjacency[u].push(v);
        lay.adjacency[v].push(u);
    }
    lay.vertex_dummies = (0..vertices)
        .map(|v| (1..=s.saturating_sub(2)).map(|i| b.add(format!("d{i}_v{v}"))).collect())
        .collect();
    let mut dq = Vec::new();
    let mut q = None;
    if th == Theorem::FstRegcdi {
        let t = match rule {
            RuleId::Consent { t, .. } => t,
            _ => unreachable!(),
        };
        dq = (1..t).map(|i| b.add(format!("dq{i}"))).collect();
        q = Some(b.add("q"));
    }
    for v in 0..vertices {
        let a = lay.vertex_ind[v];
        b.q(a, a);
        for &u in &lay.adjacency[v] {
            b.q(a, lay.vertex_ind[u]);
        }
        for &d in &lay.vertex_dummies[v] {
            b.q(d, d);
            b.q(d, a);
        }
    }
    let originals: Vec<usize> = lay.vertex_ind.iter().chain(lay.vertex_dummies.iter().flatten()).copied().collect();
    let inst = match q {
        None => AttackInstance::new(b.society(), rule, Kind::RelaxedDeleteIndividuals, vec![], originals, k as u64),
        Some(q) => {
            for &i in &originals {
                b.q(i, q);
            }
            lay.extra.push(dq[0]);
            let mut aminus = originals;
            aminus.extend(&dq);
            AttackInstance::new(b.society(), rule, Kind::RelaxedDeleteIndividuals, vec![q], aminus, k as u64 + 1)
        }
    };
    (inst, lay)
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

fn independent_set(
    vertices: usize,
    edges: &[[usize; 2]],
    k: usize,
    rule: RuleId,
    notes: &mut Vec<String>,
) -> Result<(AttackInstance, Layout)> {
    if edges.is_empty() {
        return Err(Error::InvalidSource(
            "the independent-set reduction needs at least one edge (edgeless graphs are trivially YES)".into(),
        ));
    }
    let mut degree = vec![0u64; vertices];
    for &[u, v] in edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    let mut lay = Layout::default();
    lay.dropped = (0..vertices).filter(|&v| degree[v] == 0).collect();
    let k = k.saturating_sub(lay.dropped.len());
    if !lay.dropped.is_empty() {
        notes.push(format!("removed isolated vertices {:?} and lowered k to {k}", lay.dropped));
    }
    lay.vertex_origin = (0..vertices).filter(|&v| degree[v] > 0).collect();
    let mut internal = vec![usize::MAX; vertices];
    for (i, &v) in lay.vertex_origin.iter().enumerate() {
        internal[v] = i;
    }
    let nv = lay.vertex_origin.len();
    let mut b = Builder::new();
    lay.vertex_ind = lay.vertex_origin.iter().map(|v| b.add(format!("v{v}"))).collect();
    let edge_ind: Vec<usize> = edges.iter().map(|[u, v]| b.add(format!("e{u}-{v}"))).collect();
    let star = b.add("a*");
    let q = b.add("q");
    lay.incident = vec![Vec::new(); nv];
    for (e, &[u, v]) in edges.iter().enumerate() {
        lay.incident[internal[u]].push(edge_ind[e]);
        lay.incident[internal[v]].push(edge_ind[e]);
    }
    b.all(star);
    b.all(q);
    for i in 0..nv {
        let a = lay.vertex_ind[i];
        b.all(a);
        for &e in &lay.incident[i] {
            b.set(a, e, false);
        }
    }
    for &e in &edge_ind {
        b.all(e);
        b.set(e, q, false);
    }
    let d = lay.vertex_origin.iter().map(|&v| degree[v]).fold(1, lcm);
    let budget = (nv as u64 * (d + 1)).saturating_sub(k as u64);
    let n = b.n();
    let mut prices = vec![vec![budget + 1; n]; n];
    for i in 0..nv {
        let a = lay.vertex_ind[i];
        prices[a][a] = d + 1;
        let deg = lay.incident[i].len() as u64;
        for &e in &lay.incident[i] {
            prices[a][e] = d / deg;
        }
    }
    let mut aplus = edge_ind;
    aplus.push(q);
    let inst = AttackInstance::new(b.society(), rule, Kind::Microbribery, aplus, vec![], budget)
        .with_prices(Prices::PerEntry(prices));
    Ok((inst, lay))
}

// ---------------------------------------------------------------- RX3C

fn rx3c_delete(universe: usize, family: &[Vec<usize>], rule: RuleId) -> (AttackInstance, Layout) {
    let t = match rule {
        RuleId::Consent { t, .. } => t,
        _ => unreachable!("rule checked by the caller"),
    };
    let m = universe / 3;
    let mut b = Builder::new();
    let mut lay = Layout::default();
    let xs = element_labels(&mut b, universe);
    lay.set_main = (0..family.len()).map(|i| b.add(format!("S{i}"))).collect();
    lay.set_origin = (0..family.len()).map(Some).collect();
    lay.set_elements = family.to_vec();
    let ds: Vec<usize> = (1..=t - 3).map(|i| b.add(format!("d{i}"))).collect();
    let d = b.add("d");
    lay.extra.push(d);
    for &x in &xs {
        b.all(x);
        b.set(x, x, false);
        for &f in &lay.set_main {
            b.set(x, f, false);
        }
    }
    for (i, set) in family.iter().enumerate() {
        let f = lay.set_main[i];
        for (x, &a) in xs.iter().enumerate() {
            if !set.contains(&x) {
                b.q(f, a);
            }
        }
    }
    for &di in &ds {
        b.q(di, di);
    }
    b.q(d, d);
    for &x in &xs {
        b.q(d, x);
    }
    let mut aplus = xs;
    aplus.extend(&ds);
    let mut aminus = lay.set_main.clone();
    aminus.push(d);
    let inst = AttackInstance::new(b.society(), rule, Kind::RelaxedDeleteIndividuals, aplus, aminus, 2 * m as u64 + 1);
    (inst, lay)
}

fn rx3c_micro(th: Theorem, universe: usize, family: &[Vec<usize>], rule: RuleId) -> (AttackInstance, Layout) {
    let m = universe / 3;
    let mut b = Builder::new();
    let mut lay = Layout::default();
    let xs = element_labels(&mut b, universe);
    lay.set_main = (0..family.len()).map(|i| b.add(format!("S{i}"))).collect();
    lay.set_origin = (0..family.len()).map(Some).collect();
    lay.set_elements = family.to_vec();
    let ds: Vec<usize> = (1..=m + 1).map(|i| b.add(format!("d{i}"))).collect();
    let d = b.add("d");
    lay.star = d;
    for &x in xs.iter().chain(&ds) {
        b.all(x);
    }
    for (i, set) in family.iter().enumerate() {
        let f = lay.set_main[i];
        b.all(f);
        for &x in set {
            b.set(f, xs[x], false);
        }
    }
    b.all(d);
    b.set(d, d, false);
    for &f in &lay.set_main {
        b.set(d, f, false);
    }
    let inst = if th == Theorem::IcEgmb {
        b.set(ds[0], ds[0], false);
        lay.extra.push(ds[0]);
        let mut aplus = ds;
        aplus.extend(&lay.set_main);
        let mut aminus = xs;
        aminus.push(d);
        AttackInstance::new(b.society(), rule, Kind::Microbribery, aplus, aminus, m as u64 + 1)
    } else {
        AttackInstance::new(b.society(), rule, Kind::Microbribery, vec![], xs, m as u64)
    };
    (inst, lay)
}

// ---------------------------------------------------------------- Set Cover

fn record_sets(lay: &mut Layout, fam: &Family) {
    lay.set_origin = fam.origin.clone();
    lay.set_elements = fam.sets.clone();
}

fn set_cover_add(th: Theorem, fam: &Family, rule: RuleId) -> (AttackInstance, Layout) {
    let mut b = Builder::new();
    let mut lay = Layout::default();
    record_sets(&mut lay, fam);
    let xs = element_labels(&mut b, fam.universe);
    lay.set_main = (0..fam.sets.len()).map(|i| b.add(format!("S{i}"))).collect();
    let qs: Vec<usize> = match th {
        Theorem::IcDgcai => vec![],
        Theorem::IcEgcai => (1..=3).map(|i| b.add(format!("q{i}"))).collect(),
        _ => vec![b.add("q1")],
    };
    for &x in &xs {
        b.all(x);
    }
    for (i, set) in fam.sets.iter().enumerate() {
        let f = lay.set_main[i];
        b.all(f);
        for &x in set {
            b.set(f, xs[x], false);
        }
    }
    if th == Theorem::IcEgcai {
        let (q1, q2, q3) = (qs[0], qs[1], qs[2]);
        for q in [q1, q2] {
            b.all(q);
            for &x in &xs {
                b.set(q, x, false);
            }
        }
        b.all(q3);
        b.set(q3, q1, false);
        b.set(q3, q2, false);
        for &f in &lay.set_main {
            b.set(f, q2, false);
            b.set(f, q3, false);
        }
        for &x in &xs {
            b.set(x, q1, false);
            b.set(x, q2, false);
        }
    } else if let Some(&q1) = qs.first() {
        b.all(q1);
        for &x in &xs {
            b.set(x, q1, false);
        }
    }
    let mut initial = xs.clone();
    initial.extend(&qs);
    let aminus = if th == Theorem::IcCgcai { vec![] } else { xs };
    let inst = AttackInstance::new(b.society(), rule, Kind::AddIndividuals, qs, aminus, fam.k as u64)
        .with_initial(initial);
    (inst, lay)
}

fn chain_delete(th: Theorem, fam: &Family, rule: RuleId) -> (AttackInstance, Layout) {
    let mut b = Builder::new();
    let mut lay = Layout::default();
    record_sets(&mut lay, fam);
    let m = fam.sets.len();
    let xs = element_labels(&mut b, fam.universe);
    lay.set_main = (0..m).map(|i| b.add(format!("S{i}"))).collect();
    lay.set_tilde = (0..m).map(|i| b.add(format!("S{i}'"))).collect();
    let star = b.add("a*");
    let z = b.add("z*");
    let ds = if th == Theorem::IcGcdi { vec![b.add("d1"), b.add("d2")] } else { vec![] };
    let n = b.n();
    for i in 0..n {
        b.q(i, i);
        b.q(i, star);
    }
    for &x in &xs {
        b.all(x);
    }
    b.q(star, lay.set_main[0]);
    b.q(star, lay.set_tilde[0]);
    for i in 0..m {
        let next: Vec<usize> = if i + 1 < m { vec![lay.set_main[i + 1], lay.set_tilde[i + 1]] } else { vec![z] };
        for src in [lay.set_main[i], lay.set_tilde[i]] {
            for &j in &next {
                b.q(src, j);
            }
        }
        for &x in &fam.sets[i] {
            b.q(lay.set_main[i], xs[x]);
        }
    }
    let all: Vec<usize> = (0..n).collect();
    let mut aplus: Vec<usize> = all.iter().copied().filter(|i| !lay.set_tilde.contains(i)).collect();
    let inst = if let [d1, d2] = ds[..] {
        // d1 is qualified only by z*, N_X and itself; d2 only by d1 and itself.
        for &x in &xs {
            b.set(x, d2, false);
        }
        b.q(d1, d2);
        b.q(z, d1);
        aplus.retain(|&i| i != d1 && i != d2);
        lay.extra.push(d1);
        AttackInstance::new(b.society(), rule, Kind::DeleteIndividuals, aplus, vec![d2], fam.k as u64 + 1)
    } else {
        AttackInstance::new(b.society(), rule, Kind::DeleteIndividuals, aplus, vec![], fam.k as u64)
    };
    (inst, lay)
}

fn tilde_delete(th: Theorem, fam: &Family, rule: RuleId) -> (AttackInstance, Layout) {
    let mut b = Builder::new();
    let mut lay = Layout::default();
    record_sets(&mut lay, fam);
    let m = fam.sets.len();
    let xs = element_labels(&mut b, fam.universe);
    lay.set_main = (0..m).map(|i| b.add(format!("S{i}"))).collect();
    lay.set_tilde = (0..m).map(|i| b.add(format!("S{i}'"))).collect();
    let qs = if th == Theorem::TwoIcGcdi { vec![b.add("q1"), b.add("q2")] } else { vec![] };
    for &x in &xs {
        b.all(x);
    }
    for i in 0..m {
        let (f, t) = (lay.set_main[i], lay.set_tilde[i]);
        b.all(f);
        for &x in &fam.sets[i] {
            b.set(f, xs[x], false);
        }
        b.all(t);
        b.set(t, f, false);
    }
    let inst = if let [q1, q2] = qs[..] {
        b.all(q1);
        b.all(q2);
        b.set(q2, q1, false);
        lay.extra.push(q2);
        AttackInstance::new(b.society(), rule, Kind::DeleteIndividuals, vec![q1], xs, fam.k as u64 + 1)
    } else {
        AttackInstance::new(b.society(), rule, Kind::DeleteIndividuals, vec![], xs, fam.k as u64)
    };
    (inst, lay)
}

fn copies(th: Theorem, fam: &Family, rule: RuleId) -> (AttackInstance, Layout) {
    let mut b = Builder::new();
    let mut lay = Layout::default();
    record_sets(&mut lay, fam);
    let (m, k) = (fam.sets.len(), fam.k);
    let xs = element_labels(&mut b, fam.universe);
    let groups: Vec<Vec<usize>> =
        (0..m).map(|i| (1..=k + 1).map(|j| b.add(format!("S{i}^{j}"))).collect()).collect();
    let stars: Vec<usize> = (1..=k + 1).map(|j| b.add(format!("a*^{j}"))).collect();
    let d = (th == Theorem::IcGb).then(|| b.add("d"));
    lay.set_tilde = groups.iter().map(|g| g[k]).collect();
    let n = b.n();
    for i in 0..n {
        b.q(i, i);
        for &s in &stars {
            b.q(i, s);
        }
    }
    for &x in &xs {
        b.all(x);
    }
    for &s in &stars {
        for &g in &groups[0] {
            b.q(s, g);
        }
    }
    for i in 0..m {
        for &src in &groups[i] {
            if i + 1 < m {
                for &dst in &groups[i + 1] {
                    b.q(src, dst);
                }
            }
        }
        for &src in &groups[i][..k] {
            for &x in &fam.sets[i] {
                b.q(src, xs[x]);
            }
        }
    }
    let everyone: Vec<usize> = (0..n).collect();
    let inst = match th {
        Theorem::IcGb => {
            let d = d.expect("d exists for the exact variant");
            for &x in &xs {
                b.q(x, d);
            }
            for &g in &groups[m - 1] {
                b.q(g, d);
            }
            // d qualifies itself and the a* column only; everyone else
            // except N_X and the last group disqualifies d (already −1).
            lay.extra.push(d);
            let aplus: Vec<usize> = everyone.iter().copied().filter(|&i| i != d).collect();
            AttackInstance::new(b.society(), rule, Kind::Bribery, aplus, vec![d], k as u64 + 1)
        }
        Theorem::IcCgmb => {
            let aplus: Vec<usize> = everyone.iter().copied().filter(|i| !lay.set_tilde.contains(i)).collect();
            AttackInstance::new(b.society(), rule, Kind::Microbribery, aplus, vec![], k as u64)
        }
        _ => AttackInstance::new(b.society(), rule, Kind::Bribery, everyone, vec![], k as u64),
    };
    (inst, lay)
}

fn priced_bribery(th: Theorem, fam: &Family, rule: RuleId) -> (AttackInstance, Layout) {
    let mut b = Builder::new();
    let mut lay = Layout::default();
    record_sets(&mut lay, fam);
    let (m, k) = (fam.sets.len(), fam.k as u64);
    let xs = element_labels(&mut b, fam.universe);
    lay.set_main = (0..m).map(|i| b.add(format!("S{i}"))).collect();
    lay.set_tilde = (0..m).map(|i| b.add(format!("S{i}'"))).collect();
    let specials = if th == Theorem::TwoIcEgb { vec![b.add("a*"), b.add("q")] } else { vec![] };
    for &x in &xs {
        b.all(x);
    }
    for i in 0..m {
        let (f, t) = (lay.set_main[i], lay.set_tilde[i]);
        b.all(f);
        for &x in &fam.sets[i] {
            b.set(f, xs[x], false);
        }
        b.all(t);
        b.set(t, f, false);
        b.set(t, t, false);
    }
    let n = b.n();
    let mut prices = vec![k + 1; n];
    for &t in &lay.set_tilde {
        prices[t] = 1;
    }
    let inst = if let [star, q] = specials[..] {
        b.all(star);
        b.all_qualify(star);
        b.all(q);
        b.set(q, q, false);
        for &t in &lay.set_tilde {
            b.set(t, q, false);
        }
        prices[q] = 1;
        lay.extra.push(q);
        let mut aplus = vec![star, q];
        aplus.extend(&lay.set_main);
        let aminus: Vec<usize> = (0..n).filter(|i| !aplus.contains(i)).collect();
        AttackInstance::new(b.society(), rule, Kind::Bribery, aplus, aminus, k + 1)
    } else {
        let mut aminus = lay.set_tilde.clone();
        aminus.extend(&xs);
        AttackInstance::new(b.society(), rule, Kind::Bribery, vec![], aminus, k)
    };
    (inst.with_prices(Prices::PerIndividual(prices)), lay)
}

// ---------------------------------------------------------------- maps

fn internal_sets(lay: &Layout, sel: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    for (i, o) in lay.set_origin.iter().enumerate() {
        if let Some(o) = o {
            map.entry(*o).or_insert(i);
        }
    }
    sel.iter().map(|s| map[s]).collect()
}

fn bribed_row(soc: &Society, i: usize, changes: &[(usize, bool)]) -> Vec<bool> {
    let mut row = soc.row(i).to_vec();
    for &(j, v) in changes {
        row[j] = v;
    }
    row
}

pub(super) fn forward(out: &ReductionOutput, cert: &SourceCertificate) -> Result<Solution> {
    use Theorem::*;
    let lay = &out.layout;
    let soc = &out.instance.society;
    let sel: &[usize] = match cert {
        SourceCertificate::Selection(s) => s,
        SourceCertificate::Assignment(_) => &[],
    };
    let sorted = |mut v: Vec<usize>| {
        v.sort_unstable();
        v.dedup();
        v
    };
    Ok(match out.theorem {
        GmbProt => {
            let SourceCertificate::Assignment(a) = cert else { unreachable!() };
            let mut flips = Vec::new();
            for (x, &val) in a.iter().enumerate() {
                let (keep, drop) = if val { (lay.pos[x], lay.neg[x]) } else { (lay.neg[x], lay.pos[x]) };
                flips.push((lay.star, drop));
                for &d in &lay.var_d[x] {
                    flips.push((keep, d));
                }
            }
            flips.sort_unstable();
            Solution::Microbribe(flips)
        }
        CsrRgcdi | CsrGcdiProt => {
            let SourceCertificate::Assignment(a) = cert else { unreachable!() };
            let mut u = lay.extra.clone();
            for (x, &val) in a.iter().enumerate() {
                let d = &lay.var_d[x];
                if val {
                    u.extend([lay.neg[x], d[0], d[1]]);
                } else {
                    u.extend([lay.pos[x], d[2], d[3]]);
                }
            }
            Solution::DeleteSet(sorted(u))
        }
        RdgcdiVc | FstRegcdi => {
            let mut u: Vec<usize> = sel.iter().map(|&v| lay.vertex_ind[v]).collect();
            u.extend(&lay.extra);
            Solution::DeleteSet(sorted(u))
        }
        RegcdiRx3c => {
            let chosen: BTreeSet<usize> = sel.iter().copied().collect();
            let mut u: Vec<usize> =
                (0..lay.set_main.len()).filter(|i| !chosen.contains(i)).map(|i| lay.set_main[i]).collect();
            u.extend(&lay.extra);
            Solution::DeleteSet(sorted(u))
        }
        IcDgcai | IcCgcai | TwoIcEgcai | IcEgcai => {
            Solution::AddSet(sorted(internal_sets(lay, sel).into_iter().map(|i| lay.set_main[i]).collect()))
        }
        IcCgcdi | IcGcdi | IcDgcdi | TwoIcGcdi => {
            let mut u: Vec<usize> = internal_sets(lay, sel).into_iter().map(|i| lay.set_tilde[i]).collect();
            u.extend(&lay.extra);
            Solution::DeleteSet(sorted(u))
        }
        IcCgb | IcGb => {
            let mut rows = BTreeMap::new();
            for i in internal_sets(lay, sel) {
                let t = lay.set_tilde[i];
                let changes: Vec<(usize, bool)> = lay.set_elements[i].iter().map(|&x| (x, true)).collect();
                rows.insert(t, bribed_row(soc, t, &changes));
            }
            for &d in &lay.extra {
                rows.insert(d, bribed_row(soc, d, &[(d, false)]));
            }
            Solution::Bribe(rows)
        }
        TwoLicDgb | TwoIcEgb => {
            let mut rows = BTreeMap::new();
            for i in internal_sets(lay, sel) {
                let t = lay.set_tilde[i];
                rows.insert(t, bribed_row(soc, t, &[(lay.set_main[i], true)]));
            }
            for &q in &lay.extra {
                rows.insert(q, bribed_row(soc, q, &[(q, true)]));
            }
            Solution::Bribe(rows)
        }
        IcCgmb => {
            let flips = internal_sets(lay, sel).into_iter().map(|i| (lay.set_tilde[i], lay.set_tilde[i])).collect();
            Solution::Microbribe(sorted_pairs(flips))
        }
        TwoIcCgmb => {
            let SourceCertificate::Selection(s) = cert else { unreachable!() };
            let chosen: BTreeSet<usize> = s.iter().copied().collect();
            let mut flips = Vec::new();
            for (i, v) in lay.vertex_origin.iter().enumerate() {
                let a = lay.vertex_ind[i];
                if chosen.contains(v) {
                    flips.extend(lay.incident[i].iter().map(|&e| (a, e)));
                } else {
                    flips.push((a, a));
                }
            }
            Solution::Microbribe(sorted_pairs(flips))
        }
        IcDgmb | IcEgmb => {
            let mut flips: Vec<(usize, usize)> = sel.iter().map(|&i| (lay.star, lay.set_main[i])).collect();
            flips.extend(lay.extra.iter().map(|&d| (d, d)));
            Solution::Microbribe(sorted_pairs(flips))
        }
    })
}

fn sorted_pairs(mut v: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    v.sort_unstable();
    v.dedup();
    v
}

fn expect_kind<'a>(sol: &'a Solution, want: &str) -> Result<&'a Solution> {
    if sol.kind_name() == want {
        Ok(sol)
    } else {
        Err(Error::Precondition(format!("expected a {want} solution, got {}", sol.kind_name())))
    }
}

/// Internal set indices → ascending source family indices (padding dropped).
fn origin_selection(lay: &Layout, internal: impl IntoIterator<Item = usize>) -> SourceCertificate {
    let chosen: BTreeSet<usize> = internal.into_iter().filter_map(|i| lay.set_origin[i]).collect();
    SourceCertificate::Selection(chosen.into_iter().collect())
}

pub(super) fn backward(out: &ReductionOutput, sol: &Solution) -> Result<SourceCertificate> {
    use Theorem::*;
    let lay = &out.layout;
    let soc = &out.instance.society;
    let kind_name = Solution::empty_for(out.instance.kind).kind_name();
    expect_kind(sol, kind_name)?;
    let set_of = |v: &[usize]| v.iter().copied().collect::<BTreeSet<usize>>();
    Ok(match (out.theorem, sol) {
        (GmbProt, Solution::Microbribe(flips)) => {
            let f: BTreeSet<(usize, usize)> = flips.iter().copied().collect();
            SourceCertificate::Assignment((0..lay.pos.len()).map(|x| f.contains(&(lay.star, lay.neg[x]))).collect())
        }
        (CsrRgcdi | CsrGcdiProt, Solution::DeleteSet(u)) => {
            let u = set_of(u);
            SourceCertificate::Assignment(lay.neg.iter().map(|a| u.contains(a)).collect())
        }
        (RdgcdiVc | FstRegcdi, Solution::DeleteSet(u)) => {
            // Deleting a dummy of v is never better than deleting a neighbour
            // of v that is still present; without one, the dummy is useless.
            let mut kept: BTreeSet<usize> = u.iter().copied().filter(|i| lay.vertex_ind.contains(i)).collect();
            for (v, dummies) in lay.vertex_dummies.iter().enumerate() {
                for _ in dummies.iter().filter(|d| u.contains(d)) {
                    if let Some(&w) = lay.adjacency[v].iter().find(|&&w| !kept.contains(&lay.vertex_ind[w])) {
                        kept.insert(lay.vertex_ind[w]);
                    }
                }
            }
            let cover = (0..lay.vertex_ind.len()).filter(|&v| kept.contains(&lay.vertex_ind[v])).collect();
            SourceCertificate::Selection(cover)
        }
        (RegcdiRx3c, Solution::DeleteSet(u)) => {
            let u = set_of(u);
            origin_selection(lay, (0..lay.set_main.len()).filter(|&i| !u.contains(&lay.set_main[i])))
        }
        (IcDgcai | IcCgcai | TwoIcEgcai | IcEgcai, Solution::AddSet(u)) => {
            let u = set_of(u);
            origin_selection(lay, (0..lay.set_main.len()).filter(|&i| u.contains(&lay.set_main[i])))
        }
        (IcCgcdi | IcGcdi | IcDgcdi | TwoIcGcdi, Solution::DeleteSet(u)) => {
            let u = set_of(u);
            origin_selection(lay, (0..lay.set_tilde.len()).filter(|&i| u.contains(&lay.set_tilde[i])))
        }
        (IcCgb | IcGb | TwoLicDgb | TwoIcEgb, Solution::Bribe(rows)) => origin_selection(
            lay,
            (0..lay.set_tilde.len()).filter(|&i| {
                let t = lay.set_tilde[i];
                rows.get(&t).is_some_and(|r| r.as_slice() != soc.row(t))
            }),
        ),
        (IcCgmb, Solution::Microbribe(flips)) => origin_selection(
            lay,
            (0..lay.set_tilde.len()).filter(|&i| {
                let t = lay.set_tilde[i];
                flips.iter().any(|&(a, b)| a == t || b == t)
            }),
        ),
        (TwoIcCgmb, Solution::Microbribe(flips)) => {
            let f: BTreeSet<(usize, usize)> = flips.iter().copied().collect();
            let mut chosen: BTreeSet<usize> = lay.dropped.iter().copied().collect();
            for (i, &v) in lay.vertex_origin.iter().enumerate() {
                let a = lay.vertex_ind[i];
                if !f.contains(&(a, a)) {
                    chosen.insert(v);
                }
            }
            SourceCertificate::Selection(chosen.into_iter().collect())
        }
        (IcDgmb | IcEgmb, Solution::Microbribe(flips)) => {
            let f: BTreeSet<(usize, usize)> = flips.iter().copied().collect();
            origin_selection(lay, (0..lay.set_main.len()).filter(|&i| f.contains(&(lay.star, lay.set_main[i]))))
        }
        _ => unreachable!("solution kind checked above"),
    })
}
