//! Societies, attack instances, solutions and their verification.
//!
//! Individuals are identified by 0-based indices. Every set-valued result
//! in this crate is a sorted `Vec<usize>` so that outputs are reproducible.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rules;

/// A set of individuals together with their mutual ±1 opinions.
///
/// Entry `(i, j)` is `true` when individual `i` qualifies individual `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Society {
    n: usize,
    entries: Vec<bool>,
    labels: Option<Vec<String>>,
}

impl Society {
    /// Builds a society from rows of `+1`/`-1` entries.
    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInstance("profile must have at least one row".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                entries.push(match v {
                    1 => true,
                    -1 => false,
                    _ => {
                        return Err(Error::InvalidInstance(format!(
                            "entry ({i},{j}) is {v}, expected -1 or 1"
                        )))
                    }
                });
            }
        }
        Ok(Society { n, entries, labels: None })
    }

    /// Builds a society where `i` qualifies `j` iff `f(i, j)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        assert!(n >= 1, "a society needs at least one individual");
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Society { n, entries, labels: None }
    }

    /// A society in which everyone holds the same opinion about everyone.
    pub fn uniform(n: usize, qualify: bool) -> Self {
        Self::from_fn(n, |_, _| qualify)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.n, "one label per individual");
        self.labels = Some(labels);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Display name of individual `i`: its label, or `a{i+1}` by default.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => format!("a{}", i + 1),
        }
    }

    /// Whether `i` qualifies `j`.
    #[inline]
    pub fn qualifies(&self, i: usize, j: usize) -> bool {
        self.entries[i * self.n + j]
    }

    /// The ±1 entry `φ(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> i8 {
        if self.qualifies(i, j) {
            1
        } else {
            -1
        }
    }

    pub fn set(&mut self, i: usize, j: usize, qualify: bool) {
        self.entries[i * self.n + j] = qualify;
    }

    pub fn flip(&mut self, i: usize, j: usize) {
        let k = i * self.n + j;
        self.entries[k] = !self.entries[k];
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn set_row(&mut self, i: usize, row: &[bool]) {
        assert_eq!(row.len(), self.n);
        self.entries[i * self.n..(i + 1) * self.n].copy_from_slice(row);
    }

    /// Rows as `+1`/`-1` vectors, the on-disk representation.
    pub fn to_rows(&self) -> Vec<Vec<i8>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.entry(i, j)).collect()).collect()
    }

    /// Row bitmasks (`bit j` of `rows[i]` set iff `i` qualifies `j`); requires `n <= 64`.
    pub fn row_masks(&self) -> Vec<u64> {
        assert!(self.n <= 64, "bitmask representation needs n <= 64");
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .enumerate()
                    .fold(0u64, |m, (j, &q)| if q { m | (1 << j) } else { m })
            })
            .collect()
    }

    /// The society restricted to `members` (re-indexed in the given order).
    pub fn restrict(&self, members: &[usize]) -> Society {
        let mut s = Society::from_fn(members.len().max(1), |i, j| {
            members.get(i).zip(members.get(j)).is_some_and(|(&a, &b)| self.qualifies(a, b))
        });
        if let Some(l) = &self.labels {
            s.labels = Some(members.iter().map(|&m| l[m].clone()).collect());
        }
        s
    }

    pub fn everyone(&self) -> Vec<usize> {
        (0..self.n).collect()
    }
}

/// One of the six social rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    /// Consent rule `f^(s,t)`.
    Consent { s: usize, t: usize },
    /// Liberal-start-respecting rule.
    Lsr,
    /// Consensus-start-respecting rule.
    Csr,
    /// Iterative consensus.
    Ic,
    /// Two-stage iterative consensus.
    TwoIc,
    /// Liberal two-stage iterative consensus.
    TwoLic,
}

impl RuleId {
    pub fn consent(s: usize, t: usize) -> Self {
        RuleId::Consent { s, t }
    }

    pub fn is_iterative(&self) -> bool {
        !matches!(self, RuleId::Consent { .. })
    }

    /// Parses `lsr`, `csr`, `ic`, `2ic`, `2lic` or `consent(s,t)` / `s,t`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim().to_ascii_lowercase();
        let rule = match t.as_str() {
            "lsr" => RuleId::Lsr,
            "csr" => RuleId::Csr,
            "ic" => RuleId::Ic,
            "2ic" => RuleId::TwoIc,
            "2lic" => RuleId::TwoLic,
            _ => {
                let inner = t
                    .strip_prefix("consent")
                    .unwrap_or(&t)
                    .trim_matches(|c| c == '(' || c == ')' || c == ':');
                let mut parts = inner.split(',').map(str::trim);
                let (s, tt) = match (parts.next(), parts.next(), parts.next()) {
                    (Some(s), Some(tt), None) => (s, tt),
                    _ => return Err(Error::Usage(format!("unknown rule `{text}`"))),
                };
                let s: usize = s.parse().map_err(|_| Error::Usage(format!("bad s in `{text}`")))?;
                let tt: usize = tt.parse().map_err(|_| Error::Usage(format!("bad t in `{text}`")))?;
                RuleId::Consent { s, t: tt }
            }
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RuleId::Consent { s, t } if s == 0 || t == 0 => Err(Error::InvalidInstance(format!(
                "consent parameters must be positive, got s={s}, t={t}"
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleId::Consent { s, t } => write!(f, "consent({s},{t})"),
            RuleId::Lsr => f.write_str("lsr"),
            RuleId::Csr => f.write_str("csr"),
            RuleId::Ic => f.write_str("ic"),
            RuleId::TwoIc => f.write_str("2ic"),
            RuleId::TwoLic => f.write_str("2lic"),
        }
    }
}

/// The kind of manipulative attack.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    AddIndividuals,
    DeleteIndividuals,
    RelaxedDeleteIndividuals,
    Bribery,
    Microbribery,
}

impl Kind {
    pub const ALL: [Kind; 5] = [
        Kind::AddIndividuals,
        Kind::DeleteIndividuals,
        Kind::RelaxedDeleteIndividuals,
        Kind::Bribery,
        Kind::Microbribery,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Kind::AddIndividuals => "add-individuals",
            Kind::DeleteIndividuals => "delete-individuals",
            Kind::RelaxedDeleteIndividuals => "relaxed-delete-individuals",
            Kind::Bribery => "bribery",
            Kind::Microbribery => "microbribery",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim().to_ascii_lowercase();
        Ok(match t.as_str() {
            "add-individuals" | "add" | "gcai" => Kind::AddIndividuals,
            "delete-individuals" | "delete" | "gcdi" => Kind::DeleteIndividuals,
            "relaxed-delete-individuals" | "relaxed-delete" | "r-gcdi" => {
                Kind::RelaxedDeleteIndividuals
            }
            "bribery" | "gb" => Kind::Bribery,
            "microbribery" | "gmb" => Kind::Microbribery,
            _ => return Err(Error::Usage(format!("unknown attack kind `{text}`"))),
        })
    }

    pub fn is_control(&self) -> bool {
        matches!(
            self,
            Kind::AddIndividuals | Kind::DeleteIndividuals | Kind::RelaxedDeleteIndividuals
        )
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The attacker's objective, determined by the shape of the target sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Objective {
    /// `A⁻ = ∅`.
    Constructive,
    /// `A⁺ = ∅`.
    Destructive,
    /// `A⁺ ∪ A⁻` covers every participant.
    Exact,
    /// Anything else.
    General,
}

impl Objective {
    pub const ALL: [Objective; 4] =
        [Objective::Constructive, Objective::Destructive, Objective::Exact, Objective::General];

    pub fn name(&self) -> &'static str {
        match self {
            Objective::Constructive => "constructive",
            Objective::Destructive => "destructive",
            Objective::Exact => "exact",
            Objective::General => "general",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(match text.trim().to_ascii_lowercase().as_str() {
            "constructive" | "c" => Objective::Constructive,
            "destructive" | "d" => Objective::Destructive,
            "exact" | "e" => Objective::Exact,
            "general" | "g" => Objective::General,
            _ => return Err(Error::Usage(format!("unknown objective `{text}`"))),
        })
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Bribery prices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub enum Prices {
    /// Unit prices.
    #[default]
    Unit,
    /// One price per individual (priced bribery).
    PerIndividual(Vec<u64>),
    /// One price per profile entry (priced microbribery).
    PerEntry(Vec<Vec<u64>>),
}

impl Prices {
    /// Price of bribing individual `i` (1 when unpriced).
    pub fn individual(&self, i: usize) -> u64 {
        match self {
            Prices::PerIndividual(p) => p[i],
            _ => 1,
        }
    }

    /// Price of flipping entry `(i, j)` (1 when unpriced).
    pub fn entry(&self, i: usize, j: usize) -> u64 {
        match self {
            Prices::PerEntry(p) => p[i][j],
            _ => 1,
        }
    }
}

/// A manipulative-attack problem instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackInstance {
    pub society: Society,
    pub rule: RuleId,
    pub kind: Kind,
    pub priced: bool,
    pub aplus: Vec<usize>,
    pub aminus: Vec<usize>,
    pub budget: u64,
    /// Initially participating individuals (adding individuals only).
    pub initial: Option<Vec<usize>>,
    pub prices: Prices,
}

impl AttackInstance {
    /// An unpriced instance; target sets are normalised to sorted order.
    pub fn new(
        society: Society,
        rule: RuleId,
        kind: Kind,
        aplus: Vec<usize>,
        aminus: Vec<usize>,
        budget: u64,
    ) -> Self {
        AttackInstance {
            society,
            rule,
            kind,
            priced: false,
            aplus: sorted(aplus),
            aminus: sorted(aminus),
            budget,
            initial: None,
            prices: Prices::Unit,
        }
    }

    pub fn with_initial(mut self, t: Vec<usize>) -> Self {
        self.initial = Some(sorted(t));
        self
    }

    pub fn with_prices(mut self, prices: Prices) -> Self {
        self.priced = !matches!(prices, Prices::Unit);
        self.prices = prices;
        self
    }

    pub fn n(&self) -> usize {
        self.society.n()
    }

    /// The individuals taking part before the attack.
    pub fn participants(&self) -> Vec<usize> {
        match (&self.kind, &self.initial) {
            (Kind::AddIndividuals, Some(t)) => t.clone(),
            _ => self.society.everyone(),
        }
    }

    pub fn is_constructive(&self) -> bool {
        self.aminus.is_empty()
    }

    pub fn is_destructive(&self) -> bool {
        self.aplus.is_empty()
    }

    /// Whether `A⁺ ∪ A⁻` covers all participants.
    pub fn is_exact(&self) -> bool {
        self.aplus.len() + self.aminus.len() == self.participants().len()
    }

    /// The most specific objective describing the target sets.
    pub fn objective(&self) -> Objective {
        if self.is_constructive() {
            Objective::Constructive
        } else if self.is_destructive() {
            Objective::Destructive
        } else if self.is_exact() {
            Objective::Exact
        } else {
            Objective::General
        }
    }

    pub fn in_aplus(&self) -> Vec<bool> {
        membership(self.n(), &self.aplus)
    }

    pub fn in_aminus(&self) -> Vec<bool> {
        membership(self.n(), &self.aminus)
    }

    /// Checks the structural invariants of the instance.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        self.rule.validate()?;
        for &a in self.aplus.iter().chain(&self.aminus) {
            if a >= n {
                return Err(Error::IndexOutOfRange { index: a, n });
            }
        }
        if !is_strictly_sorted(&self.aplus) || !is_strictly_sorted(&self.aminus) {
            return Err(Error::InvalidInstance("target sets must be duplicate-free".into()));
        }
        let plus = self.in_aplus();
        if self.aminus.iter().any(|&a| plus[a]) {
            return Err(Error::InvalidInstance("A+ and A- must be disjoint".into()));
        }
        if self.aplus.is_empty() && self.aminus.is_empty() {
            return Err(Error::InvalidInstance("at least one target set must be nonempty".into()));
        }
        match (&self.kind, &self.initial) {
            (Kind::AddIndividuals, None) => {
                return Err(Error::InvalidInstance("adding individuals needs an initial set T".into()))
            }
            (Kind::AddIndividuals, Some(t)) => {
                if !is_strictly_sorted(t) {
                    return Err(Error::InvalidInstance("T must be duplicate-free".into()));
                }
                if let Some(&bad) = t.iter().find(|&&x| x >= n) {
                    return Err(Error::IndexOutOfRange { index: bad, n });
                }
                if t.is_empty() {
                    return Err(Error::InvalidInstance("T must be nonempty".into()));
                }
                let in_t = membership(n, t);
                if self.aplus.iter().chain(&self.aminus).any(|&a| !in_t[a]) {
                    return Err(Error::InvalidInstance("A+ and A- must lie inside T".into()));
                }
            }
            (_, Some(_)) => {
                return Err(Error::InvalidInstance("T is only meaningful when adding individuals".into()))
            }
            _ => {}
        }
        if self.kind == Kind::DeleteIndividuals
            && !self.is_constructive()
            && !self.is_destructive()
            && self.is_exact()
        {
            return Err(Error::InvalidInstance(
                "exact objective is undefined for classic deletion (nobody could be deleted)".into(),
            ));
        }
        match (&self.prices, self.kind) {
            (Prices::Unit, _) if self.priced => {
                return Err(Error::InvalidInstance("priced instance without prices".into()))
            }
            (Prices::Unit, _) => {}
            (Prices::PerIndividual(p), Kind::Bribery) => {
                if p.len() != n || p.contains(&0) {
                    return Err(Error::InvalidInstance("need n positive individual prices".into()));
                }
            }
            (Prices::PerEntry(p), Kind::Microbribery) => {
                if p.len() != n || p.iter().any(|r| r.len() != n || r.contains(&0)) {
                    return Err(Error::InvalidInstance("need an n×n matrix of positive prices".into()));
                }
            }
            _ => {
                return Err(Error::InvalidInstance(format!(
                    "price table does not match attack kind {}",
                    self.kind
                )))
            }
        }
        if self.priced == matches!(self.prices, Prices::Unit) {
            return Err(Error::InvalidInstance("`priced` flag disagrees with the price table".into()));
        }
        Ok(())
    }
}

/// A concrete attack.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Solution {
    /// Individuals added to `T`.
    AddSet(Vec<usize>),
    /// Individuals deleted from `N`.
    DeleteSet(Vec<usize>),
    /// Bribed individuals and their complete replacement rows.
    Bribe(BTreeMap<usize, Vec<bool>>),
    /// Profile entries `(i, j)` to negate.
    Microbribe(Vec<(usize, usize)>),
}

impl Solution {
    pub fn empty_for(kind: Kind) -> Solution {
        match kind {
            Kind::AddIndividuals => Solution::AddSet(Vec::new()),
            Kind::DeleteIndividuals | Kind::RelaxedDeleteIndividuals => {
                Solution::DeleteSet(Vec::new())
            }
            Kind::Bribery => Solution::Bribe(BTreeMap::new()),
            Kind::Microbribery => Solution::Microbribe(Vec::new()),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Solution::AddSet(_) => "add",
            Solution::DeleteSet(_) => "delete",
            Solution::Bribe(_) => "bribe",
            Solution::Microbribe(_) => "microbribe",
        }
    }

    /// Number of elementary operations (added/deleted/bribed individuals or flips).
    pub fn size(&self) -> usize {
        match self {
            Solution::AddSet(u) | Solution::DeleteSet(u) => u.len(),
            Solution::Bribe(rows) => rows.len(),
            Solution::Microbribe(f) => f.len(),
        }
    }
}

/// YES/NO answer of a decision procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "YES",
            Answer::No => "NO",
        })
    }
}

/// The outcome of a solver or oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub answer: Answer,
    /// Present iff the answer is YES.
    pub witness: Option<Solution>,
    /// Cost actually spent by the witness (0 for NO).
    pub cost: u64,
    /// Name of the procedure that produced the verdict.
    pub certifier: String,
    /// Optional explanation, e.g. `"immune"`.
    pub reason: Option<String>,
}

impl Verdict {
    pub fn yes(witness: Solution, cost: u64, certifier: &str) -> Self {
        Verdict {
            answer: Answer::Yes,
            witness: Some(witness),
            cost,
            certifier: certifier.to_string(),
            reason: None,
        }
    }

    pub fn no(certifier: &str) -> Self {
        Verdict { answer: Answer::No, witness: None, cost: 0, certifier: certifier.to_string(), reason: None }
    }

    pub fn with_reason(mut self, reason: &str) -> Self {
        self.reason = Some(reason.to_string());
        self
    }

    pub fn is_yes(&self) -> bool {
        self.answer == Answer::Yes
    }
}

/// Result of checking a solution against an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid(u64),
    Invalid(String),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid(_))
    }
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Validity::Valid(c) => write!(f, "Valid, cost {c}"),
            Validity::Invalid(r) => write!(f, "Invalid: {r}"),
        }
    }
}

/// Whether the targets are met before any attack.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    /// `A⁺` nonempty and already fully socially qualified.
    pub protective: bool,
    pub aplus_initially_met: bool,
    pub aminus_initially_met: bool,
}

/// Applies `sol` and returns the participating individuals and the profile.
pub fn apply_solution(inst: &AttackInstance, sol: &Solution) -> Result<(Vec<usize>, Society)> {
    let n = inst.n();
    let check_range = |u: &[usize]| -> Result<()> {
        match u.iter().find(|&&x| x >= n) {
            Some(&x) => Err(Error::IndexOutOfRange { index: x, n }),
            None => Ok(()),
        }
    };
    match (inst.kind, sol) {
        (Kind::AddIndividuals, Solution::AddSet(u)) => {
            check_range(u)?;
            let t = inst.participants();
            let mut in_t = membership(n, &t);
            for &x in u {
                if in_t[x] {
                    return Err(Error::IllegalOperation(format!(
                        "{} already participates",
                        inst.society.label(x)
                    )));
                }
                in_t[x] = true;
            }
            Ok((members(&in_t), inst.society.clone()))
        }
        (Kind::DeleteIndividuals | Kind::RelaxedDeleteIndividuals, Solution::DeleteSet(u)) => {
            check_range(u)?;
            let plus = inst.in_aplus();
            let minus = inst.in_aminus();
            let mut keep = vec![true; n];
            for &x in u {
                if plus[x] || (inst.kind == Kind::DeleteIndividuals && minus[x]) {
                    return Err(Error::IllegalOperation(format!(
                        "{} is a protected target and cannot be deleted",
                        inst.society.label(x)
                    )));
                }
                if !keep[x] {
                    return Err(Error::IllegalOperation(format!(
                        "{} is deleted twice",
                        inst.society.label(x)
                    )));
                }
                keep[x] = false;
            }
            Ok((members(&keep), inst.society.clone()))
        }
        (Kind::Bribery, Solution::Bribe(rows)) => {
            let mut soc = inst.society.clone();
            for (&i, row) in rows {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, n });
                }
                if row.len() != n {
                    return Err(Error::IllegalOperation(format!(
                        "replacement row for {} has length {}, expected {n}",
                        inst.society.label(i),
                        row.len()
                    )));
                }
                soc.set_row(i, row);
            }
            Ok((soc.everyone(), soc))
        }
        (Kind::Microbribery, Solution::Microbribe(flips)) => {
            let mut soc = inst.society.clone();
            let mut seen = std::collections::BTreeSet::new();
            for &(i, j) in flips {
                if i >= n || j >= n {
                    return Err(Error::IndexOutOfRange { index: i.max(j), n });
                }
                if !seen.insert((i, j)) {
                    return Err(Error::IllegalOperation(format!("entry ({i},{j}) flipped twice")));
                }
                soc.flip(i, j);
            }
            Ok((soc.everyone(), soc))
        }
        (kind, sol) => Err(Error::KindMismatch { kind, solution: sol.kind_name() }),
    }
}

/// The price actually charged for `sol`; bribed rows equal to the original are free.
pub fn solution_cost(inst: &AttackInstance, sol: &Solution) -> u64 {
    match sol {
        Solution::AddSet(u) | Solution::DeleteSet(u) => u.len() as u64,
        Solution::Bribe(rows) => rows
            .iter()
            .filter(|(&i, row)| inst.society.row(i) != row.as_slice())
            .map(|(&i, _)| inst.prices.individual(i))
            .sum(),
        Solution::Microbribe(flips) => flips.iter().map(|&(i, j)| inst.prices.entry(i, j)).sum(),
    }
}

/// Whether the targets of `inst` are met among `participants` under `soc`.
pub fn targets_met(inst: &AttackInstance, participants: &[usize], soc: &Society) -> Result<(), String> {
    let qualified = rules::evaluate(inst.rule, participants, soc);
    let in_f = membership(soc.n(), &qualified);
    let present = membership(soc.n(), participants);
    for &a in &inst.aplus {
        if !in_f[a] {
            return Err(format!("{} is not socially qualified", soc.label(a)));
        }
    }
    for &a in &inst.aminus {
        if present[a] && in_f[a] {
            return Err(format!("{} is still socially qualified", soc.label(a)));
        }
    }
    Ok(())
}

/// Applies `sol`, evaluates the rule and checks both targets and the budget.
pub fn verify_solution(inst: &AttackInstance, sol: &Solution) -> Result<Validity> {
    let (participants, soc) = apply_solution(inst, sol)?;
    if let Err(reason) = targets_met(inst, &participants, &soc) {
        return Ok(Validity::Invalid(reason));
    }
    let cost = solution_cost(inst, sol);
    if cost > inst.budget {
        return Ok(Validity::Invalid(format!("budget exceeded: cost {cost} > {}", inst.budget)));
    }
    Ok(Validity::Valid(cost))
}

/// Evaluates the rule on the untouched instance.
pub fn classify_instance(inst: &AttackInstance) -> Classification {
    let t = inst.participants();
    let f = membership(inst.n(), &rules::evaluate(inst.rule, &t, &inst.society));
    let aplus_initially_met = inst.aplus.iter().all(|&a| f[a]);
    let aminus_initially_met = inst.aminus.iter().all(|&a| !f[a]);
    Classification {
        protective: !inst.aplus.is_empty() && aplus_initially_met,
        aplus_initially_met,
        aminus_initially_met,
    }
}

/// Knobs for [`random_instance`] beyond the positional parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomOptions {
    pub priced: bool,
    /// Prices are drawn uniformly from `1..=max_price`.
    pub max_price: u64,
    /// Budget is drawn uniformly from `1..=max_budget` (default `n`).
    pub max_budget: Option<u64>,
}

impl Default for RandomOptions {
    fn default() -> Self {
        RandomOptions { priced: false, max_price: 3, max_budget: None }
    }
}

/// A seeded random instance; identical arguments give identical instances.
///
/// Target sets are sampled to fit `objective` (an exact objective partitions
/// every participant; for classic deletion, which has no exact variant, it
/// degrades to the general shape).
pub fn random_instance(
    seed: u64,
    n: usize,
    rule: RuleId,
    kind: Kind,
    objective: Objective,
    density: f64,
) -> AttackInstance {
    random_instance_with(seed, n, rule, kind, objective, density, &RandomOptions::default())
}

/// [`random_instance`] with explicit pricing and budget options.
pub fn random_instance_with(
    seed: u64,
    n: usize,
    rule: RuleId,
    kind: Kind,
    objective: Objective,
    density: f64,
    opts: &RandomOptions,
) -> AttackInstance {
    assert!(n >= 1, "n must be positive");
    let density = density.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let society = Society::from_fn(n, |_, _| rng.gen_bool(density));

    let pool: Vec<usize> = if kind == Kind::AddIndividuals {
        // Keep at least one individual outside T when possible.
        let mut t: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
        if t.is_empty() {
            t.push(rng.gen_range(0..n));
        }
        if t.len() == n && n > 1 {
            let drop = rng.gen_range(0..n);
            t.retain(|&x| x != drop);
        }
        t
    } else {
        (0..n).collect()
    };

    let objective = match (objective, kind) {
        (Objective::Exact, Kind::DeleteIndividuals) => Objective::General,
        (o, _) => o,
    };
    let (mut aplus, mut aminus) = (Vec::new(), Vec::new());
    let m = pool.len();
    match objective {
        Objective::Constructive => {
            aplus = pool.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
            if aplus.is_empty() {
                aplus.push(pool[rng.gen_range(0..m)]);
            }
        }
        Objective::Destructive => {
            aminus = pool.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
            if aminus.is_empty() {
                aminus.push(pool[rng.gen_range(0..m)]);
            }
        }
        Objective::Exact => {
            for &a in &pool {
                if rng.gen_bool(0.5) {
                    aplus.push(a);
                } else {
                    aminus.push(a);
                }
            }
        }
        Objective::General => {
            for &a in &pool {
                match rng.gen_range(0..3) {
                    0 => aplus.push(a),
                    1 => aminus.push(a),
                    _ => {}
                }
            }
            if aplus.is_empty() && aminus.is_empty() {
                aplus.push(pool[rng.gen_range(0..m)]);
            }
        }
    }
    if kind == Kind::DeleteIndividuals
        && !aplus.is_empty()
        && !aminus.is_empty()
        && aplus.len() + aminus.len() == n
    {
        // Free one individual so the classic deletion instance is well formed.
        let victim = if aminus.len() > 1 { aminus.pop() } else { aplus.pop() };
        debug_assert!(victim.is_some());
    }

    let max_budget = opts.max_budget.unwrap_or(n as u64).max(1);
    let budget = rng.gen_range(1..=max_budget);
    let mut inst = AttackInstance::new(society, rule, kind, aplus, aminus, budget);
    if kind == Kind::AddIndividuals {
        inst.initial = Some(pool);
    }
    if opts.priced {
        let hi = opts.max_price.max(1);
        match kind {
            Kind::Bribery => {
                let p = (0..n).map(|_| rng.gen_range(1..=hi)).collect();
                inst = inst.with_prices(Prices::PerIndividual(p));
            }
            Kind::Microbribery => {
                let p = (0..n).map(|_| (0..n).map(|_| rng.gen_range(1..=hi)).collect()).collect();
                inst = inst.with_prices(Prices::PerEntry(p));
            }
            _ => {}
        }
    }
    inst
}

/// Boolean membership vector of `set` within `0..n`.
pub fn membership(n: usize, set: &[usize]) -> Vec<bool> {
    let mut v = vec![false; n];
    for &x in set {
        v[x] = true;
    }
    v
}

/// Indices whose flag is set, ascending.
pub fn members(flags: &[bool]) -> Vec<usize> {
    flags.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i).collect()
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

fn is_strictly_sorted(v: &[usize]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn ex2_instance(budget: u64) -> AttackInstance {
        AttackInstance::new(ex2(), RuleId::Csr, Kind::DeleteIndividuals, vec![], vec![5], budget)
    }

    #[test]
    fn deleting_two_individuals_leaves_four() {
        let (rest, _) = apply_solution(&ex2_instance(2), &Solution::DeleteSet(vec![3, 4])).unwrap();
        assert_eq!(rest, vec![0, 1, 2, 5]);
    }

    #[test]
    fn empty_deletion_is_identity() {
        let inst = ex2_instance(2);
        let (rest, soc) = apply_solution(&inst, &Solution::DeleteSet(vec![])).unwrap();
        assert_eq!(rest, inst.society.everyone());
        assert_eq!(soc, inst.society);
    }

    #[test]
    fn verification_of_counterexample_witnesses() {
        let inst = ex2_instance(2);
        assert_eq!(verify_solution(&inst, &Solution::DeleteSet(vec![3, 4])).unwrap(), Validity::Valid(2));
        assert!(!verify_solution(&inst, &Solution::DeleteSet(vec![0])).unwrap().is_valid());
        let tight = ex2_instance(1);
        match verify_solution(&tight, &Solution::DeleteSet(vec![3, 4])).unwrap() {
            Validity::Invalid(r) => assert!(r.contains("budget")),
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn protected_targets_cannot_be_deleted() {
        let inst = ex2_instance(2);
        assert!(matches!(
            apply_solution(&inst, &Solution::DeleteSet(vec![5])),
            Err(Error::IllegalOperation(_))
        ));
        let mut relaxed = inst.clone();
        relaxed.kind = Kind::RelaxedDeleteIndividuals;
        assert!(apply_solution(&relaxed, &Solution::DeleteSet(vec![5])).is_ok());
    }

    #[test]
    fn wrong_solution_variant_is_rejected() {
        let inst = ex2_instance(2);
        assert!(matches!(
            apply_solution(&inst, &Solution::Microbribe(vec![(0, 0)])),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn single_flip_only_changes_one_entry() {
        let soc = ex2();
        let inst = AttackInstance::new(soc.clone(), RuleId::Csr, Kind::Microbribery, vec![0], vec![], 1);
        let (_, out) = apply_solution(&inst, &Solution::Microbribe(vec![(0, 0)])).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(out.qualifies(i, j), soc.qualifies(i, j) ^ (i == 0 && j == 0));
            }
        }
    }

    #[test]
    fn unchanged_bribe_rows_are_free() {
        let soc = ex2();
        let inst = AttackInstance::new(soc.clone(), RuleId::Csr, Kind::Bribery, vec![0], vec![], 1);
        let mut rows = BTreeMap::new();
        rows.insert(2, soc.row(2).to_vec());
        assert_eq!(solution_cost(&inst, &Solution::Bribe(rows)), 0);
    }

    #[test]
    fn classification_of_empty_aplus() {
        let inst = ex2_instance(1);
        let c = classify_instance(&inst);
        assert!(!c.protective);
        assert!(c.aplus_initially_met);
        assert!(!c.aminus_initially_met);
    }

    #[test]
    fn random_instances_are_reproducible_and_valid() {
        for kind in Kind::ALL {
            for obj in Objective::ALL {
                let a = random_instance(7, 5, RuleId::Csr, kind, obj, 0.5);
                let b = random_instance(7, 5, RuleId::Csr, kind, obj, 0.5);
                assert_eq!(a, b);
                a.validate().unwrap();
            }
        }
        let ones = random_instance(1, 4, RuleId::Lsr, Kind::Bribery, Objective::General, 1.0);
        assert!(ones.society.to_rows().iter().flatten().all(|&v| v == 1));
        let zeros = random_instance(1, 4, RuleId::Lsr, Kind::Bribery, Objective::General, 0.0);
        assert!(zeros.society.to_rows().iter().flatten().all(|&v| v == -1));
    }

    #[test]
    fn rule_names_round_trip() {
        for r in [RuleId::consent(2, 3), RuleId::Lsr, RuleId::Csr, RuleId::Ic, RuleId::TwoIc, RuleId::TwoLic] {
            assert_eq!(RuleId::parse(&r.to_string()).unwrap(), r);
        }
        assert!(RuleId::parse("consent(0,1)").is_err());
    }
}
