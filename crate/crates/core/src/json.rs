//! JSON file formats for instances, solutions and verdicts.
//!
//! Serialisation uses a fixed key order, so parse → serialise is byte-stable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{AttackInstance, Kind, Prices, RuleId, Society, Solution, Verdict};
use crate::rules::RuleTrace;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n: usize,
    profile: Vec<Vec<i8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    rule: RuleFile,
    kind: String,
    #[serde(default)]
    priced: bool,
    aplus: Vec<usize>,
    aminus: Vec<usize>,
    budget: u64,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    t: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prices: Option<Vec<u64>>,
    #[serde(rename = "priceMatrix", default, skip_serializing_if = "Option::is_none")]
    price_matrix: Option<Vec<Vec<u64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RuleFile {
    Consent { consent: ConsentParams },
    Name(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConsentParams {
    s: usize,
    t: usize,
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

impl RuleFile {
    fn to_rule(&self) -> Result<RuleId> {
        match self {
            RuleFile::Consent { consent } => {
                let r = RuleId::consent(consent.s, consent.t);
                r.validate()?;
                Ok(r)
            }
            RuleFile::Name(name) => RuleId::parse(name),
        }
    }

    fn from_rule(rule: RuleId) -> Self {
        match rule {
            RuleId::Consent { s, t } => RuleFile::Consent { consent: ConsentParams { s, t } },
            other => RuleFile::Name(other.to_string()),
        }
    }
}

/// Parses an instance file and validates it.
pub fn instance_from_json(text: &str) -> Result<AttackInstance> {
    let f: InstanceFile = serde_json::from_str(text).map_err(parse_err)?;
    if f.profile.len() != f.n {
        return Err(Error::Parse(format!("profile has {} rows but n = {}", f.profile.len(), f.n)));
    }
    let mut society = Society::from_rows(&f.profile)?;
    if let Some(labels) = f.labels {
        if labels.len() != f.n {
            return Err(Error::Parse(format!("{} labels for {} individuals", labels.len(), f.n)));
        }
        society = society.with_labels(labels);
    }
    let rule = f.rule.to_rule()?;
    let kind = Kind::parse(&f.kind)?;
    let mut inst = AttackInstance::new(society, rule, kind, f.aplus.clone(), f.aminus.clone(), f.budget);
    if inst.aplus != f.aplus || inst.aminus != f.aminus {
        return Err(Error::Parse("target sets must be listed in ascending order without repeats".into()));
    }
    inst.initial = f.t;
    inst.prices = match (f.prices, f.price_matrix) {
        (None, None) => Prices::Unit,
        (Some(p), None) => Prices::PerIndividual(p),
        (None, Some(m)) => Prices::PerEntry(m),
        (Some(_), Some(_)) => {
            return Err(Error::Parse("give either \"prices\" or \"priceMatrix\", not both".into()))
        }
    };
    inst.priced = f.priced;
    inst.validate()?;
    Ok(inst)
}

/// The profile part of any instance-like file; other keys are ignored, so
/// both bare profiles and full instance files are accepted.
#[derive(Deserialize)]
struct SocietyFile {
    n: usize,
    profile: Vec<Vec<i8>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

/// Parses the society (`n`, `profile`, optional `labels`) from a file.
pub fn society_from_json(text: &str) -> Result<Society> {
    let f: SocietyFile = serde_json::from_str(text).map_err(parse_err)?;
    if f.profile.len() != f.n {
        return Err(Error::Parse(format!("profile has {} rows but n = {}", f.profile.len(), f.n)));
    }
    let society = Society::from_rows(&f.profile)?;
    match f.labels {
        Some(labels) if labels.len() != f.n => {
            Err(Error::Parse(format!("{} labels for {} individuals", labels.len(), f.n)))
        }
        Some(labels) => Ok(society.with_labels(labels)),
        None => Ok(society),
    }
}

/// A society as a JSON value.
pub fn society_to_value(soc: &Society) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("n".into(), json!(soc.n()));
    m.insert("profile".into(), json!(soc.to_rows()));
    if let Some(labels) = soc.labels() {
        m.insert("labels".into(), json!(labels));
    }
    Value::Object(m)
}

fn instance_file(inst: &AttackInstance) -> InstanceFile {
    let (prices, price_matrix) = match &inst.prices {
        Prices::Unit => (None, None),
        Prices::PerIndividual(p) => (Some(p.clone()), None),
        Prices::PerEntry(m) => (None, Some(m.clone())),
    };
    InstanceFile {
        n: inst.n(),
        profile: inst.society.to_rows(),
        labels: inst.society.labels().map(<[String]>::to_vec),
        rule: RuleFile::from_rule(inst.rule),
        kind: inst.kind.name().to_string(),
        priced: inst.priced,
        aplus: inst.aplus.clone(),
        aminus: inst.aminus.clone(),
        budget: inst.budget,
        t: inst.initial.clone(),
        prices,
        price_matrix,
    }
}

/// The instance as a JSON value (fixed key order).
pub fn instance_to_value(inst: &AttackInstance) -> Value {
    serde_json::to_value(instance_file(inst)).expect("instance serialises")
}

/// Serialises an instance; rows of the profile stay on one line each.
pub fn instance_to_json(inst: &AttackInstance) -> String {
    pretty(&instance_to_value(inst))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionFile {
    kind: String,
    #[serde(rename = "U", default, skip_serializing_if = "Option::is_none")]
    u: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rows: Option<Vec<BribedRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    flips: Option<Vec<(usize, usize)>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BribedRow {
    individual: usize,
    row: Vec<i8>,
}

/// Parses a solution file.
pub fn solution_from_json(text: &str) -> Result<Solution> {
    let f: SolutionFile = serde_json::from_str(text).map_err(parse_err)?;
    let kind = match f.kind.as_str() {
        "add" => Kind::AddIndividuals,
        "delete" => Kind::DeleteIndividuals,
        "bribe" => Kind::Bribery,
        "microbribe" => Kind::Microbribery,
        other => Kind::parse(other)?,
    };
    let missing = |what: &str| Error::Parse(format!("solution of kind {} needs \"{what}\"", f.kind));
    Ok(match kind {
        Kind::AddIndividuals => Solution::AddSet(f.u.ok_or_else(|| missing("U"))?),
        Kind::DeleteIndividuals | Kind::RelaxedDeleteIndividuals => {
            Solution::DeleteSet(f.u.ok_or_else(|| missing("U"))?)
        }
        Kind::Bribery => {
            let mut map = BTreeMap::new();
            for r in f.rows.ok_or_else(|| missing("rows"))? {
                let row = r
                    .row
                    .iter()
                    .map(|&e| match e {
                        1 => Ok(true),
                        -1 => Ok(false),
                        other => Err(Error::Parse(format!("row entry {other} is not -1 or 1"))),
                    })
                    .collect::<Result<Vec<bool>>>()?;
                if map.insert(r.individual, row).is_some() {
                    return Err(Error::Parse(format!("individual {} bribed twice", r.individual)));
                }
            }
            Solution::Bribe(map)
        }
        Kind::Microbribery => Solution::Microbribe(f.flips.ok_or_else(|| missing("flips"))?),
    })
}

/// The solution as a JSON value.
pub fn solution_to_value(sol: &Solution) -> Value {
    let mut f = SolutionFile { kind: sol.kind_name().to_string(), u: None, rows: None, flips: None };
    match sol {
        Solution::AddSet(u) | Solution::DeleteSet(u) => f.u = Some(u.clone()),
        Solution::Bribe(rows) => {
            f.rows = Some(
                rows.iter()
                    .map(|(&i, row)| BribedRow {
                        individual: i,
                        row: row.iter().map(|&q| if q { 1 } else { -1 }).collect(),
                    })
                    .collect(),
            )
        }
        Solution::Microbribe(flips) => f.flips = Some(flips.clone()),
    }
    serde_json::to_value(f).expect("solution serialises")
}

pub fn solution_to_json(sol: &Solution) -> String {
    pretty(&solution_to_value(sol))
}

/// A verdict record: answer, cost, certifier, optional reason and witness.
pub fn verdict_to_value(v: &Verdict) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("answer".into(), json!(v.answer.to_string()));
    m.insert("cost".into(), json!(v.cost));
    m.insert("certifier".into(), json!(v.certifier));
    if let Some(r) = &v.reason {
        m.insert("reason".into(), json!(r));
    }
    if let Some(w) = &v.witness {
        m.insert("witness".into(), solution_to_value(w));
    }
    Value::Object(m)
}

/// A rule trace record.
pub fn trace_to_value(rule: RuleId, trace: &RuleTrace) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("rule".into(), json!(rule.to_string()));
    m.insert("stages".into(), json!(trace.stages));
    if let Some(q) = &trace.newly_qualified {
        m.insert("newly_qualified".into(), json!(q));
    }
    m.insert("final".into(), json!(trace.final_set));
    Value::Object(m)
}

/// Pretty JSON with innermost arrays of scalars kept on one line.
pub fn pretty(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|x| !x.is_array() && !x.is_object()),
        Value::Object(_) => false,
        _ => true,
    }
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Array(_) if is_flat(v) => {
            out.push_str(&serde_json::to_string(v).expect("json value"));
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(item, depth + 1, out);
                if k + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&serde_json::to_string(key).expect("json key"));
                out.push_str(": ");
                write_value(item, depth + 1, out);
                if k + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        scalar => out.push_str(&serde_json::to_string(scalar).expect("json value")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_round_trip_is_byte_stable() {
        let soc = Society::from_rows(&[vec![1, -1], vec![-1, 1]]).unwrap();
        let inst = AttackInstance::new(soc, RuleId::consent(2, 3), Kind::Microbribery, vec![0], vec![1], 2)
            .with_prices(Prices::PerEntry(vec![vec![1, 2], vec![3, 4]]));
        let text = instance_to_json(&inst);
        let back = instance_from_json(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(instance_to_json(&back), text);
    }

    #[test]
    fn solution_round_trip() {
        let sols = [
            Solution::DeleteSet(vec![3, 4]),
            Solution::Bribe(BTreeMap::from([(1, vec![true, false])])),
            Solution::Microbribe(vec![(0, 1)]),
        ];
        for s in sols {
            let text = solution_to_json(&s);
            let back = solution_from_json(&text).unwrap();
            assert_eq!(back, s);
            assert_eq!(solution_to_json(&back), text);
        }
    }

    #[test]
    fn rejects_bad_entries() {
        let text = r#"{"n":1,"profile":[[0]],"rule":"lsr","kind":"delete-individuals","aplus":[],"aminus":[0],"budget":1}"#;
        assert!(instance_from_json(text).is_err());
    }
}
