//! JSON and text renderings of fault, repair and entrenchment reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::engine::RankedRepair;
use crate::entrenchment::{ArgumentEntrenchment, EntrenchmentReport, Rational};
use crate::inference::Fault;
use crate::theory::Name;

/// Renames whole identifiers according to a user map, leaving other text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameMap(pub BTreeMap<String, String>);

impl NameMap {
    /// Parses lines of the form `fresh = preferred`; `%` starts a comment.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('%').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (from, to) = line
                .split_once('=')
                .map(|(a, b)| (a.trim(), b.trim()))
                .filter(|(a, b)| is_ident(a) && is_ident(b))
                .ok_or_else(|| format!("line {}: expected `fresh = preferred`", n + 1))?;
            map.insert(from.to_string(), to.to_string());
        }
        Ok(NameMap(map))
    }

    pub fn apply(&self, text: &str) -> String {
        if self.0.is_empty() {
            return text.to_string();
        }
        let mut out = String::with_capacity(text.len());
        let mut word = String::new();
        let flush = |word: &mut String, out: &mut String| {
            out.push_str(self.0.get(word.as_str()).unwrap_or(word));
            word.clear();
        };
        for ch in text.chars() {
            if ch.is_ascii_alphanumeric() || ch == '_' || ch == '\'' {
                word.push(ch);
            } else {
                flush(&mut word, &mut out);
                out.push(ch);
            }
        }
        flush(&mut word, &mut out);
        out
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

#[derive(Debug, Clone, Serialize)]
pub struct OriginJson {
    pub clause: String,
    /// One-based body position.
    pub body: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrontierJson {
    pub goal: String,
    pub origin: Option<OriginJson>,
    pub nearest: Option<String>,
    pub mismatch: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FaultJson {
    pub kind: String,
    pub atom: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proof_clause_ids: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frontier: Option<Vec<FrontierJson>>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RepairJson {
    pub rank: usize,
    pub score_category: String,
    /// Exact value such as `1/3`, or `PROTECTED`.
    pub score_value: String,
    pub score_approx: Option<f64>,
    pub plan: Vec<String>,
    pub theory_text: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub faults: Vec<FaultJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RepairReport {
    pub faults: Vec<FaultJson>,
    pub repairs: Vec<RepairJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ArgumentJson {
    Finite(usize),
    Protected(String),
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EntrenchJson {
    /// Predicate entrenchment rounded to two decimals.
    pub entrenchment: BTreeMap<String, f64>,
    pub exact: BTreeMap<String, String>,
    /// Confidence distance; `null` when infinite.
    pub distance: BTreeMap<String, Option<usize>>,
    pub pd_max: usize,
    pub arguments: BTreeMap<String, Vec<ArgumentJson>>,
}

pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

pub fn fault_json(fault: &Fault, names: &NameMap) -> FaultJson {
    let atom = names.apply(&fault.atom().to_string());
    match fault {
        Fault::Incompatibility { proof, .. } => FaultJson {
            kind: fault.kind().to_string(),
            atom,
            proof_clause_ids: Some(proof.clause_ids().iter().map(|s| s.to_string()).collect()),
            frontier: None,
        },
        Fault::Insufficiency { frontier, .. } => FaultJson {
            kind: fault.kind().to_string(),
            atom,
            proof_clause_ids: None,
            frontier: Some(
                frontier
                    .entries
                    .iter()
                    .map(|e| FrontierJson {
                        goal: names.apply(&e.goal.to_string()),
                        origin: e.origin.as_ref().map(|(c, b)| OriginJson { clause: c.to_string(), body: b + 1 }),
                        nearest: e.nearest.as_ref().map(ToString::to_string),
                        mismatch: e.mismatch.to_string(),
                    })
                    .collect(),
            ),
        },
    }
}

pub fn repair_json(r: &RankedRepair, names: &NameMap) -> RepairJson {
    RepairJson {
        rank: r.rank,
        score_category: r.score.category.to_string(),
        score_value: r.score.value.to_string(),
        score_approx: r.score.value.to_f64(),
        plan: r.plan.lines().iter().map(|l| names.apply(l)).collect(),
        theory_text: names.apply(&r.theory.to_string()),
    }
}

pub fn check_report(faults: &[Fault], names: &NameMap) -> CheckReport {
    CheckReport { faults: faults.iter().map(|f| fault_json(f, names)).collect() }
}

pub fn repair_report(faults: &[Fault], repairs: &[RankedRepair], names: &NameMap) -> RepairReport {
    RepairReport {
        faults: faults.iter().map(|f| fault_json(f, names)).collect(),
        repairs: repairs.iter().map(|r| repair_json(r, names)).collect(),
    }
}

pub fn entrench_json(report: &EntrenchmentReport<Rational>, names: &NameMap) -> EntrenchJson {
    let key = |p: &Name| names.apply(p);
    let mut out = EntrenchJson {
        entrenchment: BTreeMap::new(),
        exact: BTreeMap::new(),
        distance: BTreeMap::new(),
        pd_max: report.pd_max,
        arguments: BTreeMap::new(),
    };
    for (p, e) in &report.predicates {
        let approx = *e.value.numer() as f64 / *e.value.denom() as f64;
        out.entrenchment.insert(key(p), round2(approx));
        out.exact.insert(key(p), e.value.to_string());
        out.distance.insert(key(p), e.distance.finite());
    }
    for (p, row) in &report.arguments {
        let row = row
            .iter()
            .map(|a| match a {
                ArgumentEntrenchment::Finite(n) => ArgumentJson::Finite(*n),
                ArgumentEntrenchment::Protected => ArgumentJson::Protected("PROTECTED".into()),
            })
            .collect();
        out.arguments.insert(key(p), row);
    }
    out
}

/// `0.5,1`-style node annotations: entrenchment then distance.
pub fn graph_annotations(report: &EntrenchmentReport<Rational>) -> BTreeMap<Name, String> {
    report
        .predicates
        .iter()
        .map(|(p, e)| {
            let approx = round2(*e.value.numer() as f64 / *e.value.denom() as f64);
            (p.clone(), format!("{approx},{}", e.distance))
        })
        .collect()
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn faults_text(faults: &[Fault], names: &NameMap) -> String {
    if faults.is_empty() {
        return "no faults\n".to_string();
    }
    faults.iter().map(|f| names.apply(&f.to_string()) + "\n").collect()
}

pub fn repairs_text(faults: &[Fault], repairs: &[RankedRepair], names: &NameMap) -> String {
    let mut out = faults_text(faults, names);
    if repairs.is_empty() {
        out.push_str("no repair found\n");
    }
    for r in repairs {
        let _ = writeln!(out, "\n#{} {}", r.rank, r.score);
        for line in r.plan.lines() {
            let _ = writeln!(out, "  {}", names.apply(&line));
        }
        out.push_str(&names.apply(&r.theory.to_string()));
    }
    out
}

pub fn entrench_text(report: &EntrenchmentReport<Rational>, names: &NameMap) -> String {
    let mut out = format!("pdMax {}\n", report.pd_max);
    for (p, e) in &report.predicates {
        let args: Vec<String> = report.arguments.get(p).into_iter().flatten().map(ToString::to_string).collect();
        let _ = writeln!(out, "{} e={} pd={} args=[{}]", names.apply(p), e.value, e.distance, args.join(", "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entrenchment::entrenchment_report;
    use crate::parse::{parse_ps, parse_theory};

    #[test]
    fn name_map_replaces_whole_identifiers() {
        let map = NameMap::parse("% comment\nbird_r1 = birdFlying\n").unwrap();
        assert_eq!(map.apply("A1: bird_r1(X), bird_r12(X) => fly(X)."), "A1: birdFlying(X), bird_r12(X) => fly(X).");
        assert!(NameMap::parse("bird_r1 birdFlying").is_err());
    }

    #[test]
    fn entrench_json_rounds_and_keeps_exact() {
        let t = parse_theory(
            "A1: divorced(X), notDivorced(X) => .\nA2: hadHusband(X) => marriedWoman(X).\n\
             A3: marriedWoman(X) => notDivorced(X).\nA4: => hadHusband(leticia).\nA5: => hasHusband(flor).",
        )
        .unwrap();
        let ps = parse_ps("[true]\nnotDivorced(flor).\n[false]\nnotDivorced(leticia).").unwrap();
        let j = entrench_json(&entrenchment_report(&t, &ps), &NameMap::default());
        assert_eq!(j.entrenchment["hadHusband"], 0.33);
        assert_eq!(j.entrenchment["marriedWoman"], 0.67);
        assert_eq!(j.exact["hadHusband"], "1/3");
        assert_eq!(j.distance["hasHusband"], None);
        assert_eq!(j.arguments["notDivorced"], [ArgumentJson::Protected("PROTECTED".into())]);
        let text = to_json(&j);
        assert!(text.contains("\"notDivorced\": 1.0"));
    }
}
