//! Bounded search for minimal repair plans and their ranking.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rayon::prelude::*;

use crate::entrenchment::{RepairScore, ScoreCategory, ScoreValue, Scorer};
use crate::error::RepairError;
use crate::inference::{explain, faulty_atoms, least_model, una_atoms, Fault, FaultKind, Model};
use crate::repair::{candidates, RepairOperation, RepairPlan};
use crate::theory::{Atom, Clause, Name, PreferredStructure, Term, Theory};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_plan_length: usize,
    pub max_candidates_per_fault: usize,
    pub max_results: usize,
    /// Treat derived equalities between distinct constants as faults.
    pub una: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_plan_length: 3, max_candidates_per_fault: 64, max_results: 10, una: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedRepair {
    pub plan: RepairPlan,
    pub theory: Theory,
    pub score: RepairScore,
    pub rank: usize,
}

/// Faulty atoms, optionally with unique-name violations as incompatibilities.
pub(crate) fn diagnose(model: &Model, ps: &PreferredStructure, una: bool) -> Vec<(FaultKind, Atom)> {
    let mut out = faulty_atoms(model, ps);
    if una {
        for a in una_atoms(model) {
            let entry = (FaultKind::Incompatibility, a);
            if !out.contains(&entry) {
                out.push(entry);
            }
        }
    }
    out
}

/// Faults with proofs and failure frontiers, honouring the UNA flag.
pub fn faults(theory: &Theory, ps: &PreferredStructure, una: bool) -> Vec<Fault> {
    let model = least_model(theory);
    diagnose(&model, ps, una).into_iter().map(|(k, a)| explain(theory, &model, k, a)).collect()
}

struct Node {
    theory: Theory,
    plan: Vec<RepairOperation>,
    model: Model,
    faults: Vec<(FaultKind, Atom)>,
}

/// Ranked minimal repairs of `theory` within the configured bounds. A
/// fault-free theory comes back unchanged with an empty plan.
pub fn repair(theory: &Theory, ps: &PreferredStructure, cfg: SearchConfig) -> Vec<RankedRepair> {
    let model = least_model(theory);
    let initial = diagnose(&model, ps, cfg.una);
    let scorer = Scorer::new(theory, &model, ps);
    if initial.is_empty() {
        return vec![RankedRepair {
            plan: RepairPlan::default(),
            theory: theory.clone(),
            score: RepairScore { category: ScoreCategory::ContentChange, value: ScoreValue::Finite(0.into()) },
            rank: 1,
        }];
    }
    let base: BTreeSet<Name> = theory
        .signature()
        .predicates
        .keys()
        .chain(&theory.signature().constants)
        .cloned()
        .chain(ps.symbols())
        .collect();
    let taken = ps.symbols();
    let fault_bound = 2 * initial.len();

    let mut visited: HashSet<String> = HashSet::from([canonical(theory, theory, &base)]);
    let mut frontier = vec![Node { theory: theory.clone(), plan: Vec::new(), model, faults: initial }];
    let mut solutions: Vec<(RepairPlan, Theory)> = Vec::new();
    for _ in 0..cfg.max_plan_length {
        let expanded: Vec<Vec<Node>> = frontier.par_iter().map(|n| expand(n, ps, &taken, &cfg)).collect();
        let mut next = Vec::new();
        for child in expanded.into_iter().flatten() {
            if child.faults.is_empty() {
                solutions.push((RepairPlan::new(child.plan), child.theory));
            } else if child.faults.len() <= fault_bound && visited.insert(canonical(theory, &child.theory, &base)) {
                next.push(child);
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }

    let minimal: Vec<bool> = solutions.par_iter().map(|(p, _)| minimal_with(p, theory, ps, cfg.una)).collect();
    let original = least_model(theory);
    let mut best: BTreeMap<String, (RankKey, RepairPlan, Theory)> = BTreeMap::new();
    for ((plan, repaired), ok) in solutions.into_iter().zip(minimal) {
        if !ok {
            continue;
        }
        let key = RankKey::new(&scorer, &plan, &repaired, &original);
        let canon = canonical(theory, &repaired, &base);
        if best.get(&canon).is_none_or(|(k, _, _)| key < *k) {
            best.insert(canon, (key, plan, repaired));
        }
    }
    let mut ranked: Vec<_> = best.into_values().collect();
    ranked.sort_by(|a, b| a.0.cmp(&b.0));
    ranked
        .into_iter()
        .take(cfg.max_results)
        .enumerate()
        .map(|(i, (key, plan, theory))| RankedRepair { plan, theory, score: key.score, rank: i + 1 })
        .collect()
}

fn expand(node: &Node, ps: &PreferredStructure, taken: &BTreeSet<Name>, cfg: &SearchConfig) -> Vec<Node> {
    let mut seen = HashSet::new();
    let mut ops = Vec::new();
    for (kind, atom) in &node.faults {
        let fault = explain(&node.theory, &node.model, *kind, atom.clone());
        for op in candidates(&node.theory, &node.model, &fault, taken).into_iter().take(cfg.max_candidates_per_fault) {
            if seen.insert(op.clone()) {
                ops.push(op);
            }
        }
    }
    ops.into_iter()
        .filter_map(|op| {
            let theory = op.apply(&node.theory).ok()?;
            let model = least_model(&theory);
            let faults = diagnose(&model, ps, cfg.una);
            let mut plan = node.plan.clone();
            plan.push(op);
            Some(Node { theory, plan, model, faults })
        })
        .collect()
}

/// Lexicographic ranking key: score, plan length, original theorems lost,
/// ground assertions added, then the plan text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct RankKey {
    score: RepairScore,
    length: usize,
    lost: usize,
    assertions: usize,
    text: Vec<String>,
}

impl RankKey {
    fn new(scorer: &Scorer, plan: &RepairPlan, repaired: &Theory, original: &Model) -> Self {
        let model = least_model(repaired);
        RankKey {
            score: scorer.score(plan, repaired),
            length: plan.len(),
            lost: original.atoms().iter().filter(|a| !model.contains(a)).count(),
            assertions: plan
                .operations
                .iter()
                .filter(|op| matches!(op, RepairOperation::Abd1 { clause } if clause.body.is_empty()))
                .count(),
            text: plan.lines(),
        }
    }
}

/// Whether the plan repairs the theory and every operation is needed:
/// dropping any one of them leaves a faulty theory or an inapplicable plan.
pub fn is_minimal(plan: &RepairPlan, original: &Theory, ps: &PreferredStructure) -> Result<bool, RepairError> {
    let repaired = plan.apply(original)?;
    if !diagnose(&least_model(&repaired), ps, false).is_empty() {
        return Ok(false);
    }
    Ok(minimal_with(plan, original, ps, false))
}

fn minimal_with(plan: &RepairPlan, original: &Theory, ps: &PreferredStructure, una: bool) -> bool {
    (0..plan.len()).all(|skip| {
        let ops = plan.operations.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, op)| op.clone());
        match RepairPlan::new(ops.collect()).apply(original) {
            Ok(t) => !diagnose(&least_model(&t), ps, una).is_empty(),
            Err(_) => true,
        }
    })
}

/// Structural key of a repaired theory, identical for theories that differ
/// only in the names of fresh symbols, added clause ids or variables.
pub(crate) fn canonical(original: &Theory, theory: &Theory, base: &BTreeSet<Name>) -> String {
    let mask = |c: &Clause| {
        let mut vars = Vec::new();
        let body: Vec<String> = c.body.iter().map(|a| atom_key(a, base, &mut vars, None)).collect();
        let head = c.head.as_ref().map(|a| atom_key(a, base, &mut vars, None)).unwrap_or_default();
        format!("{} => {}", body.join(", "), head)
    };
    let mut kept: Vec<(usize, &Clause)> = Vec::new();
    let mut added: Vec<(String, &Clause)> = Vec::new();
    for c in theory.clauses() {
        match original.position(&c.id) {
            Some(pos) => kept.push((pos, c)),
            None => added.push((mask(c), c)),
        }
    }
    kept.sort_by_key(|(pos, _)| *pos);
    added.sort_by(|a, b| a.0.cmp(&b.0));
    let mut fresh: Vec<Name> = Vec::new();
    let mut out = String::new();
    let order = kept.iter().map(|(_, c)| (Some(&c.id), *c)).chain(added.iter().map(|(_, c)| (None, *c)));
    for (k, (id, c)) in order.enumerate() {
        let mut vars = Vec::new();
        let body: Vec<String> = c.body.iter().map(|a| atom_key(a, base, &mut vars, Some(&mut fresh))).collect();
        let head = c.head.as_ref().map(|a| atom_key(a, base, &mut vars, Some(&mut fresh))).unwrap_or_default();
        match id {
            Some(id) => out.push_str(id),
            None => out.push_str(&format!("#c{k}")),
        }
        out.push_str(&format!(": {} => {}\n", body.join(", "), head));
    }
    out
}

fn atom_key(atom: &Atom, base: &BTreeSet<Name>, vars: &mut Vec<Name>, fresh: Option<&mut Vec<Name>>) -> String {
    let mut fresh = fresh;
    let mut symbol = |s: &Name| -> String {
        if base.contains(s) {
            return s.to_string();
        }
        match fresh.as_deref_mut() {
            Some(f) => {
                let k = f.iter().position(|x| x == s).unwrap_or_else(|| {
                    f.push(s.clone());
                    f.len() - 1
                });
                format!("#f{k}")
            }
            None => "#f".to_string(),
        }
    };
    let mut parts = vec![symbol(&atom.predicate)];
    for t in &atom.args {
        parts.push(match t {
            Term::Const(c) => symbol(c),
            Term::Var(v) => {
                let k = vars.iter().position(|x| x == v).unwrap_or_else(|| {
                    vars.push(v.clone());
                    vars.len() - 1
                });
                format!("?{k}")
            }
        });
    }
    parts.join(" ")
}
