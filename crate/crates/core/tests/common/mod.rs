//! Random theories and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use datalog_repair::theory::{Atom, Clause, PreferredStructure, Term, Theory};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/corpus");

pub fn corpus(file: &str) -> String {
    std::fs::read_to_string(format!("{CORPUS}/{file}")).unwrap()
}

pub fn theory(file: &str) -> Theory {
    datalog_repair::parse_theory(&corpus(file)).unwrap()
}

pub fn ps(file: &str) -> PreferredStructure {
    datalog_repair::parse_ps(&corpus(file)).unwrap()
}

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub predicates: usize,
    pub constants: usize,
    pub clauses: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { predicates: 8, constants: 5, clauses: 12 }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn constant(rng: &mut ChaCha8Rng, n: usize) -> Term {
    Term::constant(&format!("c{}", rng.gen_range(0..n)))
}

/// A well-formed random theory with at most the given numbers of
/// predicates, constants and clauses.
pub fn random_theory(rng: &mut ChaCha8Rng, shape: Shape) -> Theory {
    let np = rng.gen_range(1..=shape.predicates);
    let nc = rng.gen_range(1..=shape.constants);
    let arities: Vec<usize> = (0..np).map(|_| rng.gen_range(0..=2)).collect();
    let n = rng.gen_range(1..=shape.clauses);
    let vars = ["X", "Y", "Z"];
    let mut clauses = Vec::new();
    for k in 0..n {
        let id = format!("A{}", k + 1);
        let roll: f64 = rng.gen();
        let head_pred = rng.gen_range(0..np);
        if roll < 0.4 {
            let args = (0..arities[head_pred]).map(|_| constant(rng, nc)).collect();
            clauses.push(Clause::new(id, vec![], Some(Atom::new(format!("p{head_pred}"), args))).unwrap());
            continue;
        }
        let body_len = rng.gen_range(1..=2);
        let body: Vec<Atom> = (0..body_len)
            .map(|_| {
                let p = rng.gen_range(0..np);
                let args = (0..arities[p])
                    .map(|_| if rng.gen_bool(0.8) { Term::var(vars.choose(rng).unwrap()) } else { constant(rng, nc) })
                    .collect();
                Atom::new(format!("p{p}"), args)
            })
            .collect();
        if roll > 0.95 {
            clauses.push(Clause::new(id, body, None).unwrap());
            continue;
        }
        let bound: Vec<Term> = body
            .iter()
            .flat_map(|a| a.variables().cloned())
            .map(Term::Var)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let args = (0..arities[head_pred])
            .map(|_| match bound.choose(rng) {
                Some(v) if rng.gen_bool(0.85) => v.clone(),
                _ => constant(rng, nc),
            })
            .collect();
        clauses.push(Clause::new(id, body, Some(Atom::new(format!("p{head_pred}"), args))).unwrap());
    }
    Theory::new(clauses).unwrap()
}

/// Every ground atom over the theory's predicates and constants.
pub fn herbrand_base(theory: &Theory) -> Vec<Atom> {
    let consts: Vec<String> = theory.signature().constants.iter().map(|c| c.to_string()).collect();
    let mut out = Vec::new();
    for (p, &arity) in &theory.signature().predicates {
        let mut tuples: Vec<Vec<String>> = vec![vec![]];
        for _ in 0..arity {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    consts.iter().map(move |c| {
                        let mut t = t.clone();
                        t.push(c.clone());
                        t
                    })
                })
                .collect();
        }
        for t in tuples {
            let refs: Vec<&str> = t.iter().map(String::as_str).collect();
            out.push(Atom::ground(p, &refs));
        }
    }
    out
}

/// A preferred structure mixing theorems and non-theorems, each labelled at
/// random.
pub fn random_ps(rng: &mut ChaCha8Rng, theory: &Theory) -> PreferredStructure {
    let model = oracle_model(theory);
    let mut base = herbrand_base(theory);
    base.shuffle(rng);
    let k = rng.gen_range(0..=base.len().min(6));
    let (mut t, mut f) = (Vec::new(), Vec::new());
    for a in base.into_iter().take(k) {
        let keep_right = rng.gen_bool(0.6);
        if model.contains(&a) == keep_right {
            t.push(a);
        } else {
            f.push(a);
        }
    }
    PreferredStructure::new(t, f).unwrap()
}

/// Random theory and preferred structure with at least one fault.
pub fn random_faulty(rng: &mut ChaCha8Rng, shape: Shape) -> (Theory, PreferredStructure) {
    loop {
        let t = random_theory(rng, shape);
        let ps = random_ps(rng, &t);
        let model = oracle_model(&t);
        let faulty =
            ps.true_set().iter().any(|a| !model.contains(a)) || ps.false_set().iter().any(|a| model.contains(a));
        if faulty {
            return (t, ps);
        }
    }
}

fn bind(atom: &Atom, env: &BTreeMap<String, String>) -> Option<Atom> {
    let args = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Const(c) => Some(Term::Const(c.clone())),
            Term::Var(v) => env.get(&**v).map(|c| Term::constant(c)),
        })
        .collect::<Option<Vec<_>>>()?;
    Some(Atom::new(atom.predicate.clone(), args))
}

/// Naive least model: every rule under every assignment of its variables
/// to theory constants, repeated until nothing changes.
pub fn oracle_model(theory: &Theory) -> BTreeSet<Atom> {
    let consts: Vec<String> = theory.signature().constants.iter().map(|c| c.to_string()).collect();
    let mut model = BTreeSet::new();
    loop {
        let mut changed = false;
        for c in theory.clauses() {
            let Some(head) = &c.head else { continue };
            let vars: Vec<String> = c.variables().iter().map(|v| v.to_string()).collect();
            let total = consts.len().pow(vars.len() as u32);
            for mut code in 0..total {
                let mut env = BTreeMap::new();
                for v in &vars {
                    env.insert(v.clone(), consts[code % consts.len()].clone());
                    code /= consts.len();
                }
                if c.body.iter().all(|b| bind(b, &env).is_some_and(|a| model.contains(&a))) {
                    if let Some(h) = bind(head, &env) {
                        changed |= model.insert(h);
                    }
                }
            }
        }
        if !changed {
            return model;
        }
    }
}

/// Confidence distances by repeated relaxation over clause body/head pairs.
pub fn oracle_distances(theory: &Theory, protected: &BTreeSet<String>) -> BTreeMap<String, Option<usize>> {
    let mut dist: BTreeMap<String, Option<usize>> =
        theory.signature().predicates.keys().map(|p| (p.to_string(), protected.contains(&**p).then_some(0))).collect();
    loop {
        let mut changed = false;
        for c in theory.clauses() {
            let Some(h) = &c.head else { continue };
            let Some(dh) = dist[&*h.predicate] else { continue };
            for b in &c.body {
                let db = dist[&*b.predicate];
                if db.is_none_or(|d| d > dh + 1) {
                    dist.insert(b.predicate.to_string(), Some(dh + 1));
                    changed = true;
                }
            }
        }
        if !changed {
            return dist;
        }
    }
}

/// Faults recomputed from the oracle model.
pub fn oracle_fault_free(theory: &Theory, ps: &PreferredStructure) -> bool {
    let model = oracle_model(theory);
    ps.true_set().iter().all(|a| model.contains(a)) && ps.false_set().iter().all(|a| !model.contains(a))
}

fn symbols(t: &Theory) -> BTreeSet<String> {
    let sig = t.signature();
    sig.predicates.keys().chain(sig.constants.iter()).map(|s| s.to_string()).collect()
}

/// Clause texts without ids for clauses absent from `original`, with ids
/// for the rest, after renaming symbols through `map`.
fn shape_of(original: &Theory, t: &Theory, map: &BTreeMap<String, String>) -> (BTreeSet<String>, Vec<String>) {
    let names = datalog_repair::report::NameMap(map.clone());
    let mut kept = BTreeSet::new();
    let mut added = Vec::new();
    for c in t.clauses() {
        let text = names.apply(&c.to_string());
        let body = text.split_once(": ").map_or(text.clone(), |(_, b)| b.to_string());
        if original.clause(&c.id).is_some() {
            kept.insert(text);
        } else {
            added.push(body);
        }
    }
    added.sort();
    (kept, added)
}

/// Whether `a` and `b`, both repairs of `original`, coincide once the
/// symbols new to `a` are mapped one-to-one onto those new to `b`.
pub fn equal_modulo_fresh(original: &Theory, a: &Theory, b: &Theory) -> bool {
    let base = symbols(original);
    let fa: Vec<String> = symbols(a).difference(&base).cloned().collect();
    let fb: Vec<String> = symbols(b).difference(&base).cloned().collect();
    if fa.len() != fb.len() {
        return false;
    }
    let target = shape_of(original, b, &BTreeMap::new());
    permutations(fb.len()).into_iter().any(|perm| {
        let map = fa.iter().cloned().zip(perm.iter().map(|&i| fb[i].clone())).collect();
        shape_of(original, a, &map) == target
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}
