//! Bottom-up semi-naive evaluation of the least Herbrand model.

use std::collections::{HashMap, HashSet};

use crate::theory::{Atom, Name, Term, Theory};

type Tuple = Vec<Name>;
type Relations = HashMap<Name, HashSet<Tuple>>;

/// Set of ground atoms derivable from a theory.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    relations: Relations,
}

impl Model {
    pub fn contains(&self, atom: &Atom) -> bool {
        match atom.tuple() {
            Some(t) => self.contains_tuple(&atom.predicate, &t),
            None => false,
        }
    }

    pub fn contains_tuple(&self, predicate: &str, tuple: &[Name]) -> bool {
        self.relations.get(predicate).is_some_and(|r| r.contains(tuple))
    }

    /// Tuples of one predicate, in no particular order.
    pub fn tuples<'a>(&'a self, predicate: &str) -> impl Iterator<Item = &'a Tuple> + 'a {
        self.relations.get(predicate).into_iter().flatten()
    }

    /// Whether some tuple agrees with every bound position of `pattern`.
    pub fn matches(&self, predicate: &str, pattern: &[Option<&Name>]) -> bool {
        self.tuples(predicate).any(|t| t.iter().zip(pattern).all(|(c, p)| p.is_none_or(|p| p == c)))
    }

    /// All atoms, sorted.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out: Vec<Atom> = self
            .relations
            .iter()
            .flat_map(|(p, rel)| rel.iter().map(|t| Atom::new(p.clone(), t.iter().cloned().map(Term::Const).collect())))
            .collect();
        out.sort();
        out
    }

    pub fn len(&self) -> usize {
        self.relations.values().map(HashSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn insert(&mut self, predicate: &Name, tuple: Tuple) -> bool {
        self.relations.entry(predicate.clone()).or_default().insert(tuple)
    }
}

type Binding = Vec<(Name, Name)>;

fn lookup<'a>(binding: &'a Binding, var: &Name) -> Option<&'a Name> {
    binding.iter().find(|(v, _)| v == var).map(|(_, c)| c)
}

/// Extends `binding` so that `atom` matches `tuple`; returns how many
/// bindings were pushed, or `None` on clash (binding left untouched).
fn match_tuple(atom: &Atom, tuple: &[Name], binding: &mut Binding) -> Option<usize> {
    let start = binding.len();
    for (term, c) in atom.args.iter().zip(tuple) {
        let ok = match term {
            Term::Const(k) => k == c,
            Term::Var(v) => match lookup(binding, v) {
                Some(b) => b == c,
                None => {
                    binding.push((v.clone(), c.clone()));
                    true
                }
            },
        };
        if !ok {
            binding.truncate(start);
            return None;
        }
    }
    Some(binding.len() - start)
}

fn instantiate(atom: &Atom, binding: &Binding) -> Tuple {
    atom.args
        .iter()
        .map(|t| match t {
            Term::Const(c) => c.clone(),
            Term::Var(v) => lookup(binding, v).expect("range-restricted head").clone(),
        })
        .collect()
}

fn join(
    body: &[Atom],
    idx: usize,
    delta_pos: usize,
    full: &Relations,
    delta: &Relations,
    binding: &mut Binding,
    emit: &mut dyn FnMut(&Binding),
) {
    let Some(atom) = body.get(idx) else {
        emit(binding);
        return;
    };
    let source = if idx == delta_pos { delta } else { full };
    let Some(rel) = source.get(&atom.predicate) else { return };
    for tuple in rel {
        if let Some(pushed) = match_tuple(atom, tuple, binding) {
            join(body, idx + 1, delta_pos, full, delta, binding, emit);
            binding.truncate(binding.len() - pushed);
        }
    }
}

/// Least fixed point of the immediate-consequence operator. Goal clauses
/// contribute nothing.
pub fn least_model(theory: &Theory) -> Model {
    let mut model = Model::default();
    let mut rules = Vec::new();
    for c in theory.clauses() {
        match (&c.head, c.body.is_empty()) {
            (Some(h), true) => {
                model.insert(&h.predicate, h.tuple().expect("ground assertion"));
            }
            (Some(h), false) => rules.push((&c.body, h)),
            (None, _) => {}
        }
    }

    let mut delta = model.relations.clone();
    while !delta.is_empty() {
        let mut fresh = Model::default();
        for (body, head) in &rules {
            for pos in 0..body.len() {
                if !delta.contains_key(&body[pos].predicate) {
                    continue;
                }
                let mut binding = Vec::new();
                join(body, 0, pos, &model.relations, &delta, &mut binding, &mut |b| {
                    let t = instantiate(head, b);
                    if !model.contains_tuple(&head.predicate, &t) {
                        fresh.insert(&head.predicate, t);
                    }
                });
            }
        }
        for (p, rel) in &fresh.relations {
            for t in rel {
                model.insert(p, t.clone());
            }
        }
        delta = fresh.relations;
    }
    model
}
