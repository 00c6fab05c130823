//! Top-down linear resolution with leftmost selection and clause-order
//! branching. Used only to extract proof traces and failure frontiers; the
//! bottom-up model decides derivability.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::fault::{FailureFrontier, FrontierEntry, Mismatch};
use super::model::Model;
use super::proof::{Proof, ProofStep};
use crate::theory::{Atom, Name, Term, Theory};

#[derive(Debug, Clone, PartialEq, Eq)]
enum T {
    Var(usize),
    Const(Name),
}

#[derive(Debug, Clone)]
enum CArg {
    Var(usize),
    Const(Name),
}

#[derive(Debug, Clone)]
struct CAtom {
    pred: Name,
    args: Vec<CArg>,
}

#[derive(Debug, Clone)]
struct CClause {
    id: Name,
    head: Option<CAtom>,
    body: Vec<CAtom>,
    var_names: Vec<Name>,
}

fn compile(theory: &Theory) -> Vec<CClause> {
    theory
        .clauses()
        .iter()
        .map(|c| {
            let mut var_names: Vec<Name> = Vec::new();
            let mut conv = |a: &Atom| CAtom {
                pred: a.predicate.clone(),
                args: a
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Const(k) => CArg::Const(k.clone()),
                        Term::Var(v) => CArg::Var(match var_names.iter().position(|n| n == v) {
                            Some(i) => i,
                            None => {
                                var_names.push(v.clone());
                                var_names.len() - 1
                            }
                        }),
                    })
                    .collect(),
            };
            let body = c.body.iter().map(&mut conv).collect();
            let head = c.head.as_ref().map(&mut conv);
            CClause { id: c.id.clone(), head, body, var_names }
        })
        .collect()
}

#[derive(Debug)]
struct Ancestor {
    pred: Name,
    args: Vec<T>,
    parent: Option<Arc<Ancestor>>,
}

#[derive(Debug, Clone)]
struct Goal {
    pred: Name,
    args: Vec<T>,
    /// (step index, clause index, body index) of the body atom that spawned it.
    origin: Option<(usize, usize, usize)>,
    ancestors: Option<Arc<Ancestor>>,
}

#[derive(Debug, Clone)]
struct RawStep {
    clause: usize,
    offset: usize,
    args: Vec<T>,
    pred: Name,
    bound: Vec<bool>,
    parent: Option<(usize, usize)>,
}

struct Engine<'a> {
    clauses: Vec<CClause>,
    by_pred: HashMap<Name, Vec<usize>>,
    model: Option<&'a Model>,
    slots: Vec<Option<T>>,
    trail: Vec<usize>,
    steps: Vec<RawStep>,
    budget: usize,
}

enum Flow {
    Continue,
    Stop,
}

impl<'a> Engine<'a> {
    fn new(theory: &Theory, model: Option<&'a Model>) -> Self {
        let clauses = compile(theory);
        let mut by_pred: HashMap<Name, Vec<usize>> = HashMap::new();
        for (i, c) in clauses.iter().enumerate() {
            if let Some(h) = &c.head {
                by_pred.entry(h.pred.clone()).or_default().push(i);
            }
        }
        Engine { clauses, by_pred, model, slots: Vec::new(), trail: Vec::new(), steps: Vec::new(), budget: 0 }
    }

    fn walk(&self, t: &T) -> T {
        let mut cur = t.clone();
        while let T::Var(i) = cur {
            match &self.slots[i] {
                Some(next) => cur = next.clone(),
                None => return T::Var(i),
            }
        }
        cur
    }

    fn bind(&mut self, var: usize, value: T) {
        self.slots[var] = Some(value);
        self.trail.push(var);
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("trail");
            self.slots[v] = None;
        }
    }

    fn unify(&mut self, a: &T, b: &T) -> bool {
        match (self.walk(a), self.walk(b)) {
            (T::Const(x), T::Const(y)) => x == y,
            (T::Var(i), T::Var(j)) if i == j => true,
            (T::Var(i), other) | (other, T::Var(i)) => {
                self.bind(i, other);
                true
            }
        }
    }

    fn rename(arg: &CArg, offset: usize) -> T {
        match arg {
            CArg::Var(i) => T::Var(offset + i),
            CArg::Const(c) => T::Const(c.clone()),
        }
    }

    fn alloc(&mut self, clause: usize) -> usize {
        let offset = self.slots.len();
        let n = self.clauses[clause].var_names.len();
        self.slots.resize(offset + n, None);
        offset
    }

    fn free(&mut self, offset: usize) {
        self.slots.truncate(offset);
    }

    /// Could the (walked) goal still be satisfied by the model?
    fn plausible(&self, pred: &Name, args: &[T]) -> bool {
        let Some(model) = self.model else { return true };
        let pattern: Vec<Option<&Name>> = args
            .iter()
            .map(|t| match t {
                T::Const(c) => Some(c),
                T::Var(_) => None,
            })
            .collect();
        model.matches(pred, &pattern)
    }

    fn is_loop(&self, goal: &Goal, args: &[T]) -> bool {
        let mut cur = goal.ancestors.as_deref();
        while let Some(a) = cur {
            if a.pred == goal.pred {
                let walked: Vec<T> = a.args.iter().map(|t| self.walk(t)).collect();
                if walked == args {
                    return true;
                }
            }
            cur = a.parent.as_deref();
        }
        false
    }

    /// Depth-first resolution; `depth` bounds the number of further steps.
    fn solve(
        &mut self,
        goals: Vec<Goal>,
        depth: usize,
        loop_check: bool,
        on_success: &mut dyn FnMut(&Self) -> Flow,
        on_failure: &mut dyn FnMut(&mut Self, &Goal, &[T]),
    ) -> Flow {
        let Some((goal, rest)) = goals.split_first() else {
            return on_success(self);
        };
        if self.budget == 0 || goals.len() > depth {
            return Flow::Continue;
        }
        self.budget -= 1;
        let args: Vec<T> = goal.args.iter().map(|t| self.walk(t)).collect();
        if !self.plausible(&goal.pred, &args) || (loop_check && self.is_loop(goal, &args)) {
            return Flow::Continue;
        }
        let candidates = self.by_pred.get(&goal.pred).cloned().unwrap_or_default();
        let mut resolved = false;
        for ci in candidates {
            let head = self.clauses[ci].head.clone().expect("indexed by head");
            if head.args.len() != args.len() {
                continue;
            }
            let offset = self.alloc(ci);
            let mark = self.trail.len();
            let ok = head.args.iter().zip(&args).all(|(h, g)| {
                let h = Self::rename(h, offset);
                self.unify(&h, g)
            });
            if ok {
                resolved = true;
                let step_index = self.steps.len();
                self.steps.push(RawStep {
                    clause: ci,
                    offset,
                    bound: args.iter().map(|t| matches!(t, T::Const(_))).collect(),
                    args: args.clone(),
                    pred: goal.pred.clone(),
                    parent: goal.origin.map(|(s, _, b)| (s, b)),
                });
                let ancestors = Some(Arc::new(Ancestor {
                    pred: goal.pred.clone(),
                    args: args.clone(),
                    parent: goal.ancestors.clone(),
                }));
                let mut next: Vec<Goal> = self.clauses[ci]
                    .body
                    .iter()
                    .enumerate()
                    .map(|(bi, a)| Goal {
                        pred: a.pred.clone(),
                        args: a.args.iter().map(|x| Self::rename(x, offset)).collect(),
                        origin: Some((step_index, ci, bi)),
                        ancestors: ancestors.clone(),
                    })
                    .collect();
                next.extend(rest.iter().cloned());
                let flow = self.solve(next, depth - 1, loop_check, on_success, on_failure);
                self.steps.pop();
                if let Flow::Stop = flow {
                    self.undo(mark);
                    self.free(offset);
                    return Flow::Stop;
                }
            }
            self.undo(mark);
            self.free(offset);
        }
        if !resolved {
            on_failure(self, goal, &args);
        }
        Flow::Continue
    }

    fn ground(&self, t: &T) -> Name {
        match self.walk(t) {
            T::Const(c) => c,
            T::Var(_) => panic!("proof left a variable unbound"),
        }
    }

    fn proof(&self, root: &Atom) -> Proof {
        let steps = self
            .steps
            .iter()
            .map(|s| {
                let clause = &self.clauses[s.clause];
                let substitution: BTreeMap<Name, Name> = clause
                    .var_names
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v.clone(), self.ground(&T::Var(s.offset + i))))
                    .collect();
                ProofStep {
                    clause: clause.id.clone(),
                    goal: Atom::new(s.pred.clone(), s.args.iter().map(|t| Term::Const(self.ground(t))).collect()),
                    substitution,
                    parent: s.parent,
                    bound_at_selection: s.bound.clone(),
                }
            })
            .collect();
        Proof { root: root.clone(), steps }
    }

    fn to_atom(&self, pred: &Name, args: &[T]) -> Atom {
        let mut vars: Vec<usize> = Vec::new();
        let args = args
            .iter()
            .map(|t| match self.walk(t) {
                T::Const(c) => Term::Const(c),
                T::Var(i) => {
                    let k = vars.iter().position(|&v| v == i).unwrap_or_else(|| {
                        vars.push(i);
                        vars.len() - 1
                    });
                    Term::Var(Name::from(format!("G{}", k + 1)))
                }
            })
            .collect();
        Atom::new(pred.clone(), args)
    }

    /// Nearest-miss axiom for a failing goal: longest matching prefix of
    /// (predicate, arg1, ..., argn), ties to the earlier clause.
    fn nearest_miss(&mut self, pred: &Name, args: &[T]) -> (Option<Name>, Mismatch) {
        let mut best: Option<(usize, usize)> = None;
        for ci in 0..self.clauses.len() {
            let Some(head) = self.clauses[ci].head.clone() else { continue };
            let score = if head.pred == *pred && head.args.len() == args.len() {
                let offset = self.alloc(ci);
                let mark = self.trail.len();
                let mut prefix = 0;
                for (h, g) in head.args.iter().zip(args) {
                    let h = Self::rename(h, offset);
                    if !self.unify(&h, g) {
                        break;
                    }
                    prefix += 1;
                }
                self.undo(mark);
                self.free(offset);
                1 + prefix
            } else {
                0
            };
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((ci, score));
            }
        }
        match best {
            None => (None, Mismatch::Predicate),
            Some((ci, 0)) => (Some(self.clauses[ci].id.clone()), Mismatch::Predicate),
            Some((ci, s)) => (Some(self.clauses[ci].id.clone()), Mismatch::Argument(s)),
        }
    }

    fn root_goal(atom: &Atom) -> Goal {
        Goal {
            pred: atom.predicate.clone(),
            args: atom
                .args
                .iter()
                .map(|t| match t {
                    Term::Const(c) => T::Const(c.clone()),
                    Term::Var(_) => panic!("root goal must be ground"),
                })
                .collect(),
            origin: None,
            ancestors: None,
        }
    }
}

const PROVE_BUDGET: usize = 2_000_000;
const MAX_PROOF_STEPS: usize = 4096;

/// First proof under iterative deepening on the number of resolution steps,
/// or `None` when the goal is not in `model`.
pub(crate) fn first_proof(theory: &Theory, model: &Model, goal: &Atom) -> Option<Proof> {
    if !model.contains(goal) {
        return None;
    }
    let mut engine = Engine::new(theory, Some(model));
    engine.budget = PROVE_BUDGET;
    for bound in 1..=MAX_PROOF_STEPS {
        let mut found = None;
        engine.solve(
            vec![Engine::root_goal(goal)],
            bound,
            true,
            &mut |e| {
                found = Some(e.proof(goal));
                Flow::Stop
            },
            &mut |_, _, _| {},
        );
        if found.is_some() || engine.budget == 0 {
            return found;
        }
    }
    None
}

/// Distinct proofs found depth-first within `max_steps`, at most `max_proofs`.
pub(crate) fn all_proofs(
    theory: &Theory,
    model: &Model,
    goal: &Atom,
    max_proofs: usize,
    max_steps: usize,
) -> Vec<Proof> {
    if !model.contains(goal) || max_proofs == 0 {
        return Vec::new();
    }
    let mut engine = Engine::new(theory, Some(model));
    engine.budget = PROVE_BUDGET;
    let mut out: Vec<Proof> = Vec::new();
    engine.solve(
        vec![Engine::root_goal(goal)],
        max_steps,
        false,
        &mut |e| {
            let p = e.proof(goal);
            if !out.contains(&p) {
                out.push(p);
            }
            if out.len() >= max_proofs {
                Flow::Stop
            } else {
                Flow::Continue
            }
        },
        &mut |_, _, _| {},
    );
    out
}

const FRONTIER_STEPS: usize = 32;
const FRONTIER_BUDGET: usize = 20_000;
const FRONTIER_ENTRIES: usize = 32;

/// Failing steps of the partial derivations of an underivable goal.
pub(crate) fn failure_frontier(theory: &Theory, goal: &Atom) -> FailureFrontier {
    let mut engine = Engine::new(theory, None);
    engine.budget = FRONTIER_BUDGET;
    let mut entries: Vec<FrontierEntry> = Vec::new();
    engine.solve(vec![Engine::root_goal(goal)], FRONTIER_STEPS, true, &mut |_| Flow::Continue, &mut |e, g, args| {
        if entries.len() >= FRONTIER_ENTRIES {
            return;
        }
        let atom = e.to_atom(&g.pred, args);
        let origin = g.origin.map(|(_, c, b)| (e.clauses[c].id.clone(), b));
        let (nearest, mismatch) = e.nearest_miss(&g.pred, args);
        let mut ancestors = Vec::new();
        let mut cur = g.ancestors.as_deref();
        while let Some(a) = cur {
            ancestors.push(e.to_atom(&a.pred, &a.args));
            cur = a.parent.as_deref();
        }
        ancestors.reverse();
        let entry = FrontierEntry { goal: atom, origin, nearest, mismatch, ancestors };
        if !entries.contains(&entry) {
            entries.push(entry);
        }
    });
    FailureFrontier { entries }
}
