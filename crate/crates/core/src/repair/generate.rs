use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::entrenchment::domain_in;
use crate::inference::{least_model, Fault, FrontierEntry, Mismatch, Model, Proof};
use crate::theory::{Atom, Clause, Name, Site, Term, Theory, EQUALITY};

use super::ops::{fresh_variable, RepairOperation};

/// Most preconditions proposed per rule.
pub const MAX_PRECONDITIONS: usize = 16;
/// Most theorem-based abductions proposed per failing goal.
pub const MAX_THEOREM_RULES: usize = 16;

struct Generator<'a> {
    theory: &'a Theory,
    model: &'a Model,
    /// Symbols fresh names must avoid besides the signature.
    taken: &'a BTreeSet<Name>,
    out: Vec<RepairOperation>,
}

/// Candidate repairs blocking the recorded proof of an incompatibility.
/// Only operations that apply cleanly are returned.
pub fn generate_incompat_candidates(theory: &Theory, fault: &Fault) -> Vec<RepairOperation> {
    match fault {
        Fault::Incompatibility { .. } => candidates(theory, &least_model(theory), fault, &BTreeSet::new()),
        Fault::Insufficiency { .. } => Vec::new(),
    }
}

/// Candidate repairs unblocking a failing step of an insufficiency.
/// Only operations that apply cleanly are returned.
pub fn generate_insuff_candidates(theory: &Theory, fault: &Fault) -> Vec<RepairOperation> {
    match fault {
        Fault::Insufficiency { .. } => candidates(theory, &least_model(theory), fault, &BTreeSet::new()),
        Fault::Incompatibility { .. } => Vec::new(),
    }
}

/// Applicable, deduplicated candidates for either kind of fault.
pub(crate) fn candidates(
    theory: &Theory,
    model: &Model,
    fault: &Fault,
    taken: &BTreeSet<Name>,
) -> Vec<RepairOperation> {
    let mut g = Generator { theory, model, taken, out: Vec::new() };
    match fault {
        Fault::Incompatibility { proof, .. } => g.incompatibility(proof),
        Fault::Insufficiency { frontier, .. } => {
            for e in &frontier.entries {
                g.insufficiency(e);
            }
        }
    }
    let mut seen = HashSet::new();
    g.out.into_iter().filter(|op| op.apply(theory).is_ok()).filter(|op| seen.insert(op.clone())).collect()
}

impl Generator<'_> {
    fn fresh(&self, base: &str) -> Name {
        self.theory.signature().fresh_symbol(base, self.taken)
    }

    /// A fresh predicate name, then every other existing predicate of the
    /// same arity.
    fn rename_targets(&self, predicate: &Name, arity: usize) -> Vec<Name> {
        let existing = self
            .theory
            .signature()
            .predicates
            .iter()
            .filter(|(p, &a)| a == arity && *p != predicate && &***p != EQUALITY)
            .map(|(p, _)| p.clone());
        std::iter::once(self.fresh(predicate)).chain(existing).collect()
    }

    fn incompatibility(&mut self, proof: &Proof) {
        for step in &proof.steps {
            let Some(clause) = self.theory.clause(&step.clause) else { continue };
            let Some(head) = &clause.head else { continue };
            let p = &head.predicate;
            self.out.push(RepairOperation::Br1 { clause: clause.id.clone() });
            for to in self.rename_targets(p, head.arity()) {
                self.out.push(RepairOperation::Ref1 {
                    clause: clause.id.clone(),
                    site: Site::Head,
                    from: p.clone(),
                    to,
                });
            }
            let goal_site = step.parent.map(|(s, b)| (proof.steps[s].clause.clone(), Site::Body(b)));
            if let Some((parent, site)) = &goal_site {
                for to in self.rename_targets(p, head.arity()) {
                    self.out.push(RepairOperation::Ref1 { clause: parent.clone(), site: *site, from: p.clone(), to });
                }
            }
            let goal_const = self.fresh(p);
            let axiom_const = self
                .theory
                .signature()
                .fresh_symbol(p, &self.taken.iter().cloned().chain([goal_const.clone()]).collect());
            self.out.push(RepairOperation::Ref2 {
                predicate: p.clone(),
                axiom: clause.id.clone(),
                axiom_const,
                goal: goal_site,
                goal_const,
            });
            for (i, bound) in step.bound_at_selection.iter().enumerate() {
                let Some(c) = step.goal.args[i].as_const().filter(|_| *bound) else { continue };
                let compatible = match &head.args[i] {
                    Term::Var(_) => true,
                    Term::Const(t) => t == c,
                };
                if !compatible {
                    continue;
                }
                let others = domain_in(self.model, p, i + 1).into_iter().filter(|d| d != c);
                for to in std::iter::once(self.fresh(c)).chain(others) {
                    self.out.push(RepairOperation::Ref3 {
                        clause: clause.id.clone(),
                        index: i + 1,
                        from: c.clone(),
                        to,
                    });
                }
            }
        }
        let mut done = BTreeSet::new();
        for step in &proof.steps {
            if done.insert(step.clause.clone()) {
                self.preconditions(&step.clause, &step.substitution);
            }
        }
    }

    /// Preconditions sharing one body variable of a rule whose instance
    /// under `subst` has no match in the model.
    fn preconditions(&mut self, id: &Name, subst: &BTreeMap<Name, Name>) {
        let Some(clause) = self.theory.clause(id) else { return };
        if clause.body.is_empty() {
            return;
        }
        let used = clause.variables();
        let body_vars: BTreeSet<&Name> = clause.body.iter().flat_map(Atom::variables).collect();
        let mut emitted = 0;
        for v in body_vars {
            let Some(value) = subst.get(v) else { continue };
            for (q, &arity) in &self.theory.signature().predicates {
                for j in 0..arity {
                    if emitted >= MAX_PRECONDITIONS {
                        return;
                    }
                    let mut pattern = vec![None; arity];
                    pattern[j] = Some(value);
                    if self.model.matches(q, &pattern) {
                        continue;
                    }
                    let mut fresh = (1..).map(|k| format!("U{k}")).filter(|u| !used.contains(u.as_str()));
                    let args =
                        (0..arity)
                            .map(|k| {
                                if k == j {
                                    Term::Var(v.clone())
                                } else {
                                    Term::var(&fresh.next().expect("unbounded"))
                                }
                            })
                            .collect();
                    let precondition = Atom::new(q.clone(), args);
                    if clause.body.contains(&precondition) {
                        continue;
                    }
                    self.out.push(RepairOperation::Br2 { clause: id.clone(), precondition });
                    emitted += 1;
                }
            }
        }
    }

    fn insufficiency(&mut self, e: &FrontierEntry) {
        let id = self.theory.fresh_clause_id();
        let goal = &e.goal;
        let nearest = e.nearest.as_ref().and_then(|n| self.theory.clause(n));
        let nearest_head = nearest.and_then(|c| c.head.as_ref());

        // Abduction: ground assertions for the goal and its ancestors.
        for a in std::iter::once(goal).chain(e.ancestors.iter().rev()) {
            if a.is_ground() {
                if let Ok(clause) = Clause::new(id.clone(), Vec::new(), Some(a.clone())) {
                    self.out.push(RepairOperation::Abd1 { clause });
                }
            }
        }
        // Abduction by analogy with the rules defining the nearest miss.
        if let Some(h) = nearest_head.filter(|h| h.predicate != goal.predicate && h.arity() == goal.arity()) {
            for r in self.theory.clauses() {
                let Some(rh) = &r.head else { continue };
                if r.body.is_empty() || rh.predicate != h.predicate {
                    continue;
                }
                let head = Atom::new(goal.predicate.clone(), rh.args.clone());
                if let Ok(clause) = Clause::new(id.clone(), r.body.clone(), Some(head)) {
                    self.out.push(RepairOperation::Abd1 { clause });
                }
            }
        }
        // Abduction from theorems sharing constants with a ground goal.
        if goal.is_ground() {
            let constants: BTreeSet<&Name> = goal.constants().collect();
            let mut emitted = 0;
            for m in self.model.atoms() {
                if emitted >= MAX_THEOREM_RULES {
                    break;
                }
                if m == *goal || !m.constants().any(|c| constants.contains(c)) {
                    continue;
                }
                let mut vars: BTreeMap<Name, Name> = BTreeMap::new();
                for c in m.constants() {
                    if constants.contains(c) && !vars.contains_key(c) {
                        let v = variable_name(vars.len());
                        vars.insert(c.clone(), v);
                    }
                }
                let lift = |a: &Atom| {
                    let args = a
                        .args
                        .iter()
                        .map(|t| match t.as_const().and_then(|c| vars.get(c)) {
                            Some(v) => Term::Var(v.clone()),
                            None => t.clone(),
                        })
                        .collect();
                    Atom::new(a.predicate.clone(), args)
                };
                if let Ok(clause) = Clause::new(id.clone(), vec![lift(&m)], Some(lift(goal))) {
                    self.out.push(RepairOperation::Abd1 { clause });
                    emitted += 1;
                }
            }
        }
        let origin = e.origin.as_ref().and_then(|(c, b)| {
            let clause = self.theory.clause(c)?;
            Some((clause, *b, clause.body.get(*b)?))
        });
        if let Some((clause, b, atom)) = origin {
            self.out.push(RepairOperation::Abd2 { clause: clause.id.clone(), index: b + 1, atom: atom.clone() });
        }
        let (Some(n), Some(h)) = (nearest, nearest_head) else { return };
        self.out.push(RepairOperation::Ref4 { clause: n.id.clone(), from: h.clone(), to: goal.clone() });
        let Mismatch::Argument(i) = e.mismatch else { return };
        self.out.push(RepairOperation::Ref5 { predicate: h.predicate.clone(), index: i });
        let s = goal.args.get(i - 1).and_then(Term::as_const);
        let t = h.args.get(i - 1).and_then(Term::as_const);
        if let (Some(s), Some(t)) = (s, t) {
            self.out.push(RepairOperation::Ref6a { from: t.clone(), to: s.clone() });
            self.out.push(RepairOperation::Ref6b {
                clause: n.id.clone(),
                site: Site::Head,
                index: i,
                constant: t.clone(),
                variable: fresh_variable(&n.variables()),
            });
        }
        // The goal-side constant, when it was written in the spawning body atom.
        if let (Some(s), Some((clause, b, atom))) = (s, origin) {
            if atom.args.get(i - 1).and_then(Term::as_const) == Some(s) {
                self.out.push(RepairOperation::Ref6b {
                    clause: clause.id.clone(),
                    site: Site::Body(b),
                    index: i,
                    constant: s.clone(),
                    variable: fresh_variable(&clause.variables()),
                });
            }
        }
    }
}

/// `X, Y, Z, X1, Y1, Z1, X2, ...`
fn variable_name(k: usize) -> Name {
    let base = ["X", "Y", "Z"][k % 3];
    match k / 3 {
        0 => Name::from(base),
        n => Name::from(format!("{base}{n}")),
    }
}
