use std::collections::BTreeMap;

use thiserror::Error;

use crate::theory::{Atom, Name, Term, Theory};

/// One resolution step of a ground linear-resolution trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub clause: Name,
    /// Selected goal, fully instantiated by the finished proof.
    pub goal: Atom,
    /// Ground value of every variable of `clause`.
    pub substitution: BTreeMap<Name, Name>,
    /// Step and zero-based body position whose atom became this goal;
    /// `None` for the root.
    pub parent: Option<(usize, usize)>,
    /// Which goal arguments were already constants when the goal was selected.
    pub bound_at_selection: Vec<bool>,
}

/// Leftmost-first resolution trace from `root =>` to the empty clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub root: Atom,
    pub steps: Vec<ProofStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("step {step}: no clause {clause}")]
    MissingClause { step: usize, clause: String },
    #[error("step {step}: expected goal {expected}, found {found}")]
    GoalMismatch { step: usize, expected: String, found: String },
    #[error("step {step}: clause head does not resolve with {goal}")]
    HeadMismatch { step: usize, goal: String },
    #[error("step {step}: clause has no binding for a variable")]
    Unbound { step: usize },
    #[error("trace ended with {0} open goals")]
    OpenGoals(usize),
    #[error("trace ended early")]
    Exhausted,
}

fn instantiate(atom: &Atom, subst: &BTreeMap<Name, Name>) -> Option<Atom> {
    let args = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Const(c) => Some(Term::Const(c.clone())),
            Term::Var(v) => subst.get(v).map(|c| Term::Const(c.clone())),
        })
        .collect::<Option<Vec<_>>>()?;
    Some(Atom::new(atom.predicate.clone(), args))
}

impl Proof {
    pub fn clause_ids(&self) -> Vec<&str> {
        self.steps.iter().map(|s| &*s.clause).collect()
    }

    /// Re-runs the trace against `theory`, checking every step resolves.
    pub fn replay(&self, theory: &Theory) -> Result<(), ReplayError> {
        let mut goals = vec![self.root.clone()];
        for (i, step) in self.steps.iter().enumerate() {
            if goals.is_empty() {
                return Err(ReplayError::Exhausted);
            }
            let goal = goals.remove(0);
            if goal != step.goal {
                return Err(ReplayError::GoalMismatch {
                    step: i,
                    expected: step.goal.to_string(),
                    found: goal.to_string(),
                });
            }
            let clause = theory
                .clause(&step.clause)
                .ok_or_else(|| ReplayError::MissingClause { step: i, clause: step.clause.to_string() })?;
            let head = clause
                .head
                .as_ref()
                .and_then(|h| instantiate(h, &step.substitution))
                .ok_or(ReplayError::Unbound { step: i })?;
            if head != goal {
                return Err(ReplayError::HeadMismatch { step: i, goal: goal.to_string() });
            }
            let body = clause
                .body
                .iter()
                .map(|a| instantiate(a, &step.substitution))
                .collect::<Option<Vec<_>>>()
                .ok_or(ReplayError::Unbound { step: i })?;
            goals.splice(0..0, body);
        }
        if goals.is_empty() {
            Ok(())
        } else {
            Err(ReplayError::OpenGoals(goals.len()))
        }
    }
}
