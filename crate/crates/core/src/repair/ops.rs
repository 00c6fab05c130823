use std::collections::BTreeSet;
use std::fmt;

use crate::error::RepairError;
use crate::theory::{Atom, Clause, Name, Site, Term, Theory};

/// A single theory transformation. Argument indices are one-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RepairOperation {
    /// Delete an axiom.
    Br1 { clause: Name },
    /// Append a precondition to a rule body.
    Br2 { clause: Name, precondition: Atom },
    /// Rename the predicate of one occurrence.
    Ref1 { clause: Name, site: Site, from: Name, to: Name },
    /// Add a trailing argument to every occurrence of `predicate`: `axiom_const`
    /// in the resolved axiom head and other heads, `goal_const` at the goal
    /// occurrence, and fresh variables in other body occurrences.
    Ref2 { predicate: Name, axiom: Name, axiom_const: Name, goal: Option<(Name, Site)>, goal_const: Name },
    /// Set one head argument of an axiom to a constant.
    Ref3 { clause: Name, index: usize, from: Name, to: Name },
    /// Add a new axiom.
    Abd1 { clause: Clause },
    /// Delete a body atom (`index` is one-based).
    Abd2 { clause: Name, index: usize, atom: Atom },
    /// Replace the head of an axiom.
    Ref4 { clause: Name, from: Atom, to: Atom },
    /// Drop one argument from every occurrence of `predicate`.
    Ref5 { predicate: Name, index: usize },
    /// Rename a constant everywhere.
    Ref6a { from: Name, to: Name },
    /// Replace one constant occurrence by a variable.
    Ref6b { clause: Name, site: Site, index: usize, constant: Name, variable: Name },
}

/// Short tag of an operation kind as used in plan serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OperationKind {
    Br1,
    Br2,
    Ref1,
    Ref2,
    Ref3,
    Abd1,
    Abd2,
    Ref4,
    Ref5,
    Ref6a,
    Ref6b,
}

impl fmt::Display for OperationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperationKind::Br1 => "BR1",
            OperationKind::Br2 => "BR2",
            OperationKind::Ref1 => "REF1",
            OperationKind::Ref2 => "REF2",
            OperationKind::Ref3 => "REF3",
            OperationKind::Abd1 => "ABD1",
            OperationKind::Abd2 => "ABD2",
            OperationKind::Ref4 => "REF4",
            OperationKind::Ref5 => "REF5",
            OperationKind::Ref6a => "REF6A",
            OperationKind::Ref6b => "REF6B",
        })
    }
}

fn clause_text(c: &Clause) -> String {
    let text = c.to_string();
    text[c.id.len() + 2..text.len() - 1].to_string()
}

impl fmt::Display for RepairOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use RepairOperation::*;
        write!(f, "{}(", self.kind())?;
        match self {
            Br1 { clause } => write!(f, "{clause}"),
            Br2 { clause, precondition } => write!(f, "{clause}, {precondition}"),
            Ref1 { clause, site, from, to } => write!(f, "{clause}, {site}, {from}, {to}"),
            Ref2 { predicate, axiom, axiom_const, goal, goal_const } => {
                write!(f, "{axiom}, {predicate}, {axiom_const}")?;
                if let Some((c, s)) = goal {
                    write!(f, ", {c} {s}, {goal_const}")?;
                }
                Ok(())
            }
            Ref3 { clause, index, from, to } => write!(f, "{clause}, {index}, {from}, {to}"),
            Abd1 { clause } => write!(f, "{}, {}", clause.id, clause_text(clause)),
            Abd2 { clause, index, atom } => write!(f, "{clause}, {index}, {atom}"),
            Ref4 { clause, from, to } => write!(f, "{clause}, {from}, {to}"),
            Ref5 { predicate, index } => write!(f, "{predicate}, {index}"),
            Ref6a { from, to } => write!(f, "{from}, {to}"),
            Ref6b { clause, site, index, constant, variable } => {
                write!(f, "{clause}, {site}, {index}, {constant}, {variable}")
            }
        }?;
        f.write_str(")")
    }
}

/// First of `Z, W, V, U, ...` then `V1, V2, ...` not in `used`.
pub(crate) fn fresh_variable(used: &BTreeSet<Name>) -> Name {
    ["Z", "W", "V", "U", "T", "S", "R", "Q"]
        .into_iter()
        .map(String::from)
        .chain((1..).map(|k| format!("V{k}")))
        .find(|v| !used.contains(v.as_str()))
        .map(Name::from)
        .expect("unbounded search")
}

fn find<'a>(clauses: &'a mut [Clause], id: &str) -> Result<&'a mut Clause, RepairError> {
    clauses.iter_mut().find(|c| &*c.id == id).ok_or_else(|| RepairError::MissingClause(id.to_string()))
}

fn missing_site(clause: &str, site: impl fmt::Display) -> RepairError {
    RepairError::MissingSite { clause: clause.to_string(), site: site.to_string() }
}

impl RepairOperation {
    pub fn kind(&self) -> OperationKind {
        use RepairOperation::*;
        match self {
            Br1 { .. } => OperationKind::Br1,
            Br2 { .. } => OperationKind::Br2,
            Ref1 { .. } => OperationKind::Ref1,
            Ref2 { .. } => OperationKind::Ref2,
            Ref3 { .. } => OperationKind::Ref3,
            Abd1 { .. } => OperationKind::Abd1,
            Abd2 { .. } => OperationKind::Abd2,
            Ref4 { .. } => OperationKind::Ref4,
            Ref5 { .. } => OperationKind::Ref5,
            Ref6a { .. } => OperationKind::Ref6a,
            Ref6b { .. } => OperationKind::Ref6b,
        }
    }

    /// Whether the operation changes which predicate symbol an occurrence uses.
    pub fn renames_predicate(&self) -> bool {
        match self {
            RepairOperation::Ref1 { .. } => true,
            RepairOperation::Ref4 { from, to, .. } => from.predicate != to.predicate,
            _ => false,
        }
    }

    /// Whether the operation alters arities or argument terms.
    pub fn changes_arguments(&self) -> bool {
        use RepairOperation::*;
        match self {
            Ref2 { .. } | Ref3 { .. } | Ref5 { .. } | Ref6a { .. } | Ref6b { .. } => true,
            Ref4 { from, to, .. } => from.predicate == to.predicate,
            _ => false,
        }
    }

    /// Applies the operation, re-validating the result.
    pub fn apply(&self, theory: &Theory) -> Result<Theory, RepairError> {
        use RepairOperation::*;
        let mut clauses = theory.clauses().to_vec();
        match self {
            Br1 { clause } => {
                let pos = theory.position(clause).ok_or_else(|| RepairError::MissingClause(clause.to_string()))?;
                clauses.remove(pos);
            }
            Br2 { clause, precondition } => {
                let c = find(&mut clauses, clause)?;
                if c.body.is_empty() {
                    return Err(missing_site(clause, "body"));
                }
                c.body.push(precondition.clone());
            }
            Ref1 { clause, site, from, to } => {
                if from == to {
                    return Err(RepairError::NoOp(self.to_string()));
                }
                let atom = find(&mut clauses, clause)?
                    .atom_at_mut(*site)
                    .filter(|a| a.predicate == *from)
                    .ok_or_else(|| missing_site(clause, site))?;
                atom.predicate = to.clone();
            }
            Ref2 { predicate, axiom, axiom_const, goal, goal_const } => {
                if axiom_const == goal_const {
                    return Err(RepairError::NoOp(self.to_string()));
                }
                for k in [axiom_const, goal_const] {
                    if theory.signature().uses(k) {
                        return Err(RepairError::FreshCollision(k.to_string()));
                    }
                }
                let head_ok = theory
                    .clause(axiom)
                    .ok_or_else(|| RepairError::MissingClause(axiom.to_string()))?
                    .head
                    .as_ref()
                    .is_some_and(|h| h.predicate == *predicate);
                if !head_ok {
                    return Err(missing_site(axiom, Site::Head));
                }
                for c in &mut clauses {
                    let mut used = c.variables();
                    let sites: Vec<Site> =
                        c.sites().filter(|(_, a)| a.predicate == *predicate).map(|(s, _)| s).collect();
                    for site in sites {
                        let arg = if goal.as_ref().is_some_and(|(g, s)| *g == c.id && *s == site) {
                            Term::Const(goal_const.clone())
                        } else if site == Site::Head {
                            Term::Const(axiom_const.clone())
                        } else {
                            let v = fresh_variable(&used);
                            used.insert(v.clone());
                            Term::Var(v)
                        };
                        c.atom_at_mut(site).expect("site listed").args.push(arg);
                    }
                }
            }
            Ref3 { clause, index, from: _, to } => {
                let head = find(&mut clauses, clause)?.head.as_mut().ok_or_else(|| missing_site(clause, Site::Head))?;
                let arg = head.args.get_mut(index.wrapping_sub(1)).ok_or_else(|| RepairError::ArgumentOutOfRange {
                    predicate: head.predicate.to_string(),
                    index: *index,
                })?;
                if arg.as_const() == Some(to) {
                    return Err(RepairError::NoOp(self.to_string()));
                }
                *arg = Term::Const(to.clone());
            }
            Abd1 { clause } => {
                if theory.clause(&clause.id).is_some() {
                    return Err(RepairError::FreshCollision(clause.id.to_string()));
                }
                clauses.push(clause.clone());
            }
            Abd2 { clause, index, atom } => {
                let c = find(&mut clauses, clause)?;
                let i = index.wrapping_sub(1);
                if c.body.get(i) != Some(atom) {
                    return Err(missing_site(clause, Site::Body(i)));
                }
                c.body.remove(i);
            }
            Ref4 { clause, from, to } => {
                if from == to {
                    return Err(RepairError::NoOp(self.to_string()));
                }
                let head = find(&mut clauses, clause)?
                    .head
                    .as_mut()
                    .filter(|h| *h == from)
                    .ok_or_else(|| missing_site(clause, Site::Head))?;
                *head = to.clone();
            }
            Ref5 { predicate, index } => {
                let arity = theory.signature().arity(predicate).ok_or_else(|| RepairError::ArgumentOutOfRange {
                    predicate: predicate.to_string(),
                    index: *index,
                })?;
                if *index == 0 || *index > arity {
                    return Err(RepairError::ArgumentOutOfRange { predicate: predicate.to_string(), index: *index });
                }
                for c in &mut clauses {
                    for a in c.body.iter_mut().chain(c.head.iter_mut()) {
                        if a.predicate == *predicate {
                            a.args.remove(index - 1);
                        }
                    }
                }
            }
            Ref6a { from, to } => {
                if from == to || !theory.signature().constants.contains(from) {
                    return Err(RepairError::NoOp(self.to_string()));
                }
                for c in &mut clauses {
                    for a in c.body.iter_mut().chain(c.head.iter_mut()) {
                        for t in &mut a.args {
                            if t.as_const() == Some(from) {
                                *t = Term::Const(to.clone());
                            }
                        }
                    }
                }
            }
            Ref6b { clause, site, index, constant, variable } => {
                let c = find(&mut clauses, clause)?;
                if c.variables().contains(variable) {
                    return Err(RepairError::FreshCollision(variable.to_string()));
                }
                let atom = c.atom_at_mut(*site).ok_or_else(|| missing_site(clause, site))?;
                let arg = atom.args.get_mut(index.wrapping_sub(1)).filter(|t| t.as_const() == Some(constant));
                let arg = arg.ok_or_else(|| missing_site(clause, format!("{site} argument {index}")))?;
                *arg = Term::Var(variable.clone());
            }
        }
        for c in &clauses {
            c.validate()?;
        }
        Ok(Theory::new(clauses)?)
    }
}

/// An ordered sequence of operations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct RepairPlan {
    pub operations: Vec<RepairOperation>,
}

impl RepairPlan {
    pub fn new(operations: Vec<RepairOperation>) -> Self {
        RepairPlan { operations }
    }

    pub fn len(&self) -> usize {
        self.operations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operations.is_empty()
    }

    pub fn apply(&self, theory: &Theory) -> Result<Theory, RepairError> {
        self.operations.iter().try_fold(theory.clone(), |t, op| op.apply(&t))
    }

    /// One operation per line.
    pub fn lines(&self) -> Vec<String> {
        self.operations.iter().map(ToString::to_string).collect()
    }
}

impl fmt::Display for RepairPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.operations {
            writeln!(f, "{op}")?;
        }
        Ok(())
    }
}
