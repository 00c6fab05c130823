use std::fmt;

use super::proof::Proof;
use crate::theory::{Atom, Name};

/// Why the nearest-miss axiom head failed to resolve with the goal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mismatch {
    /// Different predicate (or arity).
    Predicate,
    /// One-based argument position that does not unify.
    Argument(usize),
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::Predicate => f.write_str("predicate"),
            Mismatch::Argument(i) => write!(f, "argument {i}"),
        }
    }
}

/// A goal no clause head resolves with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierEntry {
    /// Goal as selected; unbound derivation variables are named `G1`, `G2`, ...
    pub goal: Atom,
    /// Clause id and zero-based body position that produced the goal.
    pub origin: Option<(Name, usize)>,
    pub nearest: Option<Name>,
    pub mismatch: Mismatch,
    /// Goals on the path from the root down to this goal's parent.
    pub ancestors: Vec<Atom>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FailureFrontier {
    pub entries: Vec<FrontierEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FaultKind {
    Incompatibility,
    Insufficiency,
}

impl fmt::Display for FaultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FaultKind::Incompatibility => "incompatibility",
            FaultKind::Insufficiency => "insufficiency",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fault {
    /// An observed-false atom the theory derives.
    Incompatibility { atom: Atom, proof: Proof },
    /// An observed-true atom the theory cannot derive.
    Insufficiency { atom: Atom, frontier: FailureFrontier },
}

impl Fault {
    pub fn kind(&self) -> FaultKind {
        match self {
            Fault::Incompatibility { .. } => FaultKind::Incompatibility,
            Fault::Insufficiency { .. } => FaultKind::Insufficiency,
        }
    }

    pub fn atom(&self) -> &Atom {
        match self {
            Fault::Incompatibility { atom, .. } | Fault::Insufficiency { atom, .. } => atom,
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind(), self.atom())?;
        match self {
            Fault::Incompatibility { proof, .. } => {
                write!(f, "\n  proof: {}", proof.clause_ids().join(", "))
            }
            Fault::Insufficiency { frontier, .. } => {
                for e in &frontier.entries {
                    write!(f, "\n  fails: {}", e.goal)?;
                    if let Some((c, b)) = &e.origin {
                        write!(f, " (from {c} body {})", b + 1)?;
                    }
                    match &e.nearest {
                        Some(n) => write!(f, " nearest {n} at {}", e.mismatch)?,
                        None => f.write_str(" no candidate axiom")?,
                    }
                }
                Ok(())
            }
        }
    }
}
