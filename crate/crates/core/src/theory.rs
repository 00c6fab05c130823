//! Terms, atoms, clauses, theories and the preferred structure.
//!
//! Everything here is immutable once constructed. A [`Theory`] is only
//! obtainable through [`Theory::new`], which enforces the Datalog
//! restrictions the rest of the crate relies on: Horn clauses, consistent
//! arities, ground assertions and range-restricted rules.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::TheoryError;

/// Interned-ish symbol. Cheap to clone, shared across threads.
pub type Name = Arc<str>;

/// Predicate name of the equality atom `X = Y`.
pub const EQUALITY: &str = "=";

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Name),
    Const(Name),
}

impl Term {
    pub fn var(s: &str) -> Self {
        Term::Var(name(s))
    }

    pub fn constant(s: &str) -> Self {
        Term::Const(name(s))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn symbol(&self) -> &Name {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }

    pub fn as_const(&self) -> Option<&Name> {
        match self {
            Term::Const(c) => Some(c),
            Term::Var(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: Name,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<Name>, args: Vec<Term>) -> Self {
        Atom { predicate: predicate.into(), args }
    }

    /// Ground atom from constant names.
    pub fn ground(predicate: &str, args: &[&str]) -> Self {
        Atom::new(name(predicate), args.iter().map(|a| Term::constant(a)).collect())
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_var())
    }

    pub fn variables(&self) -> impl Iterator<Item = &Name> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        })
    }

    pub fn constants(&self) -> impl Iterator<Item = &Name> {
        self.args.iter().filter_map(Term::as_const)
    }

    /// Constant tuple of a ground atom.
    pub fn tuple(&self) -> Option<Vec<Name>> {
        self.args.iter().map(|t| t.as_const().cloned()).collect()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if &*self.predicate == EQUALITY && self.args.len() == 2 {
            return write!(f, "{} = {}", self.args[0], self.args[1]);
        }
        f.write_str(&self.predicate)?;
        if self.args.is_empty() {
            return Ok(());
        }
        f.write_str("(")?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClauseKind {
    Assertion,
    Rule,
    Goal,
}

/// Position of an atom occurrence within a clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    Head,
    /// Zero-based body position.
    Body(usize),
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Head => f.write_str("head"),
            Site::Body(i) => write!(f, "body {}", i + 1),
        }
    }
}

/// A Horn clause in Kowalski form: `body => head`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub id: Name,
    pub body: Vec<Atom>,
    pub head: Option<Atom>,
}

impl Clause {
    /// Builds a clause and checks the per-clause restrictions.
    pub fn new(id: impl Into<Name>, body: Vec<Atom>, head: Option<Atom>) -> Result<Self, TheoryError> {
        let clause = Clause { id: id.into(), body, head };
        clause.validate()?;
        Ok(clause)
    }

    pub fn validate(&self) -> Result<(), TheoryError> {
        let head = match &self.head {
            None if self.body.is_empty() => return Err(TheoryError::EmptyClause { clause: self.id.to_string() }),
            None => return Ok(()),
            Some(h) => h,
        };
        if self.body.is_empty() && !head.is_ground() {
            return Err(TheoryError::NonGroundAssertion { clause: self.id.to_string() });
        }
        let bound: BTreeSet<&Name> = self.body.iter().flat_map(Atom::variables).collect();
        if let Some(v) = head.variables().find(|v| !bound.contains(v)) {
            return Err(TheoryError::UnboundHeadVariable { clause: self.id.to_string(), variable: v.to_string() });
        }
        Ok(())
    }

    pub fn kind(&self) -> ClauseKind {
        match (&self.head, self.body.is_empty()) {
            (Some(_), true) => ClauseKind::Assertion,
            (Some(_), false) => ClauseKind::Rule,
            _ => ClauseKind::Goal,
        }
    }

    pub fn atom_at(&self, site: Site) -> Option<&Atom> {
        match site {
            Site::Head => self.head.as_ref(),
            Site::Body(i) => self.body.get(i),
        }
    }

    pub fn atom_at_mut(&mut self, site: Site) -> Option<&mut Atom> {
        match site {
            Site::Head => self.head.as_mut(),
            Site::Body(i) => self.body.get_mut(i),
        }
    }

    /// All atom occurrences with their sites, body first.
    pub fn sites(&self) -> impl Iterator<Item = (Site, &Atom)> {
        self.body.iter().enumerate().map(|(i, a)| (Site::Body(i), a)).chain(self.head.iter().map(|h| (Site::Head, h)))
    }

    pub fn variables(&self) -> BTreeSet<Name> {
        self.sites().flat_map(|(_, a)| a.variables().cloned()).collect()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.id)?;
        for (i, a) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        if !self.body.is_empty() {
            f.write_str(" ")?;
        }
        match &self.head {
            Some(h) => write!(f, "=> {h}."),
            None => f.write_str("=> ."),
        }
    }
}

/// Predicates with arities and constants occurring in a theory.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub predicates: BTreeMap<Name, usize>,
    pub constants: BTreeSet<Name>,
}

impl Signature {
    fn derive(clauses: &[Clause]) -> Result<Self, TheoryError> {
        let mut sig = Signature::default();
        for clause in clauses {
            for (_, atom) in clause.sites() {
                match sig.predicates.get(&atom.predicate) {
                    Some(&arity) if arity != atom.arity() => {
                        return Err(TheoryError::ArityConflict {
                            predicate: atom.predicate.to_string(),
                            expected: arity,
                            found: atom.arity(),
                            clause: clause.id.to_string(),
                        })
                    }
                    Some(_) => {}
                    None => {
                        sig.predicates.insert(atom.predicate.clone(), atom.arity());
                    }
                }
                sig.constants.extend(atom.constants().cloned());
            }
        }
        Ok(sig)
    }

    pub fn arity(&self, predicate: &str) -> Option<usize> {
        self.predicates.get(predicate).copied()
    }

    /// Whether `symbol` is already used as a predicate or a constant.
    pub fn uses(&self, symbol: &str) -> bool {
        self.predicates.contains_key(symbol) || self.constants.contains(symbol)
    }

    /// `<base>_r<k>` with the smallest `k >= 1` unused here and not in `taken`.
    pub fn fresh_symbol(&self, base: &str, taken: &BTreeSet<Name>) -> Name {
        (1..)
            .map(|k| format!("{base}_r{k}"))
            .find(|s| !self.uses(s) && !taken.contains(s.as_str()))
            .map(Name::from)
            .expect("unbounded search")
    }
}

/// Ordered set of uniquely named clauses with its derived signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    clauses: Vec<Clause>,
    signature: Signature,
}

impl Theory {
    pub fn new(clauses: Vec<Clause>) -> Result<Self, TheoryError> {
        let mut ids = BTreeSet::new();
        for c in &clauses {
            c.validate()?;
            if !ids.insert(c.id.clone()) {
                return Err(TheoryError::DuplicateClauseId { clause: c.id.to_string() });
            }
        }
        let signature = Signature::derive(&clauses)?;
        Ok(Theory { clauses, signature })
    }

    pub fn empty() -> Self {
        Theory { clauses: Vec::new(), signature: Signature::default() }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn into_clauses(self) -> Vec<Clause> {
        self.clauses
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn clause(&self, id: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| &*c.id == id)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.clauses.iter().position(|c| &*c.id == id)
    }

    /// Smallest `A<n>` not used as a clause id.
    pub fn fresh_clause_id(&self) -> Name {
        (self.clauses.len() + 1..)
            .map(|n| format!("A{n}"))
            .find(|s| self.clause(s).is_none())
            .map(Name::from)
            .expect("unbounded search")
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Observed-true and observed-false ground atoms, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PreferredStructure {
    true_set: Vec<Atom>,
    false_set: Vec<Atom>,
}

impl PreferredStructure {
    pub fn new(true_atoms: Vec<Atom>, false_atoms: Vec<Atom>) -> Result<Self, TheoryError> {
        let mut ps = PreferredStructure::default();
        for a in true_atoms {
            ps.insert(a, true)?;
        }
        for a in false_atoms {
            ps.insert(a, false)?;
        }
        Ok(ps)
    }

    pub(crate) fn insert(&mut self, atom: Atom, observed_true: bool) -> Result<(), TheoryError> {
        if !atom.is_ground() {
            return Err(TheoryError::NonGroundObservation { atom: atom.to_string() });
        }
        let (this, other) =
            if observed_true { (&mut self.true_set, &self.false_set) } else { (&mut self.false_set, &self.true_set) };
        if other.contains(&atom) {
            return Err(TheoryError::ContradictoryObservation { atom: atom.to_string() });
        }
        if !this.contains(&atom) {
            this.push(atom);
        }
        Ok(())
    }

    pub fn true_set(&self) -> &[Atom] {
        &self.true_set
    }

    pub fn false_set(&self) -> &[Atom] {
        &self.false_set
    }

    pub fn is_empty(&self) -> bool {
        self.true_set.is_empty() && self.false_set.is_empty()
    }

    /// Predicate names occurring in either set.
    pub fn protected(&self) -> BTreeSet<Name> {
        self.true_set.iter().chain(&self.false_set).map(|a| a.predicate.clone()).collect()
    }

    pub fn symbols(&self) -> BTreeSet<Name> {
        self.true_set
            .iter()
            .chain(&self.false_set)
            .flat_map(|a| std::iter::once(a.predicate.clone()).chain(a.constants().cloned()))
            .collect()
    }
}

impl fmt::Display for PreferredStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[true]")?;
        for a in &self.true_set {
            writeln!(f, "{a}.")?;
        }
        writeln!(f, "[false]")?;
        for a in &self.false_set {
            writeln!(f, "{a}.")?;
        }
        Ok(())
    }
}
