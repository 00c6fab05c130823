//! Predicate and argument entrenchment, argument domains and recovery
//! probabilities.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, ToPrimitive};

use crate::error::{EntrenchmentError, RepairError};
use crate::graph::{build_graph, confidence_distances, Distance};
use crate::inference::{least_model, Model};
use crate::repair::{RepairOperation, RepairPlan};
use crate::theory::{Atom, Name, PreferredStructure, Site, Theory};

/// Exact scores.
pub type Rational = Ratio<i64>;

/// Numeric type an entrenchment report can be computed in.
pub trait Scalar: Num + FromPrimitive + ToPrimitive + PartialOrd + Clone + fmt::Debug {}

impl<T: Num + FromPrimitive + ToPrimitive + PartialOrd + Clone + fmt::Debug> Scalar for T {}

fn scalar<S: Scalar>(n: usize) -> S {
    S::from_usize(n).expect("count fits the scalar type")
}

/// `E_a`: a domain size, or the top element for protected predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArgumentEntrenchment {
    Finite(usize),
    Protected,
}

impl Ord for ArgumentEntrenchment {
    fn cmp(&self, other: &Self) -> Ordering {
        use ArgumentEntrenchment::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Protected) => Ordering::Less,
            (Protected, Finite(_)) => Ordering::Greater,
            (Protected, Protected) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ArgumentEntrenchment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ArgumentEntrenchment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArgumentEntrenchment::Finite(n) => write!(f, "{n}"),
            ArgumentEntrenchment::Protected => f.write_str("PROTECTED"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredicateEntrenchment<S> {
    pub value: S,
    pub distance: Distance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntrenchmentReport<S> {
    pub predicates: BTreeMap<Name, PredicateEntrenchment<S>>,
    /// One entry per argument position, in order.
    pub arguments: BTreeMap<Name, Vec<ArgumentEntrenchment>>,
    pub pd_max: usize,
}

impl<S: Scalar> EntrenchmentReport<S> {
    pub fn value(&self, predicate: &str) -> Option<&S> {
        self.predicates.get(predicate).map(|p| &p.value)
    }

    pub fn distance(&self, predicate: &str) -> Option<Distance> {
        self.predicates.get(predicate).map(|p| p.distance)
    }
}

/// `e(p)` for every predicate of the theory, protected predicates being
/// those named in the preferred structure.
pub fn predicate_entrenchment<S: Scalar>(theory: &Theory, ps: &PreferredStructure) -> EntrenchmentReport<S> {
    let graph = build_graph(theory);
    let distances = confidence_distances(&graph, &ps.protected());
    let pd_max = distances.values().filter_map(|d| d.finite()).max().unwrap_or(0);
    let denom: S = scalar(pd_max + 1);
    let predicates = distances
        .into_iter()
        .map(|(p, distance)| {
            let value = match distance {
                Distance::Finite(d) => S::one() - scalar::<S>(d) / denom.clone(),
                Distance::Infinite => S::one() / scalar::<S>(pd_max + 2),
            };
            (p, PredicateEntrenchment { value, distance })
        })
        .collect();
    EntrenchmentReport { predicates, arguments: BTreeMap::new(), pd_max }
}

/// Predicate entrenchment together with the argument entrenchment of every
/// argument position.
pub fn entrenchment_report<S: Scalar>(theory: &Theory, ps: &PreferredStructure) -> EntrenchmentReport<S> {
    let mut report = predicate_entrenchment(theory, ps);
    report.arguments = argument_entrenchments(theory, &least_model(theory), ps);
    report
}

pub(crate) fn argument_entrenchments(
    theory: &Theory,
    model: &Model,
    ps: &PreferredStructure,
) -> BTreeMap<Name, Vec<ArgumentEntrenchment>> {
    let protected = ps.protected();
    theory
        .signature()
        .predicates
        .iter()
        .map(|(p, &arity)| {
            let row = (1..=arity)
                .map(|i| {
                    if protected.contains(p) {
                        ArgumentEntrenchment::Protected
                    } else {
                        ArgumentEntrenchment::Finite(domain_in(model, p, i).len())
                    }
                })
                .collect();
            (p.clone(), row)
        })
        .collect()
}

/// Constants occurring at one-based position `i` of derivable `p` atoms.
pub fn argument_domain(theory: &Theory, p: &str, i: usize) -> BTreeSet<Name> {
    domain_in(&least_model(theory), p, i)
}

pub(crate) fn domain_in(model: &Model, p: &str, i: usize) -> BTreeSet<Name> {
    if i == 0 {
        return BTreeSet::new();
    }
    model.tuples(p).filter_map(|t| t.get(i - 1).cloned()).collect()
}

/// Chance of guessing the `i`-th argument of a theorem back from its domain.
pub fn recovery_probability<S: Scalar>(theory: &Theory, atom: &Atom, i: usize) -> Result<S, EntrenchmentError> {
    let model = least_model(theory);
    if !atom.is_ground() || !model.contains(atom) {
        return Err(EntrenchmentError::NotATheorem(atom.to_string()));
    }
    if i == 0 || i > atom.arity() {
        return Err(EntrenchmentError::IndexOutOfRange { predicate: atom.predicate.to_string(), index: i });
    }
    Ok(S::one() / scalar::<S>(domain_in(&model, &atom.predicate, i).len()))
}

pub fn argument_entrenchment(
    theory: &Theory,
    ps: &PreferredStructure,
    p: &str,
    i: usize,
) -> Result<ArgumentEntrenchment, EntrenchmentError> {
    let arity = theory.signature().arity(p).ok_or_else(|| EntrenchmentError::UnknownPredicate(p.to_string()))?;
    if i == 0 || i > arity {
        return Err(EntrenchmentError::IndexOutOfRange { predicate: p.to_string(), index: i });
    }
    if ps.protected().contains(p) {
        return Ok(ArgumentEntrenchment::Protected);
    }
    Ok(ArgumentEntrenchment::Finite(argument_domain(theory, p, i).len()))
}

/// Ranking group of a repair plan, most preferred first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScoreCategory {
    PredicateChange,
    ArgumentChange,
    ContentChange,
}

impl fmt::Display for ScoreCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreCategory::PredicateChange => "predicateChange",
            ScoreCategory::ArgumentChange => "argumentChange",
            ScoreCategory::ContentChange => "contentChange",
        })
    }
}

/// Exact score; `Protected` sorts after every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScoreValue {
    Finite(Rational),
    Protected,
}

impl ScoreValue {
    pub fn to_f64(&self) -> Option<f64> {
        match self {
            ScoreValue::Finite(r) => r.to_f64(),
            ScoreValue::Protected => None,
        }
    }
}

impl fmt::Display for ScoreValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreValue::Finite(r) => write!(f, "{r}"),
            ScoreValue::Protected => f.write_str("PROTECTED"),
        }
    }
}

/// Lower values are preferred within a category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RepairScore {
    pub category: ScoreCategory,
    pub value: ScoreValue,
}

impl fmt::Display for RepairScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.category, self.value)
    }
}

/// Sum of argument entrenchments of one predicate; `None` when protected.
fn argument_total(rows: &BTreeMap<Name, Vec<ArgumentEntrenchment>>, p: &str) -> Option<i64> {
    rows.get(p).map_or(Some(0), |row| {
        row.iter()
            .map(|e| match e {
                ArgumentEntrenchment::Finite(n) => Some(*n as i64),
                ArgumentEntrenchment::Protected => None,
            })
            .sum()
    })
}

/// Scores plans against one original theory, reusing its entrenchment.
pub(crate) struct Scorer<'a> {
    original: &'a Theory,
    ps: &'a PreferredStructure,
    predicates: EntrenchmentReport<Rational>,
    arguments: BTreeMap<Name, Vec<ArgumentEntrenchment>>,
}

impl<'a> Scorer<'a> {
    pub(crate) fn new(original: &'a Theory, model: &Model, ps: &'a PreferredStructure) -> Self {
        Scorer {
            original,
            ps,
            predicates: predicate_entrenchment(original, ps),
            arguments: argument_entrenchments(original, model, ps),
        }
    }

    /// Scores a plan known to turn the original theory into `repaired`.
    pub(crate) fn score(&self, plan: &RepairPlan, repaired: &Theory) -> RepairScore {
        let ops = &plan.operations;
        if ops.iter().any(RepairOperation::renames_predicate) {
            let value = self.renamed(plan).iter().filter_map(|p| self.predicates.value(p)).max().copied();
            return RepairScore {
                category: ScoreCategory::PredicateChange,
                value: ScoreValue::Finite(value.unwrap_or_default()),
            };
        }
        if ops.iter().any(RepairOperation::changes_arguments) {
            let affected = self.affected(plan);
            let after = argument_entrenchments(repaired, &least_model(repaired), self.ps);
            let mut total = 0i64;
            for p in &affected {
                match (argument_total(&self.arguments, p), argument_total(&after, p)) {
                    (Some(a), Some(b)) => total += a - b,
                    _ => return RepairScore { category: ScoreCategory::ArgumentChange, value: ScoreValue::Protected },
                }
            }
            return RepairScore {
                category: ScoreCategory::ArgumentChange,
                value: ScoreValue::Finite(Rational::from_integer(total)),
            };
        }
        RepairScore {
            category: ScoreCategory::ContentChange,
            value: ScoreValue::Finite(Rational::from_integer(content_edits(self.original, repaired) as i64)),
        }
    }

    /// Original predicates a plan renames away from or onto.
    fn renamed(&self, plan: &RepairPlan) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for op in &plan.operations {
            match op {
                RepairOperation::Ref1 { from, to, .. } => out.extend([from.clone(), to.clone()]),
                RepairOperation::Ref4 { from, to, .. } if from.predicate != to.predicate => {
                    out.extend([from.predicate.clone(), to.predicate.clone()])
                }
                _ => {}
            }
        }
        out.retain(|p| self.original.signature().predicates.contains_key(p));
        out
    }

    /// Predicates whose argument positions the plan touches.
    fn affected(&self, plan: &RepairPlan) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        let mut state = self.original.clone();
        for op in &plan.operations {
            let at = |clause: &Name, site: Site| {
                state.clause(clause).and_then(|c| c.atom_at(site)).map(|a| a.predicate.clone())
            };
            match op {
                RepairOperation::Ref2 { predicate, .. } | RepairOperation::Ref5 { predicate, .. } => {
                    out.insert(predicate.clone());
                }
                RepairOperation::Ref3 { clause, .. } => out.extend(at(clause, Site::Head)),
                RepairOperation::Ref4 { from, to, .. } if from.predicate == to.predicate => {
                    out.insert(from.predicate.clone());
                }
                RepairOperation::Ref6b { clause, site, .. } => out.extend(at(clause, *site)),
                RepairOperation::Ref6a { from, .. } => {
                    for c in state.clauses() {
                        for (_, a) in c.sites() {
                            if a.constants().any(|k| k == from) {
                                out.insert(a.predicate.clone());
                            }
                        }
                    }
                }
                _ => {}
            }
            match op.apply(&state) {
                Ok(next) => state = next,
                Err(_) => break,
            }
        }
        out
    }
}

/// Clauses added, deleted or modified, matched by id.
fn content_edits(original: &Theory, repaired: &Theory) -> usize {
    let changed = original.clauses().iter().filter(|c| repaired.clause(&c.id) != Some(*c)).count();
    let added = repaired.clauses().iter().filter(|c| original.clause(&c.id).is_none()).count();
    changed + added
}

/// Entrenchment score of a repair plan. Predicate renames are valued by the
/// most entrenched original predicate involved, argument changes by the loss
/// of argument entrenchment, and other changes by the number of clause edits.
pub fn score_repair(
    original: &Theory,
    repaired: &Theory,
    plan: &RepairPlan,
    ps: &PreferredStructure,
) -> Result<RepairScore, RepairError> {
    if plan.apply(original)? != *repaired {
        return Err(RepairError::PlanMismatch);
    }
    Ok(Scorer::new(original, &least_model(original), ps).score(plan, repaired))
}
