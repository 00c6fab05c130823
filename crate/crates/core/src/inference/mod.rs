//! Derivability, proof traces and fault detection.

mod fault;
mod model;
mod proof;
mod sl;

pub use fault::{FailureFrontier, Fault, FaultKind, FrontierEntry, Mismatch};
pub use model::{least_model, Model};
pub use proof::{Proof, ProofStep, ReplayError};

use crate::theory::{Atom, PreferredStructure, Theory, EQUALITY};

/// Caps on proof enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProofLimits {
    pub max_proofs: usize,
    pub max_steps: usize,
}

impl Default for ProofLimits {
    fn default() -> Self {
        ProofLimits { max_proofs: 64, max_steps: 32 }
    }
}

/// First proof of a ground goal, or `None` when it is not a theorem.
pub fn prove(theory: &Theory, goal: &Atom) -> Option<Proof> {
    prove_in(theory, &least_model(theory), goal)
}

pub fn prove_in(theory: &Theory, model: &Model, goal: &Atom) -> Option<Proof> {
    sl::first_proof(theory, model, goal)
}

/// Distinct proofs of a ground goal up to `limits`.
pub fn proofs(theory: &Theory, goal: &Atom, limits: ProofLimits) -> Vec<Proof> {
    sl::all_proofs(theory, &least_model(theory), goal, limits.max_proofs, limits.max_steps)
}

pub fn failure_frontier(theory: &Theory, goal: &Atom) -> FailureFrontier {
    sl::failure_frontier(theory, goal)
}

/// Observed-true atoms the theory misses and observed-false atoms it derives.
pub fn faulty_atoms(model: &Model, ps: &PreferredStructure) -> Vec<(FaultKind, Atom)> {
    let missing = ps.true_set().iter().filter(|a| !model.contains(a)).map(|a| (FaultKind::Insufficiency, a.clone()));
    let unwanted = ps.false_set().iter().filter(|a| model.contains(a)).map(|a| (FaultKind::Incompatibility, a.clone()));
    missing.chain(unwanted).collect()
}

/// Faults against `ps`: insufficiencies in true-set order, then
/// incompatibilities in false-set order.
pub fn detect_faults(theory: &Theory, ps: &PreferredStructure) -> Vec<Fault> {
    let model = least_model(theory);
    detect_faults_in(theory, &model, ps)
}

pub fn detect_faults_in(theory: &Theory, model: &Model, ps: &PreferredStructure) -> Vec<Fault> {
    faulty_atoms(model, ps).into_iter().map(|(kind, atom)| explain(theory, model, kind, atom)).collect()
}

pub(crate) fn explain(theory: &Theory, model: &Model, kind: FaultKind, atom: Atom) -> Fault {
    match kind {
        FaultKind::Incompatibility => {
            let proof = prove_in(theory, model, &atom).expect("derivable atom has a proof");
            Fault::Incompatibility { atom, proof }
        }
        FaultKind::Insufficiency => {
            let frontier = failure_frontier(theory, &atom);
            Fault::Insufficiency { atom, frontier }
        }
    }
}

/// Derived equalities between distinct constants, under unique names.
pub fn una_atoms(model: &Model) -> Vec<Atom> {
    model
        .atoms()
        .into_iter()
        .filter(|a| &*a.predicate == EQUALITY && a.arity() == 2 && a.args[0] != a.args[1])
        .collect()
}

pub fn una_faults(theory: &Theory) -> Vec<Fault> {
    let model = least_model(theory);
    una_atoms(&model).into_iter().map(|a| explain(theory, &model, FaultKind::Incompatibility, a)).collect()
}
