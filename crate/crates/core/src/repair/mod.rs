//! Repair operations and candidate generation.

mod generate;
mod ops;

pub(crate) use generate::candidates;
pub use generate::{generate_incompat_candidates, generate_insuff_candidates, MAX_PRECONDITIONS, MAX_THEOREM_RULES};
pub use ops::{OperationKind, RepairOperation, RepairPlan};
