//! Fault detection and entrenchment-ranked repair of Datalog theories.
//!
//! Theories are checked against a preferred structure of observed-true and
//! observed-false ground atoms. Faulty theories are repaired by belief
//! revision, abduction and reformation operations, and candidate repairs are
//! ranked by how entrenched the changed predicates and arguments are.

pub mod engine;
pub mod entrenchment;
pub mod error;
pub mod graph;
pub mod inference;
pub mod parse;
pub mod repair;
pub mod report;
pub mod theory;

pub use engine::{is_minimal, repair, RankedRepair, SearchConfig};
pub use entrenchment::{EntrenchmentReport, Rational, RepairScore, Scalar};
pub use error::{EntrenchmentError, ParseError, RepairError, TheoryError};
pub use parse::{parse_ps, parse_theory, pretty_print};
pub use theory::{Atom, Clause, PreferredStructure, Term, Theory};

/// Entrenchment computed with exact rationals.
pub type ExactReport = EntrenchmentReport<Rational>;
/// Entrenchment computed in double precision.
pub type FloatReport = EntrenchmentReport<f64>;
/// Entrenchment computed in single precision.
pub type SingleReport = EntrenchmentReport<f32>;
