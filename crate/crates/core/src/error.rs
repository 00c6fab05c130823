use thiserror::Error;

/// Well-formedness violations of clauses, theories and preferred structures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("clause {clause}: empty clause")]
    EmptyClause { clause: String },
    #[error("clause {clause}: assertion is not ground")]
    NonGroundAssertion { clause: String },
    #[error("clause {clause}: head variable {variable} does not occur in the body")]
    UnboundHeadVariable { clause: String, variable: String },
    #[error("clause {clause}: predicate {predicate} used with arity {found}, expected {expected}")]
    ArityConflict { predicate: String, expected: usize, found: usize, clause: String },
    #[error("duplicate clause id {clause}")]
    DuplicateClauseId { clause: String },
    #[error("observation {atom} is not ground")]
    NonGroundObservation { atom: String },
    #[error("observation {atom} is both true and false")]
    ContradictoryObservation { atom: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error(transparent)]
    Invalid(#[from] TheoryError),
}

/// Failures applying or scoring repair operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepairError {
    #[error("no clause {0}")]
    MissingClause(String),
    #[error("clause {clause} has no atom at {site}")]
    MissingSite { clause: String, site: String },
    #[error("argument {index} out of range for {predicate}")]
    ArgumentOutOfRange { predicate: String, index: usize },
    #[error("fresh symbol {0} collides with the signature")]
    FreshCollision(String),
    #[error("operation has no effect: {0}")]
    NoOp(String),
    #[error("repaired theory is ill-formed: {0}")]
    IllFormed(#[from] TheoryError),
    #[error("plan does not produce the given repaired theory")]
    PlanMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EntrenchmentError {
    #[error("{0} is not a theorem")]
    NotATheorem(String),
    #[error("argument {index} out of range for {predicate}")]
    IndexOutOfRange { predicate: String, index: usize },
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
}
