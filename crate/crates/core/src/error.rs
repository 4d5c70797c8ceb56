use thiserror::Error;

/// Errors raised by parsing and by the precondition checks of the core operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("malformed rational `{0}`")]
    BadRational(String),
    #[error("negative mass `{0}`")]
    NegativeMass(String),
    #[error("missing vars line")]
    MissingVars,
    #[error("line {line}: duplicate cell {cell}")]
    DuplicateCell { line: usize, cell: String },
    #[error("line {line}: expected {expected} bits, found {found}")]
    CellWidth {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("mass sum {0} ≠ 1")]
    MassSum(String),
    #[error("invalid variable name `{0}`")]
    BadName(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("{0} variables is outside the supported range {1}")]
    VariableCount(usize, &'static str),
    #[error("statement sides must be nonempty")]
    EmptySide,
    #[error("statement sets overlap")]
    Overlap,
    #[error("directed cycle through `{0}`")]
    Cycle(String),
    #[error("duplicate or contradictory edge `{0}`")]
    DuplicateEdge(String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("variable sets differ")]
    VarMismatch,
    #[error("unknown example {0}; valid ids are 1..=10")]
    UnknownExample(u32),
    #[error("unknown pattern `{0}`")]
    UnknownPattern(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("search budget must be positive")]
    ZeroBudget,
}

impl Error {
    /// True for inputs that parse but break a model invariant (mass sum, cycles,
    /// negative masses, violated preconditions), as opposed to plain syntax or usage errors.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::MassSum(_)
                | Error::NegativeMass(_)
                | Error::Cycle(_)
                | Error::SelfLoop(_)
                | Error::DuplicateEdge(_)
                | Error::DuplicateCell { .. }
                | Error::Precondition(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
