use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("vector is not on the simplex: {0}")]
    OffSimplex(String),

    #[error(
        "non-degeneracy 1 violated: global minimizer {index} has Hessian eigenvalue {eigenvalue:e} <= {threshold:e}"
    )]
    NonDegeneracy1Violation {
        index: usize,
        eigenvalue: f64,
        threshold: f64,
    },

    #[error(
        "non-degeneracy 2 violated: stability vectors of minimizers {first} and {second} are {distance:e} apart (tolerance {tolerance:e})"
    )]
    NonDegeneracy2Violation {
        first: usize,
        second: usize,
        distance: f64,
        tolerance: f64,
    },

    #[error("solver did not converge: {failed} of {total} starts exhausted their budget")]
    SolverDidNotConverge { failed: usize, total: usize },

    #[error("enumeration needs {size} atoms, budget is {budget}")]
    BudgetExceeded { size: u128, budget: u128 },

    #[error("no sign change of the free-energy gap on [{lo}, {hi}] (gap {gap_lo:e} .. {gap_hi:e})")]
    NoBracket {
        lo: f64,
        hi: f64,
        gap_lo: f64,
        gap_hi: f64,
    },

    #[error("linear program failed: {0}")]
    LpFailure(String),

    #[error("tie fraction {fraction:e} exceeds {limit:e}; stability vectors are nearly degenerate")]
    TooManyTies { fraction: f64, limit: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::OffSimplex(_) | Error::Config(_) | Error::NoBracket { .. } => 2,
            Error::NonDegeneracy1Violation { .. }
            | Error::NonDegeneracy2Violation { .. }
            | Error::TooManyTies { .. } => 3,
            Error::BudgetExceeded { .. } => 4,
            Error::SolverDidNotConverge { .. } => 5,
            Error::LpFailure(_) | Error::Io(_) => 1,
        }
    }
}
