use std::fmt;

use thiserror::Error;

/// Structural property an operator must satisfy to be accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    ZeroShift,
    DistinctShifts,
    Theta,
    Finiteness,
    Monotonicity,
    Periodicity,
    Bistability,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axiom::ZeroShift => "zero shift (r_0 = 0)",
            Axiom::DistinctShifts => "distinct shifts",
            Axiom::Theta => "theta in (0,1)",
            Axiom::Finiteness => "finite parameters",
            Axiom::Monotonicity => "monotonicity",
            Axiom::Periodicity => "periodicity",
            Axiom::Bistability => "bistability",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("axiom violated: {axiom}: {detail}")]
    Axiom { axiom: Axiom, detail: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric error: {msg} (bracket [{lo}, {hi}])")]
    Numeric { msg: String, lo: f64, hi: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain exhausted at t = {t}: front at z = {position} is within {margin} of the boundary")]
    DomainExhausted { t: f64, position: f64, margin: f64 },

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("unsupported spec: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("spec file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
