use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("scalars live in different cyclotomic fields (conductors {0} and {1})")]
    ConductorMismatch(u32, u32),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("constant term {0} has no square root in the working field")]
    NonSquare(String),

    #[error("series with nonzero constant term {0} has no Euler antiderivative")]
    NonIntegrable(String),

    #[error("degenerate root: {0}")]
    Degenerate(String),

    #[error("pole order {found} exceeds the allowed bound {bound}")]
    PoleBound { found: i64, bound: i64 },

    #[error("specialization requirement not met: {0}")]
    Specialization(String),

    #[error("element is outside the localized ring: {0}")]
    NotLocalized(String),

    #[error("underdetermined linear system: rank {rank} for {unknowns} unknowns")]
    Underdetermined { rank: usize, unknowns: usize },

    #[error("parse error: {0}")]
    Parse(String),
}
