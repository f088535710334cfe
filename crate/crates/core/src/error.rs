use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("group order {order} exceeds the configured cap of {cap}")]
    OrderCapExceeded { order: usize, cap: usize },

    #[error("isomorphism test needs orders at most {cap}, got {order}")]
    IsoCapExceeded { order: usize, cap: usize },

    #[error("subgroup enumeration passed the budget of {budget} subgroups")]
    LatticeBudgetExceeded { budget: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("action of element {0} is not an automorphism")]
    NotAnAutomorphism(usize),

    #[error("action is not a homomorphism into the automorphism group")]
    NotAnAction,

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("structure violation: {0}")]
    StructureViolation(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("prime budget of {budget} exhausted before the gap fell below epsilon")]
    BudgetExhausted { budget: usize },

    #[error("d* for order {order} needs an explicit opt-in (limit {limit})")]
    SlowOptInRequired { order: usize, limit: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
