use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter breaks one of the model invariants. `reason` names the
    /// offending field, e.g. "c out of [0,1)".
    #[error("invalid parameter: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("magnetization {m} out of domain (-1, 1)")]
    OutOfDomain { m: f64 },

    #[error("magnetization {m} inside coexistence interval [-{m_star}, {m_star}]")]
    InsideCoexistence { m: f64, m_star: f64 },

    #[error("magnetization {m} outside coexistence interval [-{m_star}, {m_star}]; use minimize_g inverse")]
    OutsideCoexistence { m: f64, m_star: f64 },

    #[error("parity violation: n + M must be even (n = {n}, M = {total_spin})")]
    Parity { n: u64, total_spin: i64 },

    #[error("concentration exceeds capacity (m = {m}, c = {c})")]
    Infeasible { m: f64, c: f64 },

    /// The variational problem has a flat bottom: every `m` in
    /// `[-m_star, m_star]` minimizes `G`.
    #[error("non-unique minimizer on [-{m_star}, {m_star}] (kappa * c = 0 and h = 0)")]
    NonUnique { m_star: f64 },

    #[error("no coexistence below J_c (spontaneous magnetization is 0)")]
    NoCoexistence,

    #[error("state space too large for exact enumeration: {states} states (cap {cap})")]
    StateSpaceTooLarge { states: u128, cap: u128 },

    #[error("magnetization table: {0}")]
    Table(String),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            reason: reason.into(),
        }
    }
}
