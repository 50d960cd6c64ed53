use thiserror::Error;

/// Errors raised by the library. Mathematical verdicts (not scattered, not
/// equivalent, ...) are never errors; these only signal invalid input or an
/// explicit refusal to run an oversized search.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p = {0} is not prime")]
    NonPrimeP(u64),
    #[error("p = 2: characteristic two is not supported")]
    EvenP,
    #[error("t = {0} is too small (need t >= 3)")]
    TSmall(u32),
    #[error("extension degree e must be at least 1")]
    BadExtension,
    #[error("modulus is reducible over GF({p})")]
    ReducibleModulus { p: u64 },
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("field of {0} elements is beyond the supported range")]
    FieldTooLarge(u128),
    #[error("element index {index} out of range for a field of {order} elements")]
    BadElement { index: u64, order: u64 },
    #[error("operands live in different fields")]
    CtxMismatch,
    #[error("polynomial must have exactly {expected} coefficients, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("map is not invertible")]
    NotInvertible,
    #[error("bad k = {k}: {reason}")]
    BadK { k: u64, reason: String },
    #[error("polynomial is not scattered")]
    NotScattered,
    #[error("bad family parameters: {0}")]
    BadParams(String),
    #[error("search needs {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("subspace meets the canonical subgeometry")]
    NotDisjointFromSigma,
    #[error("theorem hypotheses fail: {0}")]
    BadHypotheses(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
