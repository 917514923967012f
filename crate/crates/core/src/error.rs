use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("square {index} is not a Latin square of order {order}: {reason}")]
    NotLatin { index: usize, order: usize, reason: String },

    #[error("squares {first} and {second} are not orthogonal")]
    NotOrthogonal { first: usize, second: usize },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("g = {g} is not congruent to {expected} mod 3")]
    ResidueClass { g: u64, expected: u64 },

    #[error("no Skolem sequence of order {order} found within the search budget")]
    SkolemSearchExhausted { order: usize },

    #[error("design verification failed: {0}")]
    Verification(String),

    #[error("blocks {first} and {second} share {shared} symbols; at most one is allowed")]
    ConditionIv { first: usize, second: usize, shared: usize },

    #[error("block association is not a two-class scheme: {0}")]
    NotAScheme(String),

    #[error("design has no verified BIB(1) or PBIB(0,1) role")]
    UnsupportedRole,

    #[error("threshold q = {q} does not match the number of designs t = {t}")]
    ArityMismatch { q: usize, t: usize },

    #[error("dual design {index} has block size {k} < threshold {q}")]
    BlockSizeBelowThreshold { index: usize, k: usize, q: usize },

    #[error("node coordinate {coordinate} = {value} out of range (b = {bound})")]
    NodeOutOfRange { coordinate: usize, value: u32, bound: usize },

    #[error("the two nodes are identical")]
    IdenticalNodes,

    #[error("associate tuple {0} is not a member of I")]
    NotInI(String),

    #[error("associate tuple {0} is not a member of the complement of Delta")]
    NotInDeltaBar(String),

    #[error("mu = {mu} exceeds n - 2 = {limit}")]
    MuOutOfRange { mu: u64, limit: u64 },

    #[error("the complement of Delta is empty")]
    EmptyDeltaBar,

    #[error("node count {n} exceeds the enumeration cap {cap}")]
    OracleCap { n: u64, cap: u64 },

    #[error("invalid label: {0}")]
    Label(String),

    #[error("invalid run spec: {0}")]
    Spec(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// Whether this error describes an invalid design, scheme or square
    /// (as opposed to a bad query or usage).
    pub fn is_design_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::NotLatin { .. }
                | Error::NotPrime(_)
                | Error::ResidueClass { .. }
                | Error::NotOrthogonal { .. }
                | Error::Verification(_)
                | Error::ConditionIv { .. }
                | Error::NotAScheme(_)
                | Error::UnsupportedRole
                | Error::BlockSizeBelowThreshold { .. }
                | Error::SkolemSearchExhausted { .. }
        )
    }
}
