use std::fmt;

use serde::Serialize;

/// The group law a candidate table violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    Identity,
    Inverse,
    Associativity,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Law::Identity => "identity",
            Law::Inverse => "inverse",
            Law::Associativity => "associativity",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("not a group: {law} law fails at {witness:?}")]
    NotAGroup { law: Law, witness: (usize, usize, usize) },

    #[error("malformed table: {0}")]
    MalformedTable(String),

    #[error("group order exceeds cap {cap} (order is at least {order_lower_bound})")]
    OrderExceeded { order_lower_bound: u128, cap: usize },

    #[error("unknown catalog name `{0}`")]
    UnknownCatalogName(String),

    #[error("permutation degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("subgroup is not normal (witness: conjugating {conjugator} moves {element} outside)")]
    NotNormal { element: usize, conjugator: usize },

    #[error("not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("{what} requires {required} operations, budget is {budget}")]
    BudgetExceeded { what: &'static str, required: u128, budget: u128 },

    #[error("shift tuple has length {got}, expected {expected}")]
    ShiftLength { expected: usize, got: usize },

    #[error("invalid counts: {0}")]
    InvalidCounts(String),

    #[error("invalid group definition: {0}")]
    InvalidDefinition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
