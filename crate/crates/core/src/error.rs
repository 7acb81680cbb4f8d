use thiserror::Error;

use crate::hierarchy::HierarchyViolation;
use crate::network::NetworkViolation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("empty system")]
    EmptySystem,
    #[error("invalid scale [{min}, {max}]: {reason}")]
    InvalidScale { min: String, max: String, reason: String },
    #[error("element {id} has value {value} outside scale [{min}, {max}]")]
    OutOfScale { id: String, value: String, min: String, max: String },
    #[error("duplicate element id {0}")]
    DuplicateId(String),
    #[error("priority of {id} must be positive and finite, got {value}")]
    NonPositiveWeight { id: String, value: String },
    #[error("priority ids do not match evaluation ids (missing: {missing:?}, unknown: {unknown:?})")]
    IdMismatch { missing: Vec<String>, unknown: Vec<String> },
    #[error("invalid partition (missing: {missing:?}, repeated: {repeated:?}, unknown: {unknown:?}, empty groups: {empty:?})")]
    InvalidPartition { missing: Vec<String>, repeated: Vec<String>, unknown: Vec<String>, empty: Vec<String> },
    #[error("group {id} priority must be positive and finite, got {value}")]
    NonPositiveGroupPriority { id: String, value: String },
    #[error("unknown element ids: {0:?}")]
    UnknownIds(Vec<String>),
    #[error("critical set is empty")]
    EmptyCriticalSet,
    #[error("nonlinear aggregation cannot take non-uniform priorities")]
    WeightedNam,
    #[error("product bound needs strictly positive values, got {0}")]
    NonPositiveValue(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("network has no nodes")]
    EmptyNetwork,
    #[error("invalid network: {}", join(.0))]
    Invalid(Vec<NetworkViolation>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RollupError {
    #[error("invalid hierarchy: {}", join(.0))]
    Invalid(Vec<HierarchyViolation>),
    #[error("unknown leaf id {0}")]
    UnknownLeaf(String),
    #[error("sweep needs at least 2 steps, got {0}")]
    TooFewSteps(usize),
    #[error("sweep range [{from}, {to}] outside scale [{min}, {max}]")]
    RangeOutsideScale { from: String, to: String, min: String, max: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
