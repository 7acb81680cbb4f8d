//! Validated containers for element evaluations, priorities and groupings.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::EvalError;
use crate::scalar::Scalar;

pub type ElementId = String;

/// Admissible evaluation interval `[min, max]`, with `0 <= min < max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scale<T> {
    min: T,
    max: T,
}

impl<T: Scalar> Scale<T> {
    pub fn new(min: T, max: T) -> Result<Self, EvalError> {
        let invalid = |reason: &str| EvalError::InvalidScale {
            min: min.to_string(),
            max: max.to_string(),
            reason: reason.to_owned(),
        };
        if !min.is_finite() || !max.is_finite() {
            return Err(invalid("bounds must be finite"));
        }
        if min >= max {
            return Err(invalid("min must be below max"));
        }
        if min < T::zero() {
            return Err(invalid("min must be nonnegative; remap affinely, e.g. onto [0, 100]"));
        }
        Ok(Self { min, max })
    }

    /// The `[0, 100]` percentage scale.
    pub fn percent() -> Self {
        Self { min: T::zero(), max: T::lit(100.0) }
    }

    pub fn min(&self) -> T {
        self.min
    }

    pub fn max(&self) -> T {
        self.max
    }

    pub fn contains(&self, v: T) -> bool {
        v >= self.min && v <= self.max
    }
}

/// Per-element quality scores on a common scale.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationVector<T> {
    ids: Vec<ElementId>,
    values: Vec<T>,
    scale: Scale<T>,
}

impl<T: Scalar> EvaluationVector<T> {
    pub fn new<I, S>(entries: I, scale: Scale<T>) -> Result<Self, EvalError>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<ElementId>,
    {
        let mut ids = Vec::new();
        let mut values = Vec::new();
        let mut seen = BTreeSet::new();
        for (id, value) in entries {
            let id = id.into();
            if !seen.insert(id.clone()) {
                return Err(EvalError::DuplicateId(id));
            }
            if !value.is_finite() || !scale.contains(value) {
                return Err(EvalError::OutOfScale {
                    id,
                    value: value.to_string(),
                    min: scale.min.to_string(),
                    max: scale.max.to_string(),
                });
            }
            ids.push(id);
            values.push(value);
        }
        if ids.is_empty() {
            return Err(EvalError::EmptySystem);
        }
        Ok(Self { ids, values, scale })
    }

    /// Values on the percentage scale with ids `s1..sN`.
    pub fn from_values(values: &[T]) -> Result<Self, EvalError> {
        Self::with_scale(values, Scale::percent())
    }

    /// Values with ids `s1..sN`.
    pub fn with_scale(values: &[T], scale: Scale<T>) -> Result<Self, EvalError> {
        Self::new(values.iter().enumerate().map(|(i, &v)| (format!("s{}", i + 1), v)), scale)
    }

    pub fn ids(&self) -> &[ElementId] {
        &self.ids
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn scale(&self) -> Scale<T> {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<T> {
        self.position(id).map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, T)> + '_ {
        self.ids.iter().map(String::as_str).zip(self.values.iter().copied())
    }

    /// Arithmetic mean `e*`.
    pub fn mean(&self) -> T {
        crate::aggregate::mean(&self.values)
    }

    pub(crate) fn position(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    /// Sub-vector restricted to `ids`, in the order given.
    pub fn subset(&self, ids: &[ElementId]) -> Result<Self, EvalError> {
        let unknown: Vec<_> = ids.iter().filter(|id| self.position(id).is_none()).cloned().collect();
        if !unknown.is_empty() {
            return Err(EvalError::UnknownIds(unknown));
        }
        Self::new(ids.iter().map(|id| (id.clone(), self.values[self.position(id).unwrap()])), self.scale)
    }
}

/// Strictly positive per-element weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorityVector<T> {
    entries: Vec<(ElementId, T)>,
}

impl<T: Scalar> PriorityVector<T> {
    pub fn new<I, S>(entries: I) -> Result<Self, EvalError>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<ElementId>,
    {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (id, w) in entries {
            let id = id.into();
            if !seen.insert(id.clone()) {
                return Err(EvalError::DuplicateId(id));
            }
            if !(w.is_finite() && w > T::zero()) {
                return Err(EvalError::NonPositiveWeight { id, value: w.to_string() });
            }
            out.push((id, w));
        }
        Ok(Self { entries: out })
    }

    /// Weight 1 for every element of `evals`.
    pub fn unit(evals: &EvaluationVector<T>) -> Self {
        Self { entries: evals.ids().iter().map(|id| (id.clone(), T::one())).collect() }
    }

    pub fn entries(&self) -> &[(ElementId, T)] {
        &self.entries
    }

    pub fn get(&self, id: &str) -> Option<T> {
        self.entries.iter().find(|(x, _)| x == id).map(|&(_, w)| w)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when every weight equals the first one.
    pub fn is_uniform(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].1 == w[1].1)
    }

    /// Weights in the order of `evals`, or an error naming the mismatched ids.
    pub fn aligned_to(&self, evals: &EvaluationVector<T>) -> Result<Vec<T>, EvalError> {
        let map: BTreeMap<&str, T> = self.entries.iter().map(|(id, w)| (id.as_str(), *w)).collect();
        let missing: Vec<_> = evals.ids().iter().filter(|id| !map.contains_key(id.as_str())).cloned().collect();
        let unknown: Vec<_> =
            self.entries.iter().filter(|(id, _)| evals.position(id).is_none()).map(|(id, _)| id.clone()).collect();
        if !missing.is_empty() || !unknown.is_empty() {
            return Err(EvalError::IdMismatch { missing, unknown });
        }
        Ok(evals.ids().iter().map(|id| map[id.as_str()]).collect())
    }
}

/// A set of elements sharing one priority.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group<T> {
    pub id: String,
    pub members: Vec<ElementId>,
    pub priority: T,
}

impl<T> Group<T> {
    pub fn new(id: impl Into<String>, members: Vec<ElementId>, priority: T) -> Self {
        Self { id: id.into(), members, priority }
    }
}

/// An evaluation vector partitioned into equal-priority groups.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedSystem<T> {
    evals: EvaluationVector<T>,
    groups: Vec<Group<T>>,
}

impl<T: Scalar> GroupedSystem<T> {
    pub fn new(evals: EvaluationVector<T>, groups: Vec<Group<T>>) -> Result<Self, EvalError> {
        if groups.is_empty() {
            return Err(EvalError::InvalidPartition {
                missing: evals.ids().to_vec(),
                repeated: vec![],
                unknown: vec![],
                empty: vec![],
            });
        }
        for g in &groups {
            if !(g.priority.is_finite() && g.priority > T::zero()) {
                return Err(EvalError::NonPositiveGroupPriority { id: g.id.clone(), value: g.priority.to_string() });
            }
        }
        let member_lists: Vec<(&str, &[ElementId])> =
            groups.iter().map(|g| (g.id.as_str(), g.members.as_slice())).collect();
        check_partition(evals.ids(), &member_lists)?;
        Ok(Self { evals, groups })
    }

    pub fn evals(&self) -> &EvaluationVector<T> {
        &self.evals
    }

    pub fn groups(&self) -> &[Group<T>] {
        &self.groups
    }

    /// Evaluations of one group's members.
    pub fn group_evals(&self, index: usize) -> EvaluationVector<T> {
        self.evals.subset(&self.groups[index].members).expect("partition checked at construction")
    }

    /// Group priorities expanded to one weight per element.
    pub fn expanded_priorities(&self) -> PriorityVector<T> {
        let mut entries = Vec::with_capacity(self.evals.len());
        for id in self.evals.ids() {
            let g = self.groups.iter().find(|g| g.members.contains(id)).expect("covering partition");
            entries.push((id.clone(), g.priority));
        }
        PriorityVector { entries }
    }
}

/// Checks that `groups` partition `universe`, reporting every offending id.
pub(crate) fn check_partition(universe: &[ElementId], groups: &[(&str, &[ElementId])]) -> Result<(), EvalError> {
    let known: BTreeSet<&str> = universe.iter().map(String::as_str).collect();
    let mut seen = BTreeSet::new();
    let mut repeated = BTreeSet::new();
    let mut unknown = BTreeSet::new();
    let mut empty = Vec::new();
    for (gid, members) in groups {
        if members.is_empty() {
            empty.push((*gid).to_owned());
        }
        for m in members.iter() {
            if !known.contains(m.as_str()) {
                unknown.insert(m.clone());
            } else if !seen.insert(m.as_str()) {
                repeated.insert(m.clone());
            }
        }
    }
    let missing: Vec<_> = universe.iter().filter(|id| !seen.contains(id.as_str())).cloned().collect();
    if missing.is_empty() && repeated.is_empty() && unknown.is_empty() && empty.is_empty() {
        Ok(())
    } else {
        Err(EvalError::InvalidPartition {
            missing,
            repeated: repeated.into_iter().collect(),
            unknown: unknown.into_iter().collect(),
            empty,
        })
    }
}
