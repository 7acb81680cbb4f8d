//! Aggregation operators over flat evaluation vectors.
//!
//! * weakest element (`wem`): the minimum evaluation;
//! * weighted linear aggregation (`wlam`): priority-weighted arithmetic mean;
//! * nonlinear aggregation (`nam`): `prod(e) / mean(e)^(N-1)`, which rewards
//!   uniform evaluations and cannot carry per-element priorities;
//! * grouped hybrid (`hybrid_grouped`): `nam` inside equal-priority groups,
//!   then a priority-weighted mean across groups.
//!
//! The slice kernels (`*_values`) take raw values and are what the hierarchy
//! rollup uses; the typed entry points take validated containers.

use serde::{Deserialize, Serialize};

use crate::error::EvalError;
use crate::evaluation::{ElementId, EvaluationVector, GroupedSystem, PriorityVector};
use crate::scalar::Scalar;

/// Above this many elements `nam` switches to the log domain.
pub const NAM_LOG_DOMAIN_MIN_LEN: usize = 31;
/// Any value above this also forces the log domain.
pub const NAM_LOG_DOMAIN_MAX_VALUE: f64 = 1e6;

/// Method applied to all elements after the weakest-element pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FallbackMethod {
    Wlam,
    Nam,
}

pub(crate) fn mean<T: Scalar>(values: &[T]) -> T {
    let sum = values.iter().fold(T::zero(), |acc, &v| acc + v);
    sum / T::from_count(values.len())
}

fn bounds<T: Scalar>(values: &[T]) -> (T, T) {
    values.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

pub fn wem_values<T: Scalar>(values: &[T]) -> Result<T, EvalError> {
    if values.is_empty() {
        return Err(EvalError::EmptySystem);
    }
    Ok(bounds(values).0)
}

/// Weighted arithmetic mean. Weights must be positive and as many as values.
pub fn wlam_values<T: Scalar>(values: &[T], weights: &[T]) -> Result<T, EvalError> {
    if values.is_empty() {
        return Err(EvalError::EmptySystem);
    }
    assert_eq!(values.len(), weights.len(), "one weight per value");
    let (lo, hi) = bounds(values);
    if lo == hi {
        return Ok(lo);
    }
    let mut num = T::zero();
    let mut den = T::zero();
    for (&v, &w) in values.iter().zip(weights) {
        num = num + w * v;
        den = den + w;
    }
    Ok((num / den).max(lo).min(hi))
}

/// Unweighted mean.
pub fn wlam_unit_values<T: Scalar>(values: &[T]) -> Result<T, EvalError> {
    wlam_values(values, &vec![T::one(); values.len()])
}

/// Nonlinear aggregation of nonnegative values.
///
/// Zero anywhere gives 0 (this also covers the all-zero vector, where the
/// formula would be 0/0). Constant vectors return the constant exactly.
/// The result never exceeds the mean, but it can fall below the minimum
/// when the values are widely spread: `[1, 1, 10]` gives 0.625.
pub fn nam_values<T: Scalar>(values: &[T]) -> Result<T, EvalError> {
    if values.is_empty() {
        return Err(EvalError::EmptySystem);
    }
    let (lo, hi) = bounds(values);
    if lo <= T::zero() {
        return Ok(T::zero());
    }
    if lo == hi {
        return Ok(lo);
    }
    let use_log = values.len() >= NAM_LOG_DOMAIN_MIN_LEN || hi > T::lit(NAM_LOG_DOMAIN_MAX_VALUE);
    Ok(if use_log { nam_log_domain(values) } else { nam_direct(values) })
}

/// `prod(e) / mean^(N-1)` evaluated literally. Positive inputs only.
pub(crate) fn nam_direct<T: Scalar>(values: &[T]) -> T {
    let product = values.iter().fold(T::one(), |acc, &v| acc * v);
    let exponent = i32::try_from(values.len() - 1).expect("vector length fits in i32");
    product / mean(values).powi(exponent)
}

/// `exp(sum(ln e) - (N-1) ln mean)`. Positive inputs only.
pub(crate) fn nam_log_domain<T: Scalar>(values: &[T]) -> T {
    let log_sum = values.iter().fold(T::zero(), |acc, &v| acc + v.ln());
    let n_minus_one = T::from_count(values.len() - 1);
    (log_sum - n_minus_one * mean(values).ln()).exp()
}

/// `(aggregate - weakest) / aggregate`, signed, with 0 for a zero aggregate.
pub fn signed_adequacy<T: Scalar>(aggregate: T, weakest: T) -> T {
    if aggregate == T::zero() {
        T::zero()
    } else {
        (aggregate - weakest) / aggregate
    }
}

fn unit_interval<T: Scalar>(v: T) -> T {
    v.max(T::zero()).min(T::one())
}

/// Minimum value together with every element attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Weakest<T> {
    pub value: T,
    pub ids: Vec<ElementId>,
}

/// Weakest-element evaluation: the minimum score.
pub fn wem<T: Scalar>(evals: &EvaluationVector<T>) -> T {
    wem_values(evals.values()).expect("evaluation vectors are non-empty")
}

pub fn weakest<T: Scalar>(evals: &EvaluationVector<T>) -> Weakest<T> {
    let value = wem(evals);
    let ids = evals.iter().filter(|&(_, v)| v == value).map(|(id, _)| id.to_owned()).collect();
    Weakest { value, ids }
}

/// Weighted linear aggregation `<w, e> / <w, 1>`.
pub fn wlam<T: Scalar>(evals: &EvaluationVector<T>, weights: &PriorityVector<T>) -> Result<T, EvalError> {
    let w = weights.aligned_to(evals)?;
    wlam_values(evals.values(), &w)
}

/// Nonlinear aggregation `prod(e) / (e*)^(N-1)` with `e*` the mean.
pub fn nam<T: Scalar>(evals: &EvaluationVector<T>) -> T {
    nam_values(evals.values()).expect("evaluation vectors are non-empty")
}

/// Per-group `nam` values in group order.
pub fn group_nam_values<T: Scalar>(sys: &GroupedSystem<T>) -> Vec<T> {
    (0..sys.groups().len()).map(|i| nam(&sys.group_evals(i))).collect()
}

/// Hybrid aggregation: priority-weighted mean of per-group `nam` values.
pub fn hybrid_grouped<T: Scalar>(sys: &GroupedSystem<T>) -> T {
    let per_group = group_nam_values(sys);
    let weights: Vec<T> = sys.groups().iter().map(|g| g.priority).collect();
    wlam_values(&per_group, &weights).expect("at least one group")
}

/// Relative gap between the unit-weight mean and the weakest element, in `[0, 1]`.
pub fn adequacy_wem_wlam<T: Scalar>(evals: &EvaluationVector<T>) -> T {
    let mean = wlam_unit_values(evals.values()).expect("non-empty");
    unit_interval(signed_adequacy(mean, wem(evals)))
}

/// Relative gap between `nam` and the weakest element, in `[0, 1]`.
pub fn adequacy_wem_nam<T: Scalar>(evals: &EvaluationVector<T>) -> T {
    unit_interval(signed_adequacy(nam(evals), wem(evals)))
}

/// All three base operators and both adequacy ratios for unit weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdequacyReport<T> {
    pub wem: T,
    pub wlam: T,
    pub nam: T,
    pub sigma_12: T,
    pub sigma_13: T,
}

impl<T: Scalar> AdequacyReport<T> {
    pub fn compute(evals: &EvaluationVector<T>) -> Self {
        Self {
            wem: wem(evals),
            wlam: wlam_unit_values(evals.values()).expect("non-empty"),
            nam: nam(evals),
            sigma_12: adequacy_wem_wlam(evals),
            sigma_13: adequacy_wem_nam(evals),
        }
    }
}

/// Result of applying `wem` to a critical subset and a mean-type method to everything.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WemThen<T> {
    pub critical_wem: T,
    pub aggregate: T,
    /// `(aggregate - critical_wem) / aggregate`, not clamped: negative when
    /// the critical set is healthier than the system as a whole.
    pub adequacy: T,
}

pub fn wem_then_aggregate<T: Scalar>(
    evals: &EvaluationVector<T>,
    weights: &PriorityVector<T>,
    critical_ids: &[ElementId],
    method: FallbackMethod,
) -> Result<WemThen<T>, EvalError> {
    if critical_ids.is_empty() {
        return Err(EvalError::EmptyCriticalSet);
    }
    let critical = evals.subset(critical_ids)?;
    let w = weights.aligned_to(evals)?;
    let critical_wem = wem(&critical);
    let aggregate = match method {
        FallbackMethod::Wlam => wlam_values(evals.values(), &w)?,
        FallbackMethod::Nam => {
            if !weights.is_uniform() {
                return Err(EvalError::WeightedNam);
            }
            nam(evals)
        }
    };
    Ok(WemThen { critical_wem, aggregate, adequacy: signed_adequacy(aggregate, critical_wem) })
}
