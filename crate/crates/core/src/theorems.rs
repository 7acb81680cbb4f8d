//! Checkers for the ordering results the operators satisfy.
//!
//! All comparisons use [`approx_le`], i.e. relative tolerance with an
//! absolute floor.

use serde::Serialize;

use crate::aggregate::{hybrid_grouped, nam, wem, wlam, wlam_unit_values};
use crate::error::EvalError;
use crate::evaluation::{EvaluationVector, GroupedSystem};
use crate::scalar::{approx_le, Scalar};

/// Fixed-sum product bound: `prod(a) <= (sum(a) / N)^N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductBound<T> {
    pub uniform_product: T,
    pub given_product: T,
    pub holds: bool,
}

pub fn check_theorem1<T: Scalar>(values: &[T]) -> Result<ProductBound<T>, EvalError> {
    if values.is_empty() {
        return Err(EvalError::EmptySystem);
    }
    if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > T::zero())) {
        return Err(EvalError::NonPositiveValue(bad.to_string()));
    }
    let total = values.iter().fold(T::zero(), |acc, &v| acc + v);
    let exponent = i32::try_from(values.len()).expect("length fits in i32");
    let uniform_product = (total / T::from_count(values.len())).powi(exponent);
    let given_product = values.iter().fold(T::one(), |acc, &v| acc * v);
    Ok(ProductBound { uniform_product, given_product, holds: approx_le(given_product, uniform_product) })
}

/// `wem <= nam <= wlam` with unit weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderingChain<T> {
    pub holds: bool,
    pub wem: T,
    pub nam: T,
    pub wlam: T,
}

pub fn check_theorem2<T: Scalar>(evals: &EvaluationVector<T>) -> OrderingChain<T> {
    let (lo, mid) = (wem(evals), nam(evals));
    let hi = wlam_unit_values(evals.values()).expect("non-empty");
    OrderingChain { holds: approx_le(lo, mid) && approx_le(mid, hi), wem: lo, nam: mid, wlam: hi }
}

/// `wem(all) <= hybrid <= wlam(expanded group priorities)`, reported separately.
///
/// The upper inequality is only guaranteed when all groups have the same
/// size; e.g. `{[100] @ 1, [0, 0] @ 1}` gives hybrid 50 against 33.3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupedBounds<T> {
    pub lower_holds: bool,
    pub upper_holds: bool,
    pub wem_all: T,
    pub hybrid: T,
    pub wlam_expanded: T,
}

pub fn check_theorem3<T: Scalar>(sys: &GroupedSystem<T>) -> GroupedBounds<T> {
    let wem_all = wem(sys.evals());
    let hybrid = hybrid_grouped(sys);
    let wlam_expanded = wlam(sys.evals(), &sys.expanded_priorities()).expect("aligned by construction");
    GroupedBounds {
        lower_holds: approx_le(wem_all, hybrid),
        upper_holds: approx_le(hybrid, wlam_expanded),
        wem_all,
        hybrid,
        wlam_expanded,
    }
}
