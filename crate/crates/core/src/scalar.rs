use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Real number type the aggregation operators are written against.
///
/// Implemented for `f32` and `f64`. The tolerances are the relative and
/// absolute slack used by the inequality checks.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Relative tolerance for inequality checks.
    fn rel_tol() -> Self;
    /// Absolute floor under the relative tolerance.
    fn abs_tol() -> Self;

    /// Converts a literal constant. Panics only if the constant is not
    /// representable, which cannot happen for the small literals used here.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }
}

impl Scalar for f64 {
    fn rel_tol() -> Self {
        1e-9
    }
    fn abs_tol() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn rel_tol() -> Self {
        1e-5
    }
    fn abs_tol() -> Self {
        1e-6
    }
}

/// `a <= b` up to the scalar's relative tolerance (with absolute floor).
pub fn approx_le<T: Scalar>(a: T, b: T) -> bool {
    a <= b + slack(a, b)
}

/// `a == b` up to the scalar's relative tolerance (with absolute floor).
pub fn approx_eq<T: Scalar>(a: T, b: T) -> bool {
    (a - b).abs() <= slack(a, b)
}

fn slack<T: Scalar>(a: T, b: T) -> T {
    (T::rel_tol() * a.abs().max(b.abs())).max(T::abs_tol())
}
