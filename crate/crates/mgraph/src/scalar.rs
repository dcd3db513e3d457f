use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar for all metric computations: `f32` or `f64`.
///
/// Edge lengths, potentials and invariants are all expressed in the chosen
/// scalar; exactness claims live at the level of the quadrature rules, not
/// the arithmetic.
pub trait Scalar:
    Float + FromPrimitive + Debug + Display + std::fmt::LowerExp + std::iter::Sum + 'static
{
    /// Relative tolerance for offset and length comparisons (boundary
    /// normalization of points, zero detection in assignments).
    fn comparison_tol() -> Self;

    /// Shorthand for lossy conversion of an `f64` constant.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }

    /// Shorthand for lossy conversion of a count.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }
}

impl Scalar for f64 {
    fn comparison_tol() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn comparison_tol() -> Self {
        1e-5
    }
}
