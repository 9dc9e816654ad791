//! Scalar abstractions.
//!
//! Scoring rules only need field arithmetic and ordering, so they are generic
//! over [`Scalar`], which covers `f32`, `f64` and exact rationals. Anything
//! that needs transcendental functions (training, heads) requires [`Real`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, NumAssign, ToPrimitive, Zero};

/// Field-like scalar used by forecasts and scoring rules.
pub trait Scalar:
    Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Allowed deviation of a probability vector's sum from one.
    fn sum_tolerance() -> Self;

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_finite_value(&self) -> bool;
}

impl Scalar for f64 {
    fn sum_tolerance() -> Self {
        1e-9
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f32 {
    // single precision cannot hold 1e-9 around 1.0
    fn sum_tolerance() -> Self {
        1e-5
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for BigRational {
    fn sum_tolerance() -> Self {
        BigRational::zero()
    }

    fn is_finite_value(&self) -> bool {
        true
    }
}

/// Floating point scalar for everything that trains.
pub trait Real: Scalar + Float + NumAssign + Sum + Display + Default {
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite literal")
    }
}

impl Real for f64 {}
impl Real for f32 {}

/// Exact rational from a numerator/denominator pair.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}
