//! Scalar abstractions shared by the generic parts of the crate.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, One, ToPrimitive, Zero};

use crate::precision::ExactReal;

/// Exact or floating ring elements usable as polynomial coefficients.
pub trait Scalar:
    Clone + Debug + PartialEq + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn from_bigint(n: &BigInt) -> Self;
}

impl Scalar for f64 {
    fn from_bigint(n: &BigInt) -> f64 {
        n.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    fn from_bigint(n: &BigInt) -> f32 {
        n.to_f32().unwrap_or(f32::NAN)
    }
}

impl Scalar for BigRational {
    fn from_bigint(n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
}

impl Scalar for ExactReal {
    fn from_bigint(n: &BigInt) -> ExactReal {
        ExactReal::from_integer(n.clone())
    }
}

/// Floating types the analysis engines run on (f32 or f64).
pub trait AnalysisFloat: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {}

impl AnalysisFloat for f32 {}
impl AnalysisFloat for f64 {}
