//! Scalar abstraction: every numeric module is generic over the working
//! floating-point type.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::StandardNormal;

/// Floating-point scalar for shape coordinates and log densities.
///
/// Implemented for `f32` and `f64`. Bundles the field operations from
/// nalgebra with primitive conversion and the two random draws the samplers
/// need.
pub trait Scalar:
    RealField + FromPrimitive + ToPrimitive + Copy + Default + std::iter::Sum<Self>
{
    /// One standard-normal variate.
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
    /// One uniform variate in `[0, 1)`.
    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Scalar for f32 {
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random()
    }
}

impl Scalar for f64 {
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random()
    }
}

/// Convert an `f64` constant (tolerance, default, literal) into `T`.
pub fn convert<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("constant must be representable in the scalar type")
}
