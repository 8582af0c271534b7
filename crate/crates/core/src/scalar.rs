//! Floating point abstraction used by the closed-form layers.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar with the special functions the closed forms need.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    fn erfc(self) -> Self;
    fn ln_gamma(self) -> Self;

    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn erfc(self) -> Self {
        libm::erfc(self)
    }
    fn ln_gamma(self) -> Self {
        libm::lgamma(self)
    }
}

impl Scalar for f32 {
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }
    fn ln_gamma(self) -> Self {
        libm::lgammaf(self)
    }
}

/// Arguments beyond this magnitude saturate the normal CDF.
pub const PHI_SATURATION: f64 = 38.0;

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf<T: Scalar>(x: T) -> T {
    let lim = T::lit(PHI_SATURATION);
    if x <= -lim {
        return T::zero();
    }
    if x >= lim {
        return T::one();
    }
    T::lit(0.5) * (-x / T::SQRT_2()).erfc()
}

/// `Φ(b) − Φ(a)` without cancellation when both arguments sit in the upper tail.
pub fn normal_cdf_diff<T: Scalar>(a: T, b: T) -> T {
    if a > T::zero() && b > T::zero() {
        normal_cdf(-a) - normal_cdf(-b)
    } else {
        normal_cdf(b) - normal_cdf(a)
    }
}

/// `exp(−x²/2)`, zero at infinite arguments.
pub fn gauss<T: Scalar>(x: T) -> T {
    if x.is_infinite() {
        T::zero()
    } else {
        (-x * x * T::lit(0.5)).exp()
    }
}

/// `x·exp(−x²/2)`, zero at infinite arguments.
pub fn x_gauss<T: Scalar>(x: T) -> T {
    if x.is_infinite() {
        T::zero()
    } else {
        x * (-x * x * T::lit(0.5)).exp()
    }
}
