use std::fmt::Debug;
use std::ops::Neg;

use num_complex::Complex;
use twofloat::TwoFloat;

/// Real scalar backing the complex polynomial coefficients.
///
/// Implemented for `f64` (53-bit mantissa) and for the double-double
/// [`TwoFloat`] (106-bit mantissa) used by the extended-precision mode.
pub trait Real:
    Copy + Debug + PartialOrd + Send + Sync + 'static + num_traits::Num + Neg<Output = Self>
{
    const MANTISSA_BITS: u32;
    /// Relative zero-pruning threshold used for this precision.
    const PRUNE_REL: f64;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
}

impl Real for f64 {
    const MANTISSA_BITS: u32 = 53;
    const PRUNE_REL: f64 = 1e-14;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

impl Real for TwoFloat {
    const MANTISSA_BITS: u32 = 106;
    const PRUNE_REL: f64 = 1e-30;

    fn from_f64(x: f64) -> Self {
        TwoFloat::from(x)
    }
    fn to_f64(self) -> f64 {
        self.into()
    }
    fn sqrt(self) -> Self {
        TwoFloat::sqrt(self)
    }
    fn abs(self) -> Self {
        TwoFloat::abs(&self)
    }
}

/// Coefficient precision selectable at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    #[default]
    Double,
    DoubleDouble,
}

impl Precision {
    pub fn mantissa_bits(self) -> u32 {
        match self {
            Precision::Double => f64::MANTISSA_BITS,
            Precision::DoubleDouble => TwoFloat::MANTISSA_BITS,
        }
    }

    /// Smallest supported precision carrying at least `bits` mantissa bits.
    pub fn with_mantissa(bits: u32) -> Option<Self> {
        if bits <= f64::MANTISSA_BITS {
            Some(Precision::Double)
        } else if bits <= TwoFloat::MANTISSA_BITS {
            Some(Precision::DoubleDouble)
        } else {
            None
        }
    }
}

pub(crate) fn cabs<R: Real>(z: &Complex<R>) -> f64 {
    let re = z.re.to_f64();
    let im = z.im.to_f64();
    re.hypot(im)
}

pub(crate) fn c_from_f64<R: Real>(z: Complex<f64>) -> Complex<R> {
    Complex::new(R::from_f64(z.re), R::from_f64(z.im))
}

pub(crate) fn c_to_f64<R: Real>(z: &Complex<R>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}
