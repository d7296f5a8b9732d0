//! Scalar abstraction shared by the vector math.
//!
//! Similarity and correlation routines are written once against [`Real`]
//! and instantiated for `f32` (embedding storage) and `f64` (scores).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub trait Real: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static {
    /// Lossless for `f32 -> f64`; rounds to nearest for `f64 -> f32`.
    fn from_f64_lossy(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite float conversion")
    }

    fn to_f64_lossless(self) -> f64 {
        self.to_f64().expect("float widening")
    }

    fn clamp_to(self, lo: Self, hi: Self) -> Self {
        if self < lo {
            lo
        } else if self > hi {
            hi
        } else {
            self
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Dot product of equal-length slices.
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn squared_norm<T: Real>(a: &[T]) -> T {
    a.iter().map(|&x| x * x).sum()
}
