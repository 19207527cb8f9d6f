use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustdct::DctNum;

/// Floating-point scalar the simulator and the reference solvers are generic over.
///
/// Implemented for `f32` and `f64`. The tolerance ladder used throughout the
/// crate assumes `f64`; `f32` works but only meets single-precision bounds.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + DctNum + Default + Debug + Display
{
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    fn from_usize_exact(v: usize) -> Self {
        Self::from_usize(v).expect("integer representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
