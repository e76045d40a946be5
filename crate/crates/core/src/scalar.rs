//! Scalar abstractions.
//!
//! Problem weights and objectives are exact integers ([`Weight`]); control
//! parameters, mutation rates and annealing temperatures are floats ([`Real`]).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, PrimInt, Signed};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Signed integer type used for QUBO coefficients, objectives and 1-flip deltas.
pub trait Weight:
    PrimInt
    + Signed
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Widening conversion used for overflow bounds.
    fn widen(self) -> i128 {
        self.to_i128().expect("signed primitive fits in i128")
    }

    /// Conversion into a float scalar.
    fn to_real<R: Real>(self) -> R {
        R::from(self).expect("weight representable as float")
    }
}

impl Weight for i16 {}
impl Weight for i32 {}
impl Weight for i64 {}

/// Floating point type used for control parameters and the annealing emulator.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum + Default + Debug + Display + Send + Sync + 'static
{
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
