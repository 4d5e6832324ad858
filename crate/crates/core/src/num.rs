//! Scalar abstraction for the numeric kernels (link budget, latency, Erlang-B).
//!
//! The stateful parts of the simulator work in `f64`; the kernels are generic so
//! they can be checked in `f32` as well.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real: Float + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static {
    /// Converts an `f64` constant into this scalar.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits the scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Serde helper for values that may be `+inf` (JSON has no infinity).
pub(crate) mod inf_as_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Real;

    pub fn serialize<R: Real, S: Serializer>(value: &R, s: S) -> Result<S::Ok, S::Error> {
        let v = value.to_f64().unwrap_or(f64::NAN);
        if v == f64::INFINITY {
            s.serialize_str("+inf")
        } else if v == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum NumOrStr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, R: Real, D: Deserializer<'de>>(d: D) -> Result<R, D::Error> {
        match NumOrStr::deserialize(d)? {
            NumOrStr::Num(v) => Ok(R::lit(v)),
            NumOrStr::Str(s) if s == "+inf" || s == "inf" => Ok(R::infinity()),
            NumOrStr::Str(s) if s == "-inf" => Ok(R::neg_infinity()),
            NumOrStr::Str(s) => Err(serde::de::Error::custom(format!("not a number: {s}"))),
        }
    }
}
