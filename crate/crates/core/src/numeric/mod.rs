//! Exact rationals, rational-endpoint intervals and certified enclosures of
//! `sqrt`, `sin` and `cos`.
//!
//! Nothing in this module touches floating point. Irrational values are
//! represented by intervals whose endpoints lie on a dyadic grid chosen from
//! a [`Precision`].

mod elementary;
mod interval;
mod rational;

pub use elementary::{
    cos_enclosure, pi_enclosure, sin_enclosure, sincos_enclosure, sqrt_enclosure, TrigFn,
};
pub use interval::{interval_arith, Interval};
pub use rational::{rat_arith, ArithOp, Rational};

pub(crate) use rational::isqrt_floor;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("division by an interval containing zero")]
    DivisionByZeroInterval,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("interval lower bound {lo} exceeds upper bound {hi}")]
    InvalidInterval { lo: String, hi: String },
    #[error("precision must be at least 1 bit, got {0}")]
    InvalidPrecision(u32),
    #[error("cannot parse `{0}` as a rational")]
    Parse(String),
}

/// Width obligation for enclosures of irrational values: a point input
/// yields an interval of width at most `2^-(bits - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Precision(u32);

impl Precision {
    pub const DEFAULT_BITS: u32 = 64;

    pub fn new(bits: u32) -> Result<Self, NumericError> {
        if bits == 0 {
            return Err(NumericError::InvalidPrecision(bits));
        }
        Ok(Precision(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn doubled(self) -> Precision {
        Precision(self.0.saturating_mul(2))
    }

    /// `2^-bits` as an exact rational.
    pub fn epsilon(self) -> Rational {
        Rational::pow2(-i64::from(self.0))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision(Self::DEFAULT_BITS)
    }
}
