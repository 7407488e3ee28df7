use num::{BigInt, BigRational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The integer parameter N ≥ 2 selecting the interval map
/// `x ↦ N/(1−x) − ⌊N/(1−x)⌋` and everything derived from it.
///
/// Constructed once, passed by reference everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Params {
    n: u32,
}

impl Params {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(n));
        }
        Ok(Params { n })
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn n_u64(&self) -> u64 {
        u64::from(self.n)
    }

    #[inline]
    pub fn n_f64(&self) -> f64 {
        f64::from(self.n)
    }

    pub fn n_big(&self) -> BigInt {
        BigInt::from(self.n)
    }

    pub fn n_rational(&self) -> BigRational {
        BigRational::from_integer(self.n_big())
    }

    /// log(N/(N−1)), the normalizer of the invariant measure.
    #[inline]
    pub fn log_ratio(&self) -> f64 {
        let n = self.n_f64();
        (n / (n - 1.0)).ln()
    }
}
