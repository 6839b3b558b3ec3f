use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mcf::{Flavor, SimplexPoint};
use crate::scalar::Scalar;

/// Fast: `1 / (x_1 ... x_(n-1) (1 + x_n))`. Slow: `1 / (x_1 ... x_n)`.
/// Neither is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityKind {
    pub flavor: Flavor,
    pub n: usize,
}

impl DensityKind {
    pub fn fast(n: usize) -> Self {
        Self {
            flavor: Flavor::Fast,
            n,
        }
    }

    pub fn slow(n: usize) -> Self {
        Self {
            flavor: Flavor::Slow,
            n,
        }
    }
}

pub fn density<T: Scalar>(kind: DensityKind, x: &SimplexPoint<T>) -> Result<T> {
    let c = x.coords();
    if c.len() != kind.n {
        return Err(Error::DimensionMismatch {
            expected: kind.n,
            got: c.len(),
        });
    }
    if c.iter().any(|v| v.is_zero() || v.is_negative()) {
        return Err(Error::BoundaryPoint);
    }
    Ok(density_raw(kind.flavor, c))
}

/// [`density`] on a bare coordinate slice, no checks.
pub fn density_raw<T: Scalar>(flavor: Flavor, c: &[T]) -> T {
    let n = c.len();
    match flavor {
        Flavor::Fast => {
            let p = c[..n - 1]
                .iter()
                .fold(T::one(), |acc, v| acc * v.clone());
            T::one() / (p * (T::one() + c[n - 1].clone()))
        }
        Flavor::Slow => T::one() / c.iter().fold(T::one(), |acc, v| acc * v.clone()),
    }
}
