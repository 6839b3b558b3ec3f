use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{NumberKind, Scalar};

/// A point `(x_1, ..., x_n)` of the ordered simplex
/// `1 >= x_1 >= x_2 >= ... >= x_n >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexPoint<T> {
    coords: Vec<T>,
}

impl<T: Scalar> SimplexPoint<T> {
    /// Validates membership (float mode allows an absolute slack of 1e-12).
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        let tol = T::tolerance();
        if coords[0] > T::one() + tol.clone() {
            return Err(Error::NotInSimplex(format!("x_1 = {:?} > 1", coords[0])));
        }
        for (i, w) in coords.windows(2).enumerate() {
            if w[1] > w[0].clone() + tol.clone() {
                return Err(Error::NotInSimplex(format!(
                    "x_{} < x_{}",
                    i + 1,
                    i + 2
                )));
            }
        }
        if coords[coords.len() - 1] < T::zero() - tol {
            return Err(Error::NotInSimplex("x_n < 0".into()));
        }
        Ok(Self { coords })
    }

    /// Skips validation. Callers must guarantee membership.
    pub(crate) fn new_unchecked(coords: Vec<T>) -> Self {
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    pub fn first(&self) -> &T {
        &self.coords[0]
    }

    pub fn last(&self) -> &T {
        &self.coords[self.coords.len() - 1]
    }

    pub fn kind(&self) -> NumberKind {
        T::KIND
    }

    /// True when every coordinate is strictly positive.
    pub fn is_interior(&self) -> bool {
        self.coords.iter().all(|c| *c > T::zero())
    }

    pub fn to_f64(&self) -> SimplexPoint<f64> {
        SimplexPoint {
            coords: self.coords.iter().map(Scalar::to_f64).collect(),
        }
    }
}

impl SimplexPoint<BigRational> {
    pub fn exact(coords: Vec<BigRational>) -> Result<Self> {
        Self::new(coords)
    }
}

/// Where a homogeneous vector sits relative to the cone
/// `x_0 > x_1 > ... > x_n > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeStatus {
    Interior,
    /// Non-strict ordering holds but some inequality is an equality.
    Boundary,
    Outside,
}

/// A vector `(x_0, x_1, ..., x_n)` with nonnegative entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HomogeneousVector<T> {
    coords: Vec<T>,
}

impl<T: Scalar> HomogeneousVector<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidDimension(coords.len().saturating_sub(1)));
        }
        if coords.iter().any(|c| c.is_negative()) {
            return Err(Error::NotInCone);
        }
        Ok(Self { coords })
    }

    pub(crate) fn new_unchecked(coords: Vec<T>) -> Self {
        Self { coords }
    }

    /// Dimension `n` (the vector has `n + 1` entries).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    /// l1 norm; entries are nonnegative so this is the plain sum.
    pub fn norm1(&self) -> T {
        self.coords
            .iter()
            .fold(T::zero(), |acc, c| acc + c.clone())
    }

    pub fn cone_status(&self) -> ConeStatus {
        let mut strict = true;
        for w in self.coords.windows(2) {
            if w[1] > w[0] {
                return ConeStatus::Outside;
            }
            if w[1] == w[0] {
                strict = false;
            }
        }
        let last = &self.coords[self.coords.len() - 1];
        if last.is_negative() {
            return ConeStatus::Outside;
        }
        if last.is_zero() {
            strict = false;
        }
        if strict {
            ConeStatus::Interior
        } else {
            ConeStatus::Boundary
        }
    }

    pub fn to_f64(&self) -> HomogeneousVector<f64> {
        HomogeneousVector {
            coords: self.coords.iter().map(Scalar::to_f64).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    #[test]
    fn membership() {
        assert!(SimplexPoint::new(vec![0.7, 0.2]).is_ok());
        assert!(SimplexPoint::new(vec![1.0, 1.0]).is_ok());
        assert!(SimplexPoint::new(vec![0.2, 0.7]).is_err());
        assert!(SimplexPoint::new(vec![1.2, 0.7]).is_err());
        assert!(SimplexPoint::new(vec![0.5, -0.1]).is_err());
        assert!(SimplexPoint::<f64>::new(vec![]).is_err());
        // float slack
        assert!(SimplexPoint::new(vec![1.0 + 1e-13, 0.5]).is_ok());
        // exact mode has none
        assert!(SimplexPoint::new(vec![rational(1_000_000_000_001, 1_000_000_000_000)]).is_err());
    }

    #[test]
    fn cone_status() {
        let v = HomogeneousVector::new(vec![10.0, 7.0, 2.0]).unwrap();
        assert_eq!(v.cone_status(), ConeStatus::Interior);
        let v = HomogeneousVector::new(vec![1.0, 1.0, 0.0]).unwrap();
        assert_eq!(v.cone_status(), ConeStatus::Boundary);
        let v = HomogeneousVector::new(vec![1.0, 2.0, 0.0]).unwrap();
        assert_eq!(v.cone_status(), ConeStatus::Outside);
        assert_eq!(v.dim(), 2);
        assert_eq!(v.norm1(), 3.0);
    }
}
