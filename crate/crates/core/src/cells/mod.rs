//! Exact cylinder cells of the homogeneous triangle map.
//!
//! A cell for the digits `(b_0, ..., b_m)` is the cone spanned by the
//! nonnegative integer columns `A_0(m), ..., A_n(m)`. Its slice
//! `{||x||_1 = 1}` is the simplex with vertices `A_i / ||A_i||`.

mod certify;
mod geometry;
mod volume;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use certify::{certify_periodic, AlgebraicCertificate};
pub use geometry::{
    cell_diameter, contains, norm_ratio_bound_check, pair_distance, pair_distance_int,
};
pub use volume::{
    measure_ratio_lower_bound, slice_volume, telescoped_sum, volume_weight,
    zero_tail_weight_bound, TelescopedSum, ZeroTailBound,
};

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::mcf::inverse_branch_matrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    n: usize,
    digits: Vec<u64>,
    /// `columns[i]` is the vertex `A_i`, of length `n + 1`.
    columns: Vec<Vec<BigInt>>,
}

impl Cell {
    /// The root cone with vertices `A_k = (1, 1, ..., 1, 0, ..., 0)` (`k`
    /// ones after the leading one).
    pub fn initial(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let columns = (0..=n)
            .map(|k| {
                (0..=n)
                    .map(|r| if r <= k { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        Ok(Self {
            n,
            digits: Vec::new(),
            columns,
        })
    }

    /// Appends digit `b`:
    /// `A_i <- A_(i+1)` for `i < n-1`, `A_(n-1) <- b A_0 + A_n`,
    /// `A_n <- (b+1) A_0 + A_n`.
    pub fn extend(&self, b: u64) -> Self {
        let mut next = self.clone();
        next.extend_in_place(b);
        next
    }

    pub fn extend_in_place(&mut self, b: u64) {
        let n = self.n;
        let a0 = self.columns.remove(0);
        let an = self.columns.pop().expect("n >= 1");
        let bb = BigInt::from(b);
        let low: Vec<BigInt> = a0.iter().zip(&an).map(|(x, y)| &bb * x + y).collect();
        let high: Vec<BigInt> = low.iter().zip(&a0).map(|(l, x)| l + x).collect();
        // after removing A_0 and A_n the remaining n-1 columns are A_1..A_(n-1)
        self.columns.push(low);
        self.columns.push(high);
        debug_assert_eq!(self.columns.len(), n + 1);
        self.digits.push(b);
    }

    /// Fold of [`Cell::extend`] over `digits`, starting from the root cell.
    pub fn from_digits(n: usize, digits: &[u64]) -> Result<Self> {
        let mut c = Self::initial(n)?;
        for &b in digits {
            c.extend_in_place(b);
        }
        Ok(c)
    }

    /// The same cell computed as `T_(b_0)^{-1} ... T_(b_m)^{-1}` applied to the
    /// root vertices.
    pub fn from_branch_product(n: usize, digits: &[u64]) -> Result<Self> {
        let root = Self::initial(n)?;
        let mut m = IntMatrix::identity(n + 1);
        for &b in digits {
            m = &m * &inverse_branch_matrix(n, b);
        }
        let columns = root.columns.iter().map(|c| m.apply(c)).collect();
        Ok(Self {
            n,
            digits: digits.to_vec(),
            columns,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn vertex(&self, i: usize) -> &[BigInt] {
        &self.columns[i]
    }

    pub fn vertices(&self) -> &[Vec<BigInt>] {
        &self.columns
    }

    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(&self.columns)
    }

    pub fn determinant(&self) -> BigInt {
        self.matrix().determinant()
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs().is_one()
    }

    /// `||A_i||_1` for every vertex.
    pub fn norms(&self) -> Vec<BigInt> {
        self.columns
            .iter()
            .map(|c| c.iter().fold(BigInt::zero(), |acc, v| acc + v))
            .collect()
    }

    /// Vertices of the slice simplex, `A_i / ||A_i||`, in floating point.
    pub fn slice_vertices_f64(&self) -> Vec<Vec<f64>> {
        use num_rational::BigRational;
        use num_traits::ToPrimitive;
        self.columns
            .iter()
            .zip(self.norms())
            .map(|(c, s)| {
                c.iter()
                    .map(|v| {
                        BigRational::new(v.clone(), s.clone())
                            .to_f64()
                            .unwrap_or(f64::NAN)
                    })
                    .collect()
            })
            .collect()
    }

    /// Serializable form: vertices as a row-major matrix of decimal strings.
    pub fn to_record(&self) -> CellRecord {
        let m = self.matrix();
        CellRecord {
            n: self.n,
            digits: self.digits.clone(),
            vertices: m
                .rows()
                .into_iter()
                .map(|r| r.iter().map(|v| v.to_string()).collect())
                .collect(),
        }
    }

    pub fn from_record(rec: &CellRecord) -> Result<Self> {
        let size = rec.n + 1;
        if rec.vertices.len() != size || rec.vertices.iter().any(|r| r.len() != size) {
            return Err(Error::DimensionMismatch {
                expected: size,
                got: rec.vertices.len(),
            });
        }
        let rows: Vec<Vec<BigInt>> = rec
            .vertices
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| s.parse::<BigInt>().map_err(|e| Error::Parse(e.to_string())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let m = IntMatrix::from_rows(rows);
        Ok(Self {
            n: rec.n,
            digits: rec.digits.clone(),
            columns: m.columns(),
        })
    }
}

/// JSON shape of a cell: `{n, digits, vertices}` with `vertices` row-major
/// and every big integer written as a decimal string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRecord {
    pub n: usize,
    pub digits: Vec<u64>,
    pub vertices: Vec<Vec<String>>,
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}
