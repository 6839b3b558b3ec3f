//! Small dense big-integer matrices and integer polynomials.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Square matrix of big integers, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix {
    size: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(size: usize) -> Self {
        Self {
            size,
            data: vec![BigInt::zero(); size * size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size);
        for i in 0..size {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let size = rows.len();
        assert!(rows.iter().all(|r| r.len() == size), "matrix must be square");
        Self {
            size,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().copied().map(BigInt::from).collect())
                .collect(),
        )
    }

    /// Builds the matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<BigInt>]) -> Self {
        let size = columns.len();
        let mut m = Self::zeros(size);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), size);
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.size..(i + 1) * self.size]
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.size).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.size).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.size).map(|j| self.column(j)).collect()
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.size)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn trace(&self) -> BigInt {
        (0..self.size).fold(BigInt::zero(), |acc, i| acc + &self[(i, i)])
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        let n = self.size;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = self.rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    /// Characteristic polynomial `det(xI - A)` by Faddeev-LeVerrier, returned
    /// with coefficients in ascending order (monic, degree = size).
    pub fn charpoly(&self) -> IntPoly {
        let n = self.size;
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        let mut m = Self::zeros(n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = self * &m;
            for i in 0..n {
                next[(i, i)] += &coeffs[n - k + 1];
            }
            m = next;
            let am = self * &m;
            let tr = am.trace();
            let (q, r) = tr.div_rem(&BigInt::from(k));
            debug_assert!(r.is_zero());
            coeffs[n - k] = -q;
        }
        IntPoly::new(coeffs)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.size)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|v| v.to_f64().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|v| !v.is_negative())
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.size + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.size + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.size, rhs.size);
        let n = self.size;
        let mut out = IntMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Serialize for IntMatrix {
    /// Row-major nested arrays of decimal strings.
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.size)
            .map(|i| self.row(i).iter().map(|v| v.to_string()).collect())
            .collect();
        rows.serialize(s)
    }
}

/// Integer polynomial, coefficients in ascending degree order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().copied().map(BigInt::from).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &BigInt {
        &self.coeffs[self.coeffs.len() - 1]
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Same polynomial with the sign flipped so the leading coefficient is
    /// positive.
    pub fn normalized_sign(&self) -> Self {
        if self.leading().is_negative() {
            Self::new(self.coeffs.iter().map(|c| -c).collect())
        } else {
            self.clone()
        }
    }

    /// Exact division by the monic linear factor `x - r`; `None` when `r` is
    /// not a root.
    pub fn divide_linear(&self, r: &BigInt) -> Option<Self> {
        if self.degree() == 0 {
            return None;
        }
        let d = self.degree();
        let mut q = vec![BigInt::zero(); d];
        let mut carry = BigInt::zero();
        for i in (0..=d).rev() {
            let v = &self.coeffs[i] + &carry * r;
            if i == 0 {
                return if v.is_zero() { Some(Self::new(q)) } else { None };
            }
            q[i - 1] = v.clone();
            carry = v;
        }
        unreachable!()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = BigInt::zero();
        Self::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero)
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    /// All real roots of a polynomial of small degree, found by bisection
    /// on a sign-change scan refined with Newton steps.
    pub fn real_roots(&self) -> Vec<f64> {
        let d = self.degree();
        if d == 0 {
            return vec![];
        }
        // Cauchy bound
        let lead = self.leading().to_f64().unwrap_or(1.0).abs();
        let bound = 1.0
            + self.coeffs[..d]
                .iter()
                .map(|c| c.to_f64().unwrap_or(0.0).abs() / lead)
                .fold(0.0, f64::max);
        let steps = 20_000;
        let h = 2.0 * bound / steps as f64;
        let mut roots = Vec::new();
        let mut a = -bound;
        let mut fa = self.eval_f64(a);
        for k in 1..=steps {
            let b = -bound + k as f64 * h;
            let fb = self.eval_f64(b);
            if fa == 0.0 {
                roots.push(a);
            } else if fa * fb < 0.0 {
                let (mut lo, mut hi, mut flo) = (a, b, fa);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let fm = self.eval_f64(mid);
                    if fm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if (fm < 0.0) == (flo < 0.0) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            a = b;
            fa = fb;
        }
        roots.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
        roots
    }
}

impl fmt::Display for IntPoly {
    /// Renders e.g. `x^3 + x - 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let show_mag = !mag.is_one() || i == 0;
            if show_mag {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
