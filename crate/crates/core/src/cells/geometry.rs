use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::Cell;
use crate::error::{Error, Result};
use crate::mcf::{embed, HomogeneousVector, SimplexPoint};
use crate::scalar::{NumberKind, Scalar};

/// True iff `i(x) = (1, x)` is a nonnegative combination of the cell's
/// columns. Float mode allows barycentric slack of 1e-9.
pub fn contains<T: Scalar>(cell: &Cell, x: &SimplexPoint<T>) -> Result<bool> {
    let n = cell.n();
    if x.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.dim(),
        });
    }
    let size = n + 1;
    // augmented system [C | i(x)]
    let mut a: Vec<Vec<T>> = (0..size)
        .map(|r| {
            let mut row: Vec<T> = (0..size)
                .map(|c| T::from_bigint(&cell.vertex(c)[r]))
                .collect();
            row.push(embed(x).coords()[r].clone());
            row
        })
        .collect();
    for k in 0..size {
        let pivot = (k..size)
            .filter(|&r| !a[r][k].is_zero())
            .max_by(|&p, &q| {
                a[p][k]
                    .to_f64()
                    .abs()
                    .partial_cmp(&a[q][k].to_f64().abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .ok_or(Error::SingularCell)?;
        a.swap(k, pivot);
        for r in 0..size {
            if r == k || a[r][k].is_zero() {
                continue;
            }
            let f = a[r][k].clone() / a[k][k].clone();
            for c in k..=size {
                let v = a[r][c].clone() - f.clone() * a[k][c].clone();
                a[r][c] = v;
            }
        }
    }
    let norms = cell.norms();
    let slack = match T::KIND {
        NumberKind::Exact => T::zero(),
        NumberKind::Float => T::tolerance() * T::from_u64(1000),
    };
    for (k, row) in a.iter().enumerate() {
        // barycentric weight on the slice vertex A_k / ||A_k||
        let w = row[size].clone() / row[k].clone() * T::from_bigint(&norms[k]);
        if w < T::zero() - slack.clone() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `D(U, V) = | U/||U|| - V/||V|| |_2`.
pub fn pair_distance<T: Scalar>(u: &HomogeneousVector<T>, v: &HomogeneousVector<T>) -> Result<f64> {
    let nu = u.norm1().to_f64();
    let nv = v.norm1().to_f64();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    if u.coords().len() != v.coords().len() {
        return Err(Error::DimensionMismatch {
            expected: u.coords().len(),
            got: v.coords().len(),
        });
    }
    Ok(u.coords()
        .iter()
        .zip(v.coords())
        .map(|(a, b)| {
            let d = a.to_f64() / nu - b.to_f64() / nv;
            d * d
        })
        .sum::<f64>()
        .sqrt())
}

/// [`pair_distance`] for nonnegative integer vectors, with the squared
/// distance formed exactly before the final conversion, so it stays
/// accurate for nearly parallel vertices of deep cells.
pub fn pair_distance_int(u: &[BigInt], v: &[BigInt]) -> Result<f64> {
    let nu: BigInt = u.iter().sum();
    let nv: BigInt = v.iter().sum();
    if nu.is_zero() || nv.is_zero() {
        return Err(Error::ZeroVector);
    }
    let num: BigInt = u
        .iter()
        .zip(v)
        .map(|(a, b)| {
            let d = a * &nv - b * &nu;
            &d * &d
        })
        .sum();
    let den = (&nu * &nv) * (&nu * &nv);
    let sq = BigRational::new(num, den);
    Ok(ToPrimitive::to_f64(&sq).unwrap_or(f64::NAN).sqrt())
}

/// `d = max_(i,j) D(A_i, A_j)`, the l2 diameter of the slice simplex.
pub fn cell_diameter(cell: &Cell) -> f64 {
    let v = cell.vertices();
    let mut best = 0.0f64;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d = pair_distance_int(&v[i], &v[j]).expect("cell vertices are nonzero");
            best = best.max(d);
        }
    }
    best
}

/// Checks `||A_i|| / ||A_j|| >= 1 / ((B + 1)(n + 1))` for all `i < j`.
///
/// Requires `m > n` (at least `n + 2` digits) and the last `n - 1` digits
/// all `<= bound`.
pub fn norm_ratio_bound_check(cell: &Cell, bound: u64) -> Result<bool> {
    let n = cell.n();
    let d = cell.digits();
    if d.len() < n + 2 {
        return Err(Error::PreconditionViolated(format!(
            "need at least {} digits, have {}",
            n + 2,
            d.len()
        )));
    }
    let window = &d[d.len() - (n - 1)..];
    if let Some(b) = window.iter().find(|&&b| b > bound) {
        return Err(Error::PreconditionViolated(format!(
            "window digit {b} exceeds bound {bound}"
        )));
    }
    let norms = cell.norms();
    let factor = BigInt::from(bound + 1) * BigInt::from(n + 1);
    for i in 0..=n {
        for j in i + 1..=n {
            if &norms[i] * &factor < norms[j] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
