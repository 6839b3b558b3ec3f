//! The fast (multiplicative) and slow (additive) triangle maps, their
//! homogeneous lift, the l1 slice, and the inverse branches.

use num_bigint::BigInt;
use num_traits::One;

use super::point::{ConeStatus, HomogeneousVector, SimplexPoint};
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::scalar::Scalar;

/// The fast digit `b = floor((1 - x_1) / x_n)`.
pub fn digit<T: Scalar>(x: &SimplexPoint<T>) -> Result<u64> {
    let last = x.last();
    if last.is_zero() || last.is_negative() {
        return Err(Error::ZeroLastCoordinate);
    }
    let q = (T::one() - x.first().clone()) / last.clone();
    if q.is_negative() {
        // only reachable through float slack at x_1 = 1
        return Ok(0);
    }
    q.floor_u64().ok_or(Error::DigitOverflow)
}

/// One step of the fast map. Returns `T(x)` and the digit used.
///
/// `T(x_1, ..., x_n) = (x_2/x_1, ..., x_n/x_1, (1 - x_1 - b x_n)/x_1)`;
/// for `n = 1` this is the Gauss map `x -> frac(1/x)`.
pub fn fast_step<T: Scalar>(x: &SimplexPoint<T>) -> Result<(SimplexPoint<T>, u64)> {
    let x1 = x.first().clone();
    if x1.is_zero() {
        return Err(Error::ZeroFirstCoordinate);
    }
    let b = digit(x)?;
    let c = x.coords();
    let last = x.last().clone();
    let mut r = T::one() - x1.clone() - T::from_u64(b) * last.clone();
    // Float rounding can push the remainder just outside [0, x_n).
    if r.is_negative() {
        r = T::zero();
    }
    if r > last {
        r = last;
    }
    let mut out: Vec<T> = c[1..].iter().map(|v| v.clone() / x1.clone()).collect();
    out.push(r / x1);
    Ok((SimplexPoint::new_unchecked(out), b))
}

/// Allocation-free float version of [`fast_step`] for long Monte Carlo
/// orbits. Performs the same arithmetic, so digits agree bit for bit.
pub fn fast_step_in_place(x: &mut [f64]) -> Result<u64> {
    let n = x.len();
    let x1 = x[0];
    if x1 == 0.0 {
        return Err(Error::ZeroFirstCoordinate);
    }
    let last = x[n - 1];
    if last <= 0.0 {
        return Err(Error::ZeroLastCoordinate);
    }
    let q = (1.0 - x1) / last;
    let b = if q < 0.0 {
        0
    } else {
        q.floor_u64().ok_or(Error::DigitOverflow)?
    };
    let r = (1.0 - x1 - b as f64 * last).clamp(0.0, last);
    for i in 0..n - 1 {
        x[i] = x[i + 1] / x1;
    }
    x[n - 1] = r / x1;
    Ok(b)
}

/// One step of the slow map: `(t_0(x), 0)` when `x_1 + x_n > 1`, otherwise
/// `(t_1(x), 1)`. The boundary `x_1 + x_n = 1` goes to `t_1`.
pub fn slow_step<T: Scalar>(x: &SimplexPoint<T>) -> Result<(SimplexPoint<T>, u8)> {
    let x1 = x.first().clone();
    if x1.is_zero() {
        return Err(Error::ZeroFirstCoordinate);
    }
    let last = x.last().clone();
    if last.is_zero() || last.is_negative() {
        return Err(Error::ZeroLastCoordinate);
    }
    let c = x.coords();
    if x1.clone() + last.clone() > T::one() {
        let mut out: Vec<T> = c[1..].iter().map(|v| v.clone() / x1.clone()).collect();
        let mut tail = (T::one() - x1.clone()) / x1.clone();
        let cap = last / x1;
        if tail > cap {
            tail = cap;
        }
        out.push(tail);
        Ok((SimplexPoint::new_unchecked(out), 0))
    } else {
        let denom = T::one() - last;
        let out: Vec<T> = c
            .iter()
            .map(|v| {
                let y = v.clone() / denom.clone();
                if y > T::one() {
                    T::one()
                } else {
                    y
                }
            })
            .collect();
        Ok((SimplexPoint::new_unchecked(out), 1))
    }
}

/// The `(n+1) x (n+1)` integer matrix of the homogeneous branch with digit
/// `b`: rows `e_1, ..., e_n` followed by `(1, -1, 0, ..., 0, -b)`.
pub fn branch_matrix(n: usize, b: u64) -> IntMatrix {
    let mut m = IntMatrix::zeros(n + 1);
    for i in 0..n {
        m[(i, i + 1)] = BigInt::one();
    }
    m[(n, 0)] += 1;
    m[(n, 1)] -= 1;
    m[(n, n)] -= BigInt::from(b);
    m
}

/// Inverse of [`branch_matrix`]: `x_0 = y_0 + b y_(n-1) + y_n`,
/// `x_i = y_(i-1)`. All entries are nonnegative.
pub fn inverse_branch_matrix(n: usize, b: u64) -> IntMatrix {
    let mut m = IntMatrix::zeros(n + 1);
    for i in 1..=n {
        m[(i, i - 1)] = BigInt::one();
    }
    m[(0, 0)] += 1;
    m[(0, n - 1)] += BigInt::from(b);
    m[(0, n)] += 1;
    m
}

/// One step of the homogeneous map
/// `T(x_0, ..., x_n) = (x_1, ..., x_n, x_0 - x_1 - b x_n)`.
///
/// Boundary vectors of the closed cone are accepted as long as `x_n > 0`.
pub fn hom_step<T: Scalar>(
    v: &HomogeneousVector<T>,
) -> Result<(HomogeneousVector<T>, u64, IntMatrix)> {
    if v.cone_status() == ConeStatus::Outside {
        return Err(Error::NotInCone);
    }
    let c = v.coords();
    let n = v.dim();
    let last = c[n].clone();
    if last.is_zero() {
        return Err(Error::ZeroLastCoordinate);
    }
    let q = (c[0].clone() - c[1].clone()) / last.clone();
    let b = if q.is_negative() {
        0
    } else {
        q.floor_u64().ok_or(Error::DigitOverflow)?
    };
    let mut out: Vec<T> = c[1..].to_vec();
    let mut r = c[0].clone() - c[1].clone() - T::from_u64(b) * last.clone();
    if r.is_negative() {
        r = T::zero();
    }
    if r > last {
        r = last;
    }
    out.push(r);
    Ok((HomogeneousVector::new_unchecked(out), b, branch_matrix(n, b)))
}

/// `P(x_0, ..., x_n) = (x_1/x_0, ..., x_n/x_0)`.
pub fn project<T: Scalar>(v: &HomogeneousVector<T>) -> Result<SimplexPoint<T>> {
    let c = v.coords();
    if c[0].is_zero() {
        return Err(Error::ZeroVector);
    }
    SimplexPoint::new(c[1..].iter().map(|x| x.clone() / c[0].clone()).collect())
}

/// `i(x_1, ..., x_n) = (1, x_1, ..., x_n)`.
pub fn embed<T: Scalar>(x: &SimplexPoint<T>) -> HomogeneousVector<T> {
    let mut c = Vec::with_capacity(x.dim() + 1);
    c.push(T::one());
    c.extend_from_slice(x.coords());
    HomogeneousVector::new_unchecked(c)
}

/// `P^S(v) = v / ||v||_1`.
pub fn slice_normalize<T: Scalar>(v: &HomogeneousVector<T>) -> Result<HomogeneousVector<T>> {
    let norm = v.norm1();
    if norm.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(HomogeneousVector::new_unchecked(
        v.coords().iter().map(|c| c.clone() / norm.clone()).collect(),
    ))
}

/// One step of the sliced map `T^S(v) = T^H(v) / ||T^H(v)||`.
pub fn sliced_step<T: Scalar>(v: &HomogeneousVector<T>) -> Result<(HomogeneousVector<T>, u64)> {
    let (w, b, _) = hom_step(v)?;
    Ok((slice_normalize(&w)?, b))
}

/// The `k`-th preimage of `x` under the fast map: the unique `y` with
/// `T(y) = x` and `digit(y) = k`.
///
/// For `n >= 2`, `y = (1, x_1, ..., x_(n-1)) / (1 + k x_(n-1) + x_n)`; for
/// `n = 1` it is the Gauss preimage `1 / (k + 1 + x)`.
pub fn inverse_branch_fast<T: Scalar>(x: &SimplexPoint<T>, k: u64) -> SimplexPoint<T> {
    let c = x.coords();
    let n = c.len();
    let kk = T::from_u64(k);
    if n == 1 {
        let y = T::one() / (kk + T::one() + c[0].clone());
        return SimplexPoint::new_unchecked(vec![y]);
    }
    let d = T::one() + kk * c[n - 2].clone() + c[n - 1].clone();
    let mut out = Vec::with_capacity(n);
    out.push(T::one() / d.clone());
    out.extend(c[..n - 1].iter().map(|v| v.clone() / d.clone()));
    SimplexPoint::new_unchecked(out)
}

/// Both preimages of the slow map: `(t_0^{-1}(x), t_1^{-1}(x))` with
/// `t_0^{-1}(x) = (1, x_1, ..., x_(n-1)) / (1 + x_n)` and
/// `t_1^{-1}(x) = x / (1 + x_n)`.
pub fn inverse_branches_slow<T: Scalar>(x: &SimplexPoint<T>) -> (SimplexPoint<T>, SimplexPoint<T>) {
    let c = x.coords();
    let n = c.len();
    let d = T::one() + c[n - 1].clone();
    let mut zero = Vec::with_capacity(n);
    zero.push(T::one() / d.clone());
    zero.extend(c[..n - 1].iter().map(|v| v.clone() / d.clone()));
    let one = c.iter().map(|v| v.clone() / d.clone()).collect();
    (
        SimplexPoint::new_unchecked(zero),
        SimplexPoint::new_unchecked(one),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        rational(n, d)
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn digit_examples() {
        assert_eq!(digit(&SimplexPoint::new(vec![0.7]).unwrap()).unwrap(), 0);
        assert_eq!(digit(&SimplexPoint::new(vec![0.7, 0.2]).unwrap()).unwrap(), 1);
        assert_eq!(digit(&SimplexPoint::new(vec![1.0, 0.5]).unwrap()).unwrap(), 0);
        assert_eq!(
            digit(&SimplexPoint::new(vec![0.5, 0.0]).unwrap()),
            Err(Error::ZeroLastCoordinate)
        );
    }

    #[test]
    fn fast_step_examples() {
        let (y, b) = fast_step(&SimplexPoint::new(vec![0.7, 0.2]).unwrap()).unwrap();
        assert_eq!(b, 1);
        assert!(close(y.coords(), &[2.0 / 7.0, 1.0 / 7.0], 1e-15));
        assert!(SimplexPoint::new(y.coords().to_vec()).is_ok());

        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (y, b) = fast_step(&SimplexPoint::new(vec![g]).unwrap()).unwrap();
        assert_eq!(b, 0);
        assert!((y.coords()[0] - g).abs() < 1e-15);

        let x = SimplexPoint::new(vec![q(7, 10), q(2, 10)]).unwrap();
        let (y, b) = fast_step(&x).unwrap();
        assert_eq!(b, 1);
        assert_eq!(y.coords(), &[q(2, 7), q(1, 7)]);
    }

    #[test]
    fn fast_step_errors() {
        let z = SimplexPoint::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(fast_step(&z).unwrap_err(), Error::ZeroFirstCoordinate);
        let z = SimplexPoint::new(vec![0.5, 0.0]).unwrap();
        assert_eq!(fast_step(&z).unwrap_err(), Error::ZeroLastCoordinate);
    }

    #[test]
    fn slow_step_examples() {
        let (y, i) = slow_step(&SimplexPoint::new(vec![0.7, 0.2]).unwrap()).unwrap();
        assert_eq!(i, 1);
        assert!(close(y.coords(), &[0.875, 0.25], 1e-15));
        let (y, i) = slow_step(&y).unwrap();
        assert_eq!(i, 0);
        assert!(close(y.coords(), &[2.0 / 7.0, 1.0 / 7.0], 1e-15));
        let (y, i) = slow_step(&SimplexPoint::new(vec![q(3, 4)]).unwrap()).unwrap();
        assert_eq!(i, 0);
        assert_eq!(y.coords(), &[q(1, 3)]);
    }

    #[test]
    fn slow_boundary_goes_to_t1() {
        // x_1 + x_n = 1 exactly
        let x = SimplexPoint::new(vec![q(3, 5), q(2, 5)]).unwrap();
        let (y, i) = slow_step(&x).unwrap();
        assert_eq!(i, 1);
        assert_eq!(y.coords(), &[q(1, 1), q(2, 3)]);
        assert_eq!(digit(&x).unwrap(), 1);
    }

    #[test]
    fn hom_step_example() {
        let v = HomogeneousVector::new(vec![q(10, 1), q(7, 1), q(2, 1)]).unwrap();
        let (w, b, m) = hom_step(&v).unwrap();
        assert_eq!(b, 1);
        assert_eq!(w.coords(), &[q(7, 1), q(2, 1), q(1, 1)]);
        let ints: Vec<BigInt> = [10, 7, 2].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(m.apply(&ints), [7, 2, 1].map(BigInt::from).to_vec());
        assert_eq!(m.determinant().magnitude(), &num_bigint::BigUint::from(1u32));
        let bad = HomogeneousVector::new(vec![1.0, 2.0, 0.5]).unwrap();
        assert_eq!(hom_step(&bad).unwrap_err(), Error::NotInCone);
    }

    #[test]
    fn golden_direction_fixed_by_t0() {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let v = HomogeneousVector::new(vec![1.0, g]).unwrap();
        let (w, b, m) = hom_step(&v).unwrap();
        assert_eq!(b, 0);
        assert_eq!(m, IntMatrix::from_i64_rows(&[vec![0, 1], vec![1, -1]]));
        // w is parallel to v
        assert!((w.coords()[1] / w.coords()[0] - g).abs() < 1e-14);
    }

    #[test]
    fn branch_matrices_are_inverse() {
        for n in 1..6 {
            for b in [0u64, 1, 7, 1000] {
                let p = &branch_matrix(n, b) * &inverse_branch_matrix(n, b);
                assert_eq!(p, IntMatrix::identity(n + 1));
                assert!(branch_matrix(n, b).determinant().magnitude().is_one());
            }
        }
    }

    #[test]
    fn slice_and_embed() {
        let v = HomogeneousVector::new(vec![1.0, 1.0, 0.0]).unwrap();
        assert_eq!(slice_normalize(&v).unwrap().coords(), &[0.5, 0.5, 0.0]);
        let v = HomogeneousVector::new(vec![q(1, 1), q(1, 1), q(1, 1)]).unwrap();
        let s = slice_normalize(&v).unwrap();
        assert_eq!(s.coords(), &[q(1, 3), q(1, 3), q(1, 3)]);
        assert_eq!(slice_normalize(&s).unwrap(), s);
        let z = HomogeneousVector::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(slice_normalize(&z).unwrap_err(), Error::ZeroVector);

        let x = SimplexPoint::new(vec![0.7, 0.2]).unwrap();
        assert_eq!(embed(&x).coords(), &[1.0, 0.7, 0.2]);
        assert_eq!(project(&embed(&x)).unwrap(), x);
        let s = slice_normalize(&embed(&x)).unwrap();
        assert!(close(s.coords(), &[1.0 / 1.9, 0.7 / 1.9, 0.2 / 1.9], 1e-15));
    }

    #[test]
    fn inverse_branch_examples() {
        let x = SimplexPoint::new(vec![q(2, 7), q(1, 7)]).unwrap();
        assert_eq!(inverse_branch_fast(&x, 1).coords(), &[q(7, 10), q(2, 10)]);
        let x = SimplexPoint::new(vec![q(1, 2)]).unwrap();
        assert_eq!(inverse_branch_fast(&x, 0).coords(), &[q(2, 3)]);
    }

    #[test]
    fn slow_inverse_examples() {
        let w1 = SimplexPoint::new(vec![q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(inverse_branches_slow(&w1).1.coords(), &[q(1, 3), q(1, 3)]);
        let w2 = SimplexPoint::new(vec![q(1, 1), q(1, 1)]).unwrap();
        assert_eq!(inverse_branches_slow(&w2).1.coords(), &[q(1, 2), q(1, 2)]);
        for n in 2..6 {
            for i in 1..n {
                let mut v = vec![q(1, 1); i];
                v.resize(n, q(0, 1));
                let p = SimplexPoint::new(v).unwrap();
                assert_eq!(inverse_branches_slow(&p).1, p);
            }
        }
        let x = SimplexPoint::new(vec![q(3, 5), q(1, 5)]).unwrap();
        let (a, b) = inverse_branches_slow(&x);
        assert_eq!(slow_step(&a).unwrap(), (x.clone(), 0));
        assert_eq!(slow_step(&b).unwrap(), (x, 1));
    }
}
