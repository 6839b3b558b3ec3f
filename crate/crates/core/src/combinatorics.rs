//! Integer compositions in standard order, signed multinomials, and the two
//! exact identities built on them.
//!
//! Standard order is lexicographic with larger parts first, so the
//! compositions of 3 are `{3}, {2,1}, {1,2}, {1,1,1}`. Indices are 1-based.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::as_string;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Composition {
    pub parts: Vec<u32>,
    pub total: u32,
    pub index: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignedMultinomial {
    pub composition: Composition,
    /// `total! / prod(parts!)`
    #[serde(with = "as_string")]
    pub value: BigInt,
    /// `(-1)^(parts - 1)`
    pub sign: i8,
}

impl SignedMultinomial {
    pub fn signed_value(&self) -> BigInt {
        if self.sign < 0 {
            -self.value.clone()
        } else {
            self.value.clone()
        }
    }
}

/// All `2^(n-1)` compositions of `n`, generated largest-first so the output
/// is already in standard order.
pub fn compositions_standard_order(n: u32) -> Result<Vec<Composition>> {
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let mut out = Vec::with_capacity(1usize << (n - 1).min(40));
    let mut stack = Vec::new();
    fill(n, &mut stack, &mut out, n);
    Ok(out)
}

fn fill(rest: u32, stack: &mut Vec<u32>, out: &mut Vec<Composition>, total: u32) {
    if rest == 0 {
        out.push(Composition {
            parts: stack.clone(),
            total,
            index: out.len() as u64 + 1,
        });
        return;
    }
    for first in (1..=rest).rev() {
        stack.push(first);
        fill(rest - first, stack, out, total);
        stack.pop();
    }
}

fn factorial(k: u32) -> BigInt {
    (1..=k).map(BigInt::from).product()
}

pub fn signed_multinomial(c: &Composition) -> SignedMultinomial {
    let den: BigInt = c.parts.iter().map(|&p| factorial(p)).product();
    SignedMultinomial {
        composition: c.clone(),
        value: factorial(c.total) / den,
        sign: if c.parts.len() % 2 == 1 { 1 } else { -1 },
    }
}

/// Signed multinomials of row `n` in standard order.
pub fn signed_row(n: u32) -> Result<Vec<BigInt>> {
    Ok(compositions_standard_order(n)?
        .iter()
        .map(|c| signed_multinomial(c).signed_value())
        .collect())
}

/// `sum over i = 1 (mod 2^(n-k))` of the signed multinomials of
/// `C_(n+1, i)`; equals `C(n, k) (-1)^k`.
pub fn tree_prefix_sum(n: u32, k: u32) -> Result<BigInt> {
    if k > n {
        return Err(Error::PreconditionViolated(format!("k = {k} > n = {n}")));
    }
    let step = 1u64 << (n - k);
    Ok(signed_row(n + 1)?
        .into_iter()
        .enumerate()
        .filter(|(i, _)| (*i as u64) % step == 0)
        .map(|(_, v)| v)
        .sum())
}

/// Sum of the first `2^k` signed entries of row `n + 1`. Agrees with
/// [`tree_prefix_sum`]; it is the ordering used in the worked `n = 4`
/// listing `1 - 5 - 10 + 20 - 10 + 30 + 30 - 60`.
pub fn row_prefix_sum(n: u32, k: u32) -> Result<BigInt> {
    if k > n {
        return Err(Error::PreconditionViolated(format!("k = {k} > n = {n}")));
    }
    Ok(signed_row(n + 1)?.into_iter().take(1usize << k).sum())
}

/// `S_n`, the full signed row sum; equals `(-1)^(n-1)`.
pub fn row_sum(n: u32) -> Result<BigInt> {
    Ok(signed_row(n)?.into_iter().sum())
}

/// `C(n, k) (-1)^k`, the value both tree sums must hit.
pub fn signed_binomial(n: u32, k: u32) -> BigInt {
    let c = binomial(BigInt::from(n), BigInt::from(k));
    if k % 2 == 1 {
        -c
    } else {
        c
    }
}

/// Both sides of
/// `sum_{j=0}^{n-2} C(n-2, j) (-1)^j / ((j+1) x + y)
///   = (n-2)! x^(n-2) / ((x + y)(2x + y) ... ((n-1) x + y))`.
pub fn partial_fraction_sides(
    n: u32,
    x: &BigRational,
    y: &BigRational,
) -> Result<(BigRational, BigRational)> {
    if n < 2 {
        return Err(Error::InvalidDimension(n as usize));
    }
    let m = n - 2;
    let lin = |j: u32| BigRational::from_integer(BigInt::from(j)) * x + y;
    let mut lhs = BigRational::zero();
    let mut den = BigRational::one();
    for j in 0..=m {
        let d = lin(j + 1);
        if d.is_zero() {
            return Err(Error::PoleHit(format!("({}) x + y = 0", j + 1)));
        }
        let c = BigRational::from_integer(signed_binomial(m, j));
        lhs += c / &d;
        den *= d;
    }
    let xpow = (0..m).fold(BigRational::one(), |acc, _| acc * x);
    let rhs = BigRational::from_integer(factorial(m)) * xpow / den;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn parts(n: u32) -> Vec<Vec<u32>> {
        compositions_standard_order(n)
            .unwrap()
            .into_iter()
            .map(|c| c.parts)
            .collect()
    }

    #[test]
    fn standard_order_small() {
        assert_eq!(parts(3), vec![vec![3], vec![2, 1], vec![1, 2], vec![1, 1, 1]]);
        let c5 = compositions_standard_order(5).unwrap();
        assert_eq!(c5[6].parts, vec![2, 1, 2]);
        assert_eq!(c5[6].index, 7);
        assert!(compositions_standard_order(0).is_err());
    }

    #[test]
    fn multinomials() {
        let c = Composition {
            parts: vec![2, 1, 2],
            total: 5,
            index: 7,
        };
        let m = signed_multinomial(&c);
        assert_eq!(m.value, BigInt::from(30));
        assert_eq!(m.signed_value(), BigInt::from(30));
        let ones = Composition {
            parts: vec![1; 6],
            total: 6,
            index: 32,
        };
        assert_eq!(signed_multinomial(&ones).signed_value(), BigInt::from(-720));
    }

    #[test]
    fn worked_tree_sum() {
        assert_eq!(tree_prefix_sum(4, 3).unwrap(), BigInt::from(-4));
        assert_eq!(row_prefix_sum(4, 3).unwrap(), BigInt::from(-4));
        let first8: Vec<i64> = signed_row(5).unwrap()[..8]
            .iter()
            .map(|v| i64::try_from(v).unwrap())
            .collect();
        assert_eq!(first8, vec![1, -5, -10, 20, -10, 30, 30, -60]);
        assert_eq!(tree_prefix_sum(2, 1).unwrap(), BigInt::from(-2));
        assert!(tree_prefix_sum(2, 3).is_err());
    }

    #[test]
    fn row_sums() {
        assert_eq!(row_sum(1).unwrap(), BigInt::one());
        assert_eq!(row_sum(3).unwrap(), BigInt::one());
        assert_eq!(row_sum(4).unwrap(), -BigInt::one());
    }

    #[test]
    fn partial_fraction_examples() {
        let (l, r) = partial_fraction_sides(4, &rational(1, 1), &rational(1, 1)).unwrap();
        assert_eq!(l, rational(1, 12));
        assert_eq!(r, rational(1, 12));
        let (x, y) = (rational(3, 7), rational(-2, 5));
        let (l, r) = partial_fraction_sides(2, &x, &y).unwrap();
        assert_eq!(l, (x.clone() + y.clone()).recip());
        assert_eq!(l, r);
        // x + y = 0
        assert!(matches!(
            partial_fraction_sides(3, &rational(1, 1), &rational(-1, 1)),
            Err(Error::PoleHit(_))
        ));
    }
}
