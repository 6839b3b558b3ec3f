use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::Cell;
use crate::error::{Error, Result};
use crate::scalar::{as_string, as_string_seq};

/// `W(c) = 1 / (||A_0|| ||A_1|| ... ||A_n||)`.
///
/// The slice simplex of a unimodular cone has Lebesgue measure
/// `sqrt(n+1)/n! * W(c)`, and the weights of the children of a cell sum to
/// the weight of the cell.
pub fn volume_weight(cell: &Cell) -> BigRational {
    let prod = cell
        .norms()
        .into_iter()
        .fold(BigInt::one(), |acc, s| acc * s);
    BigRational::new(BigInt::one(), prod)
}

/// The n-dimensional Lebesgue measure of the slice simplex `{||x|| = 1}`.
pub fn slice_volume(cell: &Cell) -> f64 {
    let n = cell.n();
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    ((n + 1) as f64).sqrt() / fact * volume_weight(cell).to_f64().unwrap_or(0.0)
}

/// Both closed forms of `sum_{b >= r} 1 / prod_{k=0}^{N-1} ((b+k) a + y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TelescopedSum {
    pub terms: usize,
    pub start: u64,
    /// `1 / ((N-1) a prod_{k=0}^{N-2} ((r+k) a + y))`
    #[serde(with = "as_string")]
    pub product_form: BigRational,
    /// `sum_j coefficients[j] / a^(N-1) / ((r+j) a + y)`
    #[serde(with = "as_string")]
    pub alternating_form: BigRational,
    /// `C(N-2, j) (-1)^j / (N-1)!`
    #[serde(with = "as_string_seq")]
    pub coefficients: Vec<BigRational>,
}

pub fn telescoped_sum(
    terms: usize,
    start: u64,
    a: &BigRational,
    y: &BigRational,
) -> Result<TelescopedSum> {
    if terms < 2 {
        return Err(Error::PreconditionViolated(format!(
            "need at least 2 factors, got {terms}"
        )));
    }
    if !a.is_positive() || y.is_negative() {
        return Err(Error::PreconditionViolated(
            "need a > 0 and y >= 0".into(),
        ));
    }
    let big = |v: u64| BigRational::from_integer(BigInt::from(v));
    let r = start;
    let nm1 = (terms - 1) as u64;
    let mut prod = big(nm1) * a;
    for k in 0..nm1 {
        prod = prod * (big(r + k) * a + y);
    }
    if prod.is_zero() {
        return Err(Error::PoleHit("zero factor in telescoped product".into()));
    }
    let product_form = prod.recip();

    let fact: BigInt = (1..=nm1).map(BigInt::from).product();
    let coefficients: Vec<BigRational> = (0..nm1)
        .map(|j| {
            let c = binomial(BigInt::from(nm1 - 1), BigInt::from(j));
            let c = if j % 2 == 1 { -c } else { c };
            BigRational::new(c, fact.clone())
        })
        .collect();
    let mut alt = BigRational::zero();
    for (j, c) in coefficients.iter().enumerate() {
        let den = big(r + j as u64) * a + y;
        if den.is_zero() {
            return Err(Error::PoleHit(format!("term {j}")));
        }
        alt += c / den;
    }
    let apow = (0..nm1).fold(BigRational::one(), |acc, _| acc * a);
    Ok(TelescopedSum {
        terms,
        start,
        product_form,
        alternating_form: alt / apow,
        coefficients,
    })
}

/// Comparison of the zero-tail volume with its closed-form lower bound.
///
/// `R` is the union over `b >= 1` of the children with appended digits
/// `(b, 0^(n-1))`. Each child's vertex norms are bounded by
/// `||(b+k) A_0 + A||`, `k = 0..n`, where `A = A_1 + ... + A_n`, and the
/// resulting telescoping series gives
/// `W(R) > 1 / (n ||A_0|| prod_{k=1}^{n} ||k A_0 + A||)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroTailBound {
    pub n: usize,
    pub truncation: u64,
    /// Exact closed-form lower bound on `W(R)`.
    #[serde(with = "as_string")]
    pub bound: BigRational,
    /// `sum_{b=1}^{K} W(child_b)`.
    pub partial_sum: f64,
    /// Telescoped lower bound on the remaining terms `b > K`.
    pub tail_lower: f64,
    /// `partial_sum + tail_lower`, itself a lower bound on `W(R)`.
    pub series: f64,
    /// `W(c)` of the parent cell.
    pub parent_weight: f64,
    /// `series / parent_weight`, an estimate of `lambda(R) / lambda(c)`.
    pub ratio: f64,
    pub holds: bool,
}

fn recip_f64(prod: &BigInt) -> f64 {
    BigRational::new(BigInt::one(), prod.clone())
        .to_f64()
        .unwrap_or(0.0)
}

pub fn zero_tail_weight_bound(cell: &Cell, truncation: u64) -> Result<ZeroTailBound> {
    let n = cell.n();
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let norms = cell.norms();
    let a = BigRational::from_integer(norms[0].clone());
    let y = BigRational::from_integer(norms[1..].iter().sum());
    let bound = telescoped_sum(n + 1, 1, &a, &y)?.product_form;

    let mut partial = 0.0f64;
    for b in 1..=truncation {
        let mut child = cell.extend(b);
        for _ in 1..n {
            child.extend_in_place(0);
        }
        let prod = child
            .norms()
            .into_iter()
            .fold(BigInt::one(), |acc, s| acc * s);
        partial += recip_f64(&prod);
    }
    let tail_lower = telescoped_sum(n + 1, truncation + 1, &a, &y)?
        .product_form
        .to_f64()
        .unwrap_or(0.0);
    let series = partial + tail_lower;
    let parent_weight = volume_weight(cell).to_f64().unwrap_or(0.0);
    let bound_f = bound.to_f64().unwrap_or(0.0);
    Ok(ZeroTailBound {
        n,
        truncation,
        holds: series > bound_f,
        bound,
        partial_sum: partial,
        tail_lower,
        series,
        parent_weight,
        ratio: series / parent_weight,
    })
}

/// `1 / ((n-1) n (n+1) ... (2n-2) n^(n-1))`.
pub fn measure_ratio_lower_bound(n: usize) -> Result<BigRational> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let rising: BigInt = (n - 1..=2 * n - 2).map(BigInt::from).product();
    let pow = num_traits::pow(BigInt::from(n), n - 1);
    Ok(BigRational::new(BigInt::one(), rising * pow))
}
