//! The normalizing constant `C_n = int_simplex dx / (x_1 ... x_(n-1) (1 + x_n))`.
//!
//! Closed form: `C_1 = log 2`, and `C_n = (2^(n-1) - 1) / 2^(n-1) * zeta(n)`,
//! which is the alternating series `1 - 1/2^n + 1/3^n - ...`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{mean_and_error, Parallelism};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantMethod {
    Series,
    Quadrature,
}

impl std::str::FromStr for ConstantMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(Self::Series),
            "quadrature" | "mc" => Ok(Self::Quadrature),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantEstimate {
    pub n: usize,
    pub method: ConstantMethod,
    pub value: f64,
    /// Series: rigorous truncation bound. Quadrature: one standard error.
    pub error: f64,
    /// Terms summed or samples drawn.
    pub budget: u64,
    pub closed_form: f64,
}

/// Riemann zeta at an integer `s >= 2` by Euler-Maclaurin with ten explicit
/// terms and six Bernoulli corrections.
pub fn zeta(s: u32) -> f64 {
    assert!(s >= 2, "zeta pole at s = 1");
    const N: f64 = 10.0;
    const BERNOULLI: [f64; 6] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
    ];
    let sf = s as f64;
    let mut sum: f64 = (1..10).map(|k| (k as f64).powf(-sf)).sum();
    sum += N.powf(1.0 - sf) / (sf - 1.0) + 0.5 * N.powf(-sf);
    // B_2j / (2j)! * s (s+1) ... (s+2j-2) * N^(-s-2j+1)
    let mut rising = sf;
    let mut fact = 2.0;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let j = j as i32 + 1;
        sum += b / fact * rising * N.powf(-sf - 2.0 * j as f64 + 1.0);
        let (a, c) = (sf + 2.0 * j as f64 - 1.0, sf + 2.0 * j as f64);
        rising *= a * c;
        fact *= (2.0 * j as f64 + 1.0) * (2.0 * j as f64 + 2.0);
    }
    sum
}

pub fn closed_form_constant(n: usize) -> Result<f64> {
    match n {
        0 => Err(Error::InvalidDimension(0)),
        1 => Ok(std::f64::consts::LN_2),
        _ => {
            let p = 2f64.powi(n as i32 - 1);
            Ok((p - 1.0) / p * zeta(n as u32))
        }
    }
}

/// `sum_k (-1)^(k+1) / k^n`, reported as the mean of two consecutive
/// partial sums. The terms are decreasing and convex, so the error is at
/// most half the difference of the first two omitted terms. Summation stops
/// once that bound is below `tol`, or after `max_terms`.
pub fn series_constant(n: usize, tol: f64, max_terms: u64) -> Result<ConstantEstimate> {
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let a = |k: u64| (k as f64).powi(-(n as i32));
    let mut s = 0.0;
    let mut k = 1u64;
    loop {
        let t = a(k);
        s += if k % 2 == 1 { t } else { -t };
        let bound = 0.5 * (a(k + 1) - a(k + 2));
        if bound < tol || k >= max_terms {
            let next = if (k + 1) % 2 == 1 { a(k + 1) } else { -a(k + 1) };
            return Ok(ConstantEstimate {
                n,
                method: ConstantMethod::Series,
                value: s + 0.5 * next,
                error: bound,
                budget: k,
                closed_form: closed_form_constant(n)?,
            });
        }
        k += 1;
    }
}

/// Monte Carlo over the cube after `x_k = u_1 ... u_k`, which turns the
/// integral into `int_[0,1]^n du / (1 + u_1 ... u_n)` with a bounded
/// integrand. The first coordinate is stratified into one stratum per
/// sample block.
pub fn quadrature_constant(n: usize, samples: u64, par: Parallelism) -> Result<ConstantEstimate> {
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if samples == 0 {
        return Err(Error::PreconditionViolated("no samples".into()));
    }
    const STRATA: u64 = 1024;
    let strata = STRATA.min(samples);
    let per = samples / strata;
    let total = strata * per;
    let parts = par.run(strata as usize, |rng, _, start, count| {
        let mut acc = Vec::with_capacity(count);
        for s in start..start + count {
            let (mut sum, mut sq) = (0.0, 0.0);
            for _ in 0..per {
                let u1 = (s as f64 + rng.gen::<f64>()) / strata as f64;
                let prod = (1..n).fold(u1, |p, _| p * rng.gen::<f64>());
                let v = 1.0 / (1.0 + prod);
                sum += v;
                sq += v * v;
            }
            acc.push((sum, sq));
        }
        acc
    });
    // stratified mean: average of stratum means, variance from within-stratum
    let mut mean = 0.0;
    let mut var = 0.0;
    for (sum, sq) in parts.into_iter().flatten() {
        let (m, se) = mean_and_error(sum, sq, per);
        mean += m;
        var += se * se;
    }
    let sf = strata as f64;
    Ok(ConstantEstimate {
        n,
        method: ConstantMethod::Quadrature,
        value: mean / sf,
        error: var.sqrt() / sf,
        budget: total,
        closed_form: closed_form_constant(n)?,
    })
}

/// Dispatch on `method`; `budget` is the term cap for the series and the
/// sample count for quadrature.
pub fn normalizing_constant(
    n: usize,
    method: ConstantMethod,
    budget: u64,
    par: Parallelism,
) -> Result<ConstantEstimate> {
    match method {
        ConstantMethod::Series => series_constant(n, 1e-13, budget),
        ConstantMethod::Quadrature => quadrature_constant(n, budget, par),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_values() {
        let pi = std::f64::consts::PI;
        assert!((zeta(2) - pi * pi / 6.0).abs() < 1e-14);
        assert!((zeta(3) - 1.2020569031595942).abs() < 1e-14);
        assert!((zeta(4) - pi.powi(4) / 90.0).abs() < 1e-14);
    }

    #[test]
    fn constants() {
        assert!((closed_form_constant(2).unwrap() - 0.8224670334241132).abs() < 1e-14);
        assert!((closed_form_constant(3).unwrap() - 0.9015426773696957).abs() < 1e-13);
        for n in 1..=5 {
            let s = series_constant(n, 1e-13, 10_000_000).unwrap();
            assert!((s.value - s.closed_form).abs() < 1e-11, "n={n}");
            assert!(s.error < 1e-13);
        }
    }

    #[test]
    fn quadrature_is_close() {
        let q = quadrature_constant(3, 200_000, Parallelism::default()).unwrap();
        assert!((q.value - q.closed_form).abs() < 4.0 * q.error);
        assert!(q.error < 1e-3);
    }
}
