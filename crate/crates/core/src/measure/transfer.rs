//! Transfer (Perron-Frobenius) operators of the fast and slow maps.

use serde::Serialize;

use super::quad::gauss20;
use crate::error::{Error, Result};
use crate::mcf::{inverse_branches_slow, SimplexPoint};
use crate::scalar::Scalar;

/// Truncated transfer series with its tail treatment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferSum {
    /// `partial_sum + tail_estimate`.
    pub value: f64,
    /// `sum_{k=0}^{K} g(k)` with `g(k) = D_k^{-(n+1)} f(y_k)`.
    pub partial_sum: f64,
    /// Euler-Maclaurin estimate of `sum_{k>K} g(k)`.
    pub tail_estimate: f64,
    /// Change in `value` between the last two truncation levels.
    pub last_change: f64,
    pub terms: u64,
}

/// `D(t) = 1 + t s + x_n` and the preimage `y(t) = (1, x_1, ..., x_(n-1)) / D(t)`,
/// where `s = x_(n-1)` for `n >= 2` and `s = 1` for `n = 1` (Gauss branch
/// `1 / (k + 1 + x)`).
struct Branches<'a> {
    x: &'a [f64],
    s: f64,
}

impl Branches<'_> {
    fn d(&self, t: f64) -> f64 {
        1.0 + t * self.s + self.x[self.x.len() - 1]
    }

    fn preimage(&self, d: f64, buf: &mut [f64]) {
        let n = self.x.len();
        buf[0] = 1.0 / d;
        for i in 1..n {
            buf[i] = self.x[i - 1] / d;
        }
    }

    fn term<F: Fn(&[f64]) -> f64>(&self, f: &F, t: f64, buf: &mut [f64]) -> f64 {
        let d = self.d(t);
        self.preimage(d, buf);
        f(buf) * d.powi(-(self.x.len() as i32 + 1))
    }
}

/// `sum_{k=0}^{K} D_k^{-(n+1)} f(y_k)`.
pub fn transfer_partial_sum_fast<F: Fn(&[f64]) -> f64>(
    f: &F,
    x: &SimplexPoint<f64>,
    last_k: u64,
) -> Result<f64> {
    let br = branches(x)?;
    let mut buf = vec![0.0; x.dim()];
    Ok((0..=last_k).map(|k| br.term(f, k as f64, &mut buf)).sum())
}

fn branches(x: &SimplexPoint<f64>) -> Result<Branches<'_>> {
    let c = x.coords();
    let n = c.len();
    if c.iter().any(|&v| v <= 0.0) {
        if n >= 2 && c[n - 2] <= 0.0 {
            return Err(Error::NonConvergent);
        }
        return Err(Error::BoundaryPoint);
    }
    let s = if n == 1 { 1.0 } else { c[n - 2] };
    Ok(Branches { x: c, s })
}

/// `L f(x) = sum_k D_k^{-(n+1)} f(y_k)` for the fast map.
///
/// The terms are summed up to `K`, and the remainder is added with
/// Euler-Maclaurin: `int_K^inf g - g(K)/2 - g'(K)/12 + g'''(K)/720`, the
/// integral taken in the variable `u = 1/D` where the integrand is smooth
/// for densities growing at most like `D^(n-1)` at the cusp. `K` starts at
/// `16 / s` and doubles until the value moves by less than
/// `tol * max(1, |value|)`.
pub fn transfer_apply_fast<F: Fn(&[f64]) -> f64>(
    f: &F,
    x: &SimplexPoint<f64>,
    tol: f64,
) -> Result<TransferSum> {
    const MAX_TERMS: u64 = 1 << 26;
    let br = branches(x)?;
    let n = x.dim();
    let mut buf = vec![0.0; n];
    let mut k_hi = ((16.0 / br.s).ceil() as u64).max(8);
    let mut partial = 0.0;
    let mut next_k = 0u64;
    let mut prev: Option<f64> = None;
    loop {
        while next_k <= k_hi {
            partial += br.term(f, next_k as f64, &mut buf);
            next_k += 1;
        }
        let tail = em_tail(&br, f, k_hi as f64, &mut buf);
        let value = partial + tail;
        if let Some(p) = prev {
            let change = (value - p).abs();
            if change <= tol * value.abs().max(1.0) {
                return Ok(TransferSum {
                    value,
                    partial_sum: partial,
                    tail_estimate: tail,
                    last_change: change,
                    terms: k_hi + 1,
                });
            }
        }
        if k_hi >= MAX_TERMS {
            return Err(Error::NonConvergent);
        }
        prev = Some(value);
        k_hi *= 2;
    }
}

fn em_tail<F: Fn(&[f64]) -> f64>(br: &Branches<'_>, f: &F, k: f64, buf: &mut [f64]) -> f64 {
    let n = br.x.len();
    let xn = br.x[n - 1];
    let u_k = 1.0 / br.d(k);
    // int_K^inf g(t) dt = int_0^{u_K} g(t(u)) / (s u^2) du
    let integrand = |u: f64| {
        let mut local = vec![0.0; n];
        let t = (1.0 / u - 1.0 - xn) / br.s;
        br.term(f, t, &mut local) / (br.s * u * u)
    };
    let integral = gauss20(&integrand, 0.0, 0.5 * u_k) + gauss20(&integrand, 0.5 * u_k, u_k);
    let g = |t: f64, b: &mut [f64]| br.term(f, t, b);
    let g0 = g(k, buf);
    let (gp1, gm1) = (g(k + 1.0, buf), g(k - 1.0, buf));
    let (gp2, gm2) = (g(k + 2.0, buf), g(k - 2.0, buf));
    let d1 = 0.5 * (gp1 - gm1);
    let d3 = 0.5 * (gp2 - 2.0 * gp1 + 2.0 * gm1 - gm2);
    integral - 0.5 * g0 - d1 / 12.0 + d3 / 720.0
}

/// `L f(x) = (1 + x_n)^{-(n+1)} (f(t_0^{-1} x) + f(t_1^{-1} x))` for the slow
/// map, in either number kind.
pub fn transfer_apply_slow<T, F>(f: &F, x: &SimplexPoint<T>) -> Result<T>
where
    T: Scalar,
    F: Fn(&SimplexPoint<T>) -> Result<T>,
{
    if !x.is_interior() {
        return Err(Error::BoundaryPoint);
    }
    let n = x.dim() as u32;
    let d = T::one() + x.last().clone();
    let w = (0..=n).fold(T::one(), |acc, _| acc * d.clone());
    let (y0, y1) = inverse_branches_slow(x);
    Ok((f(&y0)? + f(&y1)?) / w)
}
