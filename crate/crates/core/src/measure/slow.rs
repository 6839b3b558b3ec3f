//! The slow map's invariant measure `d nu = dx / (x_1 ... x_n)` is infinite
//! on `t_1`'s branch and finite on `t_0`'s. With `x_k = u_1 ... u_k` and
//! `u_k = exp(-s_k)` it becomes Lebesgue measure `ds` on the orthant, and
//! `x_n >= eps` becomes `s_1 + ... + s_n <= log(1/eps)`, so truncated masses
//! are volumes that can be sampled uniformly from a cube.

use rand::Rng;
use serde::Serialize;

use super::sampling::{mean_and_error, Parallelism};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlowMassEstimate {
    pub eps: f64,
    /// `nu({x_1 + x_n <= 1, x_n >= eps})`
    pub branch_one: f64,
    pub branch_one_error: f64,
    /// `nu({x_1 + x_n > 1, x_n >= eps})`
    pub branch_zero: f64,
    pub branch_zero_error: f64,
}

pub fn slow_truncated_mass(n: usize, eps: f64, samples: u64, par: Parallelism) -> Result<SlowMassEstimate> {
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::PreconditionViolated(format!("eps = {eps} not in (0, 1)")));
    }
    let l = (1.0 / eps).ln();
    let cube = l.powi(n as i32);
    let parts = par.run(samples as usize, |rng, _, _, count| {
        let (mut one, mut zero) = (0u64, 0u64);
        for _ in 0..count {
            let mut total = 0.0;
            let mut x1 = 0.0;
            for k in 0..n {
                let s = l * rng.gen::<f64>();
                total += s;
                if k == 0 {
                    x1 = (-s).exp();
                }
            }
            if total > l {
                continue;
            }
            let xn = (-total).exp();
            if x1 + xn > 1.0 {
                zero += 1;
            } else {
                one += 1;
            }
        }
        (one, zero)
    });
    let (one, zero) = parts.into_iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let est = |h: u64| {
        let (m, se) = mean_and_error(h as f64, h as f64, samples);
        (m * cube, se * cube)
    };
    let (b1, e1) = est(one);
    let (b0, e0) = est(zero);
    Ok(SlowMassEstimate {
        eps,
        branch_one: b1,
        branch_one_error: e1,
        branch_zero: b0,
        branch_zero_error: e0,
    })
}
