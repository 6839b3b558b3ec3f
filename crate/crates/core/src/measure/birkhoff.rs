//! Birkhoff time averages along fast orbits against invariant-measure space
//! averages.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::constant::closed_form_constant;
use super::quad::integrate_pieces;
use super::sampling::{mean_and_error, Parallelism};
use crate::error::{Error, Result};
use crate::mcf::{fast_step_in_place, SimplexPoint};

/// A measurable set in the simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Full,
    /// Axis-aligned box `lo_i <= x_i <= hi_i`, intersected with the simplex.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// The fast cylinder `{x : digit(x) = digit}`.
    DigitCylinder { digit: u64 },
}

impl Region {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Full => true,
            Region::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| *l <= *v && *v <= *h),
            Region::DigitCylinder { digit } => {
                let n = x.len();
                let q = (1.0 - x[0]) / x[n - 1];
                q >= 0.0 && q.is_finite() && q.floor() as u64 == *digit
            }
        }
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if let Region::Box { lo, hi } = self {
            if lo.len() != n || hi.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: lo.len().min(hi.len()),
                });
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self {
            Region::Full => "full".into(),
            Region::Box { lo, hi } => {
                let parts: Vec<String> = lo
                    .iter()
                    .zip(hi)
                    .map(|(l, h)| format!("[{l},{h}]"))
                    .collect();
                format!("box{}", parts.join("x"))
            }
            Region::DigitCylinder { digit } => format!("digit={digit}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BirkhoffEstimate {
    pub region: Region,
    pub time_average: f64,
    pub space_average: f64,
    /// Standard error of the space average (zero for deterministic
    /// quadrature).
    pub space_error: f64,
    pub abs_error: f64,
}

/// Fraction of `T^k x0`, `k = 0..steps-1`, that lie in each region.
pub fn birkhoff_time_averages(
    x0: &SimplexPoint<f64>,
    regions: &[Region],
    steps: u64,
) -> Result<Vec<f64>> {
    let n = x0.dim();
    for r in regions {
        r.check_dim(n)?;
    }
    let mut x = x0.coords().to_vec();
    let mut hits = vec![0u64; regions.len()];
    for k in 0..steps {
        for (h, r) in hits.iter_mut().zip(regions) {
            if r.contains(&x) {
                *h += 1;
            }
        }
        if k + 1 < steps {
            fast_step_in_place(&mut x).map_err(|_| Error::OrbitTerminated(k as usize + 1))?;
        }
    }
    Ok(hits.into_iter().map(|h| h as f64 / steps as f64).collect())
}

/// `(time_avg, space_avg)` for one region.
pub fn birkhoff_average(
    x0: &SimplexPoint<f64>,
    region: &Region,
    steps: u64,
) -> Result<BirkhoffEstimate> {
    let t = birkhoff_time_averages(x0, std::slice::from_ref(region), steps)?[0];
    let (s, e) = space_average(x0.dim(), region, 200_000, Parallelism::default())?;
    Ok(BirkhoffEstimate {
        region: region.clone(),
        time_average: t,
        space_average: s,
        space_error: e,
        abs_error: (t - s).abs(),
    })
}

/// `nu(region) / C_n` with its standard error. Deterministic quadrature for
/// `n <= 2` (error reported as 0); Monte Carlo with `mc_samples` otherwise.
pub fn space_average(
    n: usize,
    region: &Region,
    mc_samples: u64,
    par: Parallelism,
) -> Result<(f64, f64)> {
    region.check_dim(n)?;
    let c = closed_form_constant(n)?;
    match n {
        1 => Ok((space_measure_1d(region) / c, 0.0)),
        2 => Ok((space_measure_2d(region) / c, 0.0)),
        _ => {
            let (m, se) = space_measure_mc(n, region, mc_samples, par);
            Ok((m / c, se / c))
        }
    }
}

/// `int dx / (1 + x)` over the region, `n = 1`.
fn space_measure_1d(region: &Region) -> f64 {
    let (a, b) = match region {
        Region::Full => (0.0, 1.0),
        Region::Box { lo, hi } => (lo[0].max(0.0), hi[0].min(1.0)),
        // frac(1/x) has digit b on (1/(b+2), 1/(b+1)]
        Region::DigitCylinder { digit } => {
            let d = *digit as f64;
            (1.0 / (d + 2.0), 1.0 / (d + 1.0))
        }
    };
    if b <= a {
        return 0.0;
    }
    ((1.0 + b) / (1.0 + a)).ln()
}

/// `int dx_1 / x_1 int dx_2 / (1 + x_2)` over the region, `n = 2`. The inner
/// integral is `log((1 + hi) / (1 + lo))` on an `x_1`-dependent interval.
fn space_measure_2d(region: &Region) -> f64 {
    let (x1_lo, x1_hi, breaks, inner): (f64, f64, Vec<f64>, Box<dyn Fn(f64) -> (f64, f64)>) =
        match region {
            Region::Full => (0.0, 1.0, vec![], Box::new(|x1: f64| (0.0, x1))),
            Region::Box { lo, hi } => {
                let (l2, h2) = (lo[1].max(0.0), hi[1]);
                (
                    lo[0].max(0.0).max(l2),
                    hi[0].min(1.0),
                    vec![h2],
                    Box::new(move |x1: f64| (l2, h2.min(x1))),
                )
            }
            Region::DigitCylinder { digit } => {
                // (1 - x_1)/(b+1) < x_2 <= (1 - x_1)/b, and x_2 <= x_1
                let b = *digit as f64;
                let lo_x1 = 1.0 / (b + 2.0);
                let kink = if b > 0.0 { 1.0 / (b + 1.0) } else { 1.0 };
                (
                    lo_x1,
                    1.0,
                    vec![kink],
                    Box::new(move |x1: f64| {
                        let lo = (1.0 - x1) / (b + 1.0);
                        let hi = if b > 0.0 { (1.0 - x1) / b } else { f64::INFINITY };
                        (lo, hi.min(x1))
                    }),
                )
            }
        };
    if x1_hi <= x1_lo {
        return 0.0;
    }
    let f = |x1: f64| {
        let (lo, hi) = inner(x1);
        if hi <= lo || x1 <= 0.0 {
            0.0
        } else {
            ((1.0 + hi) / (1.0 + lo)).ln() / x1
        }
    };
    let mut pts = vec![x1_lo, x1_hi];
    pts.extend(breaks.into_iter().filter(|p| *p > x1_lo && *p < x1_hi));
    // at x_1 = 0 the integrand tends to 1; Gauss nodes never touch it
    integrate_pieces(&f, &pts, 1e-13)
}

/// Monte Carlo of `nu(region)` in the cube coordinates `x_k = u_1 ... u_k`,
/// where `d nu = du / (1 + u_1 ... u_n)`.
fn space_measure_mc(n: usize, region: &Region, samples: u64, par: Parallelism) -> (f64, f64) {
    let parts = par.run(samples as usize, |rng, _, _, count| {
        let mut x = vec![0.0; n];
        let (mut s, mut sq) = (0.0, 0.0);
        for _ in 0..count {
            let mut p = 1.0;
            for xi in x.iter_mut() {
                p *= rng.gen::<f64>();
                *xi = p;
            }
            if region.contains(&x) {
                let v = 1.0 / (1.0 + p);
                s += v;
                sq += v * v;
            }
        }
        (s, sq)
    });
    let (s, sq) = parts
        .into_iter()
        .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    mean_and_error(s, sq, samples)
}
