//! Monte Carlo on the slice simplex of a cell.
//!
//! Points are drawn in local coordinates: a cell is `M` applied to the root
//! cone, and the fast map sends `M z` back to `z` after the cell's digits, so
//! the digits that follow a cell are the digits of `z`. Sampling `z`
//! directly avoids the precision loss of deep cells.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::Serialize;

use super::sampling::Parallelism;
use crate::cells::Cell;
use crate::error::Result;
use crate::mcf::{fast_step_in_place, SimplexPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub hits: u64,
    pub samples: u64,
}

impl RatioEstimate {
    /// One-sided lower confidence limit `estimate - z * std_error`.
    pub fn lower(&self, z: f64) -> f64 {
        self.estimate - z * self.std_error
    }
}

/// `||A_0|| / ||A_i||` as floats, safe for huge norms.
fn relative_inverse_norms(cell: &Cell) -> Vec<f64> {
    let norms = cell.norms();
    norms
        .iter()
        .map(|s| {
            BigRational::new(norms[0].clone(), s.clone())
                .to_f64()
                .unwrap_or(0.0)
        })
        .collect()
}

fn dirichlet<R: Rng + ?Sized>(rng: &mut R, k: usize, out: &mut [f64]) {
    let mut s = 0.0;
    for v in out.iter_mut().take(k) {
        *v = -(1.0 - rng.gen::<f64>()).ln();
        s += *v;
    }
    for v in out.iter_mut().take(k) {
        *v /= s;
    }
}

/// Uniform point of the cell's slice, in local coordinates: the point of
/// the simplex whose image after the cell's digits is the sample.
pub fn sample_local<R: Rng + ?Sized>(inv_norms: &[f64], rng: &mut R, beta: &mut [f64]) -> Vec<f64> {
    let size = inv_norms.len();
    dirichlet(rng, size, beta);
    // z_r = sum_{i >= r} w_i, since root vertex i has ones in rows 0..=i
    let mut z = vec![0.0; size];
    let mut acc = 0.0;
    for r in (0..size).rev() {
        acc += beta[r] * inv_norms[r];
        z[r] = acc;
    }
    z[1..].iter().map(|v| v / z[0]).collect()
}

/// Uniform point of the cell's slice in global simplex coordinates.
pub fn sample_in_cell<R: Rng + ?Sized>(cell: &Cell, rng: &mut R) -> SimplexPoint<f64> {
    let verts = cell.slice_vertices_f64();
    let size = verts.len();
    let mut beta = vec![0.0; size];
    dirichlet(rng, size, &mut beta);
    let mut p = vec![0.0; size];
    for (b, v) in beta.iter().zip(&verts) {
        for (pi, vi) in p.iter_mut().zip(v) {
            *pi += b * vi;
        }
    }
    let coords: Vec<f64> = p[1..].iter().map(|v| (v / p[0]).min(1.0)).collect();
    SimplexPoint::new(coords).expect("convex combination stays in the simplex")
}

/// Fraction of the cell's slice whose next `len` digits satisfy `pred`.
pub fn pattern_ratio_mc<P>(
    cell: &Cell,
    len: usize,
    pred: P,
    samples: u64,
    par: Parallelism,
) -> RatioEstimate
where
    P: Fn(&[u64]) -> bool + Sync,
{
    let inv = relative_inverse_norms(cell);
    let hits: u64 = par
        .run(samples as usize, |rng, _, _, count| {
            let mut beta = vec![0.0; inv.len()];
            let mut digits = Vec::with_capacity(len);
            let mut h = 0u64;
            for _ in 0..count {
                let mut x = sample_local(&inv, rng, &mut beta);
                digits.clear();
                for _ in 0..len {
                    match fast_step_in_place(&mut x) {
                        Ok(b) => digits.push(b),
                        Err(_) => break,
                    }
                }
                if digits.len() == len && pred(&digits) {
                    h += 1;
                }
            }
            h
        })
        .into_iter()
        .sum();
    let p = hits as f64 / samples.max(1) as f64;
    RatioEstimate {
        estimate: p,
        std_error: (p * (1.0 - p) / samples.max(1) as f64).sqrt(),
        hits,
        samples,
    }
}

/// Estimate of `lambda(R) / lambda(cell)`, where `R` is the part of the cell
/// whose next `n` digits are `(b, 0^(n-1))` with `b >= 1`.
pub fn zero_tail_ratio_mc(cell: &Cell, samples: u64, par: Parallelism) -> RatioEstimate {
    let n = cell.n();
    pattern_ratio_mc(
        cell,
        n,
        |d| d[0] >= 1 && d[1..].iter().all(|&b| b == 0),
        samples,
        par,
    )
}

/// Estimate of `lambda(cell + suffix) / lambda(cell)`.
pub fn suffix_ratio_mc(cell: &Cell, suffix: &[u64], samples: u64, par: Parallelism) -> RatioEstimate {
    pattern_ratio_mc(cell, suffix.len(), |d| d == suffix, samples, par)
}

/// Exact `lambda(R) / lambda(cell)` from volume weights, summing children
/// `b = 1..=truncation` (the remainder is below `1 / truncation^2` relative).
pub fn zero_tail_ratio_exact(cell: &Cell, truncation: u64) -> Result<f64> {
    let w = crate::cells::volume_weight(cell);
    let mut s = 0.0;
    for b in 1..=truncation {
        let mut c = cell.extend(b);
        for _ in 1..cell.n() {
            c.extend_in_place(0);
        }
        let r = crate::cells::volume_weight(&c) / &w;
        s += r.to_f64().unwrap_or(0.0);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::{contains, volume_weight};
    use crate::measure::sampling::worker_rng;
    use crate::mcf::fast_digits;

    #[test]
    fn global_samples_land_in_the_cell() {
        let cell = Cell::from_digits(2, &[1, 0, 3]).unwrap();
        let mut rng = worker_rng(9, 0);
        for _ in 0..200 {
            let x = sample_in_cell(&cell, &mut rng);
            assert!(contains(&cell, &x).unwrap());
        }
    }

    #[test]
    fn local_samples_replay_the_cell_digits() {
        // points built from local coordinates through the cell's inverse
        // branches have the cell's digits as their prefix
        let cell = Cell::from_digits(2, &[2, 0, 1]).unwrap();
        let mut rng = worker_rng(4, 0);
        for _ in 0..100 {
            let x = sample_in_cell(&cell, &mut rng);
            let d = fast_digits(&x, 3).digits;
            assert_eq!(d, vec![2, 0, 1]);
        }
    }

    #[test]
    fn child_ratio_matches_weights() {
        let cell = Cell::from_digits(2, &[0, 2]).unwrap();
        let est = suffix_ratio_mc(&cell, &[1], 200_000, Parallelism::default());
        let exact = (volume_weight(&cell.extend(1)) / volume_weight(&cell))
            .to_f64()
            .unwrap();
        assert!((est.estimate - exact).abs() < 4.0 * est.std_error, "{est:?} vs {exact}");
    }
}
