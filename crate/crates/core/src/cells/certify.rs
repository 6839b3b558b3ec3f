use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, IntPoly};
use crate::scalar::{as_string, as_string_seq};
use crate::mcf::{branch_matrix, fast_digits, inverse_branch_matrix, SimplexPoint};

const POWER_TOL: f64 = 1e-14;
const POWER_MAX_ITER: usize = 100_000;
const REPLAY_PERIODS: usize = 5;
const REPLAY_MAX_POWER: usize = 400;

/// Evidence that the point with a purely periodic digit sequence is
/// algebraic.
///
/// `matrix` is the forward period matrix `F = T_(p_(k-1)) ... T_(p_0)`; the
/// homogeneous lift `(1, alpha)` of the periodic point satisfies
/// `F (1, alpha) = mu (1, alpha)`, and is the dominant eigenvector of the
/// nonnegative cell-refinement matrix `F^{-1}`.
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraicCertificate {
    pub n: usize,
    pub period: Vec<u64>,
    pub matrix: IntMatrix,
    pub inverse_matrix: IntMatrix,
    #[serde(with = "as_string")]
    pub charpoly: IntPoly,
    /// Factors `x - 1`, `x + 1` split off `charpoly`, then the cofactor.
    #[serde(with = "as_string_seq")]
    pub factors: Vec<IntPoly>,
    /// Degree of the factor that vanishes at `mu`; bounds `[Q(mu) : Q]`.
    pub field_degree: usize,
    /// The eigenvalue `mu` of `F` belonging to the periodic point.
    pub dominant_root: f64,
    /// Spectral radius `1 / mu` of `F^{-1}`.
    pub spectral_radius: f64,
    pub candidate_point: Vec<f64>,
    pub power_iterations: usize,
    /// `||M v - rho v||_inf / ||v||_inf`.
    pub eigen_residual: f64,
    /// Each `alpha_i` agrees with a ratio of adjugate polynomials of
    /// `F - x I` evaluated at `mu`, i.e. lies in `Q(mu)`.
    pub in_field: bool,
    pub replay_digits: Vec<u64>,
    pub replay_ok: bool,
}

pub fn certify_periodic(n: usize, period: &[u64]) -> Result<AlgebraicCertificate> {
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if period.is_empty() {
        return Err(Error::PreconditionViolated("empty period".into()));
    }
    let size = n + 1;
    let mut forward = IntMatrix::identity(size);
    let mut inverse = IntMatrix::identity(size);
    for &b in period {
        forward = &branch_matrix(n, b) * &forward;
        inverse = &inverse * &inverse_branch_matrix(n, b);
    }
    let charpoly = forward.charpoly();

    let (v, rho, iterations) = power_iteration(&inverse)?;
    let mu = 1.0 / rho;
    let residual = {
        let m = inverse.to_f64_rows();
        let vmax = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let r = m
            .iter()
            .zip(&v)
            .map(|(row, vi)| {
                let mv: f64 = row.iter().zip(&v).map(|(a, b)| a * b).sum();
                (mv - rho * vi).abs()
            })
            .fold(0.0f64, f64::max);
        r / vmax
    };
    if v[0] <= 0.0 {
        return Err(Error::NonContractingPeriod(
            "dominant eigenvector has zero leading entry".into(),
        ));
    }
    let alpha: Vec<f64> = v[1..].iter().map(|x| x / v[0]).collect();

    let factors = split_unit_factors(&charpoly);
    let field_degree = factors
        .iter()
        .filter(|f| f.degree() > 0)
        .min_by(|f, g| {
            f.eval_f64(mu)
                .abs()
                .partial_cmp(&g.eval_f64(mu).abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .map(IntPoly::degree)
        .unwrap_or(size);

    let in_field = adjugate_ratios(&forward, mu)
        .map(|ratios| {
            ratios
                .iter()
                .zip(&alpha)
                .all(|(r, a)| (r - a).abs() <= 1e-9 * (1.0 + a.abs()))
        })
        .unwrap_or(false);

    let replay_len = REPLAY_PERIODS * period.len();
    let (replay_digits, replay_ok) = match exact_replay_point(&inverse, &alpha) {
        Some(p) => {
            let d = fast_digits(&p, replay_len).digits;
            let ok = d.len() == replay_len
                && d.iter().enumerate().all(|(i, &b)| b == period[i % period.len()]);
            (d, ok)
        }
        None => (Vec::new(), false),
    };

    Ok(AlgebraicCertificate {
        n,
        period: period.to_vec(),
        matrix: forward,
        inverse_matrix: inverse,
        charpoly,
        factors,
        field_degree,
        dominant_root: mu,
        spectral_radius: rho,
        candidate_point: alpha,
        power_iterations: iterations,
        eigen_residual: residual,
        in_field,
        replay_digits,
        replay_ok,
    })
}

/// Exact rational stand-in for `alpha`: `M^K` applied to the barycenter of
/// the root cone, for the first `K >= REPLAY_PERIODS + 1` at which it agrees
/// with the float candidate to 1e-12. Float orbits lose roughly one digit
/// of accuracy per unit of expansion, so replay runs on this point instead.
fn exact_replay_point(m: &IntMatrix, alpha: &[f64]) -> Option<SimplexPoint<BigRational>> {
    let size = m.size();
    let mut w: Vec<BigInt> = (0..size).rev().map(|k| BigInt::from(k + 1)).collect();
    for k in 1..=REPLAY_MAX_POWER {
        w = m.apply(&w);
        if k <= REPLAY_PERIODS {
            continue;
        }
        let coords: Vec<BigRational> = w[1..]
            .iter()
            .map(|x| BigRational::new(x.clone(), w[0].clone()))
            .collect();
        let close = coords.iter().zip(alpha).all(|(c, a)| {
            c.to_f64().is_some_and(|c| (c - a).abs() <= 1e-12 * (1.0 + a.abs()))
        });
        if close {
            return SimplexPoint::new(coords).ok();
        }
    }
    None
}

/// Dominant eigenpair of a nonnegative matrix, `v` normalized to unit
/// l1 norm.
fn power_iteration(m: &IntMatrix) -> Result<(Vec<f64>, f64, usize)> {
    let a = m.to_f64_rows();
    let size = a.len();
    let mut v = vec![1.0 / size as f64; size];
    for it in 1..=POWER_MAX_ITER {
        let mut w: Vec<f64> = a
            .iter()
            .map(|row| row.iter().zip(&v).map(|(x, y)| x * y).sum())
            .collect();
        let s: f64 = w.iter().sum();
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::NonContractingPeriod("iterate vanished".into()));
        }
        w.iter_mut().for_each(|x| *x /= s);
        let change = w
            .iter()
            .zip(&v)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        v = w;
        if change <= POWER_TOL * v.iter().fold(0.0f64, |m, x| m.max(*x)) {
            // v has unit l1 norm, so ||M v||_1 is the eigenvalue
            let rho: f64 = a
                .iter()
                .map(|row| row.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>())
                .sum();
            return Ok((v, rho, it));
        }
    }
    Err(Error::NonContractingPeriod(format!(
        "power iteration did not converge in {POWER_MAX_ITER} steps"
    )))
}

/// Repeatedly divides out `x - 1` and `x + 1`. The characteristic
/// polynomial of a unimodular integer matrix is monic with constant term
/// `+-1`, so these are its only possible rational roots.
fn split_unit_factors(p: &IntPoly) -> Vec<IntPoly> {
    let mut rest = p.normalized_sign();
    let mut out = Vec::new();
    for r in [BigInt::one(), -BigInt::one()] {
        while let Some(q) = rest.divide_linear(&r) {
            out.push(IntPoly::new(vec![-r.clone(), BigInt::one()]));
            rest = q;
        }
    }
    out.push(rest);
    out
}

/// Ratios `adj(F - x I)[i][c] / adj(F - x I)[0][c]` at `x = mu`, with each
/// adjugate entry formed as an integer polynomial in `x`.
fn adjugate_ratios(f: &IntMatrix, mu: f64) -> Option<Vec<f64>> {
    let size = f.size();
    let entry = |i: usize, j: usize| -> IntPoly {
        let c = f[(i, j)].clone();
        if i == j {
            IntPoly::new(vec![c, -BigInt::one()])
        } else {
            IntPoly::new(vec![c])
        }
    };
    let poly: Vec<Vec<IntPoly>> = (0..size)
        .map(|i| (0..size).map(|j| entry(i, j)).collect())
        .collect();
    // the eigenvector is any nonzero column of the adjugate
    let mut best: Option<Vec<IntPoly>> = None;
    let mut best_mag = 0.0;
    for c in 0..size {
        // adj[i][c] = (-1)^(i+c) det(minor without row c, column i)
        let col: Vec<IntPoly> = (0..size)
            .map(|i| {
                let rows: Vec<usize> = (0..size).filter(|&r| r != c).collect();
                let cols: Vec<usize> = (0..size).filter(|&k| k != i).collect();
                let d = poly_det(&poly, &rows, &cols);
                if (i + c) % 2 == 1 {
                    d.neg()
                } else {
                    d
                }
            })
            .collect();
        let mag = col[0].eval_f64(mu).abs();
        if mag > best_mag {
            best_mag = mag;
            best = Some(col);
        }
    }
    let col = best?;
    let d0 = col[0].eval_f64(mu);
    Some(col[1..].iter().map(|p| p.eval_f64(mu) / d0).collect())
}

/// Determinant of the submatrix on `rows x cols` by expansion over column
/// subsets, `O(2^k k)` polynomial products.
fn poly_det(m: &[Vec<IntPoly>], rows: &[usize], cols: &[usize]) -> IntPoly {
    let k = rows.len();
    if k == 0 {
        return IntPoly::new(vec![BigInt::one()]);
    }
    // dp[mask] = signed sum over assignments of the first popcount(mask)
    // rows to the columns in mask
    let mut dp = vec![IntPoly::new(vec![BigInt::zero()]); 1 << k];
    dp[0] = IntPoly::new(vec![BigInt::one()]);
    for mask in 0usize..(1 << k) {
        if dp[mask].is_zero() {
            continue;
        }
        let r = mask.count_ones() as usize;
        if r == k {
            continue;
        }
        for j in 0..k {
            if mask & (1 << j) != 0 {
                continue;
            }
            let e = &m[rows[r]][cols[j]];
            if e.is_zero() {
                continue;
            }
            // sign: number of already-used columns to the right of j
            let inversions = (mask >> (j + 1)).count_ones();
            let term = dp[mask].mul(e);
            let term = if inversions % 2 == 1 { term.neg() } else { term };
            let next = mask | (1 << j);
            dp[next] = dp[next].add(&term);
        }
    }
    dp[(1 << k) - 1].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_period() {
        let c = certify_periodic(1, &[0]).unwrap();
        assert_eq!(c.charpoly.normalized_sign().to_string(), "x^2 + x - 1");
        assert!((c.dominant_root - 0.6180339887498949).abs() < 1e-12);
        assert!((c.candidate_point[0] - 0.6180339887498949).abs() < 1e-12);
        assert!(c.eigen_residual < 1e-10);
        assert!(c.in_field);
        assert!(c.replay_ok);
        assert_eq!(c.field_degree, 2);
    }

    #[test]
    fn cubic_period() {
        let c = certify_periodic(2, &[0]).unwrap();
        assert_eq!(c.charpoly.normalized_sign().to_string(), "x^3 + x - 1");
        assert!((c.candidate_point[0] - 0.6823278038280193).abs() < 1e-10);
        assert!((c.candidate_point[1] - 0.6823278038280193f64.powi(2)).abs() < 1e-10);
        assert!(c.inverse_matrix.is_nonnegative());
        assert_eq!(c.matrix.determinant().magnitude(), &num_bigint::BigUint::one());
        assert!(c.in_field && c.replay_ok);
    }

    #[test]
    fn longer_periods_replay() {
        for (n, p) in [(1, vec![2u64, 1]), (2, vec![1, 0]), (3, vec![0, 0, 2]), (2, vec![3, 0, 0, 1])] {
            let c = certify_periodic(n, &p).unwrap();
            assert!(c.replay_ok, "n={n} p={p:?} got {:?}", c.replay_digits);
            assert!(c.eigen_residual < 1e-10);
            assert!(c.in_field);
            assert!(c.field_degree <= n + 1);
        }
    }

    #[test]
    fn determinant_by_subsets_matches_integer_determinant() {
        let f = IntMatrix::from_i64_rows(&[vec![2, -1, 0], vec![3, 4, 1], vec![0, 5, -2]]);
        let poly: Vec<Vec<IntPoly>> = (0..3)
            .map(|i| (0..3).map(|j| IntPoly::new(vec![f[(i, j)].clone()])).collect())
            .collect();
        let d = poly_det(&poly, &[0, 1, 2], &[0, 1, 2]);
        assert_eq!(d.coeffs()[0], f.determinant());
        // det(F - xI) agrees with the characteristic polynomial up to sign
        let cp: Vec<Vec<IntPoly>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| {
                        if i == j {
                            IntPoly::new(vec![f[(i, j)].clone(), -BigInt::one()])
                        } else {
                            IntPoly::new(vec![f[(i, j)].clone()])
                        }
                    })
                    .collect()
            })
            .collect();
        let d = poly_det(&cp, &[0, 1, 2], &[0, 1, 2]);
        assert_eq!(d.normalized_sign(), f.charpoly().normalized_sign());
    }

    #[test]
    fn rejects_empty_period() {
        assert!(certify_periodic(2, &[]).is_err());
    }
}
