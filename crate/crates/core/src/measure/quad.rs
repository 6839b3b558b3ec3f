//! One-dimensional quadrature used for space averages and tail integrals.

use std::sync::OnceLock;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(order);
    let nf = order as f64;
    for i in 0..order {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn gl20() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| gauss_legendre(20))
}

/// 20-point Gauss-Legendre rule on `[a, b]`.
pub fn gauss20<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * gl20()
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
}

/// Adaptive bisection on the 20-point rule until two halves agree with the
/// whole panel to `tol` (absolute).
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let l = gauss20(f, a, m);
        let r = gauss20(f, m, b);
        if depth == 0 || (l + r - whole).abs() <= tol {
            return l + r;
        }
        rec(f, a, m, l, 0.5 * tol, depth - 1) + rec(f, m, b, r, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    rec(f, a, b, gauss20(f, a, b), tol, 40)
}

/// [`integrate`] over consecutive pieces between sorted breakpoints, for
/// integrands with known kinks.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: &F, points: &[f64], tol: f64) -> f64 {
    let mut pts: Vec<f64> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    pts.dedup();
    let pieces = pts.len().saturating_sub(1).max(1) as f64;
    pts.windows(2)
        .map(|w| integrate(f, w[0], w[1], tol / pieces))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for order in [5, 20, 64] {
            let s: f64 = gauss_legendre(order).iter().map(|p| p.1).sum();
            assert!((s - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn integrals() {
        let v = integrate(&|x: f64| 1.0 / (1.0 + x), 0.0, 1.0, 1e-14);
        assert!((v - std::f64::consts::LN_2).abs() < 1e-14);
        let v = integrate(&|x: f64| x.sqrt(), 0.0, 1.0, 1e-12);
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
        let v = integrate_pieces(&|x: f64| (x - 0.3).abs(), &[0.0, 0.3, 1.0], 1e-14);
        assert!((v - (0.045 + 0.245)).abs() < 1e-14);
    }
}
