//! Seeded, worker-partitioned random streams.
//!
//! Worker `w` draws from ChaCha8 seeded with `seed` on stream `w`, and work
//! is split into contiguous per-worker chunks whose results are merged in
//! worker order. Output is therefore a function of `(seed, workers)` only,
//! independent of thread scheduling and machine core count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::mcf::SimplexPoint;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_WORKERS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parallelism {
    pub seed: u64,
    pub workers: usize,
}

impl Default for Parallelism {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            workers: DEFAULT_WORKERS,
        }
    }
}

impl Parallelism {
    pub fn new(seed: u64, workers: usize) -> Self {
        Self {
            seed,
            workers: workers.max(1),
        }
    }

    pub fn rng(&self, worker: usize) -> ChaCha8Rng {
        worker_rng(self.seed, worker)
    }

    /// Splits `total` items over the workers and runs `f(rng, worker, start,
    /// count)` for each chunk in parallel; results come back in worker order.
    pub fn run<T, F>(&self, total: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut ChaCha8Rng, usize, usize, usize) -> T + Sync,
    {
        let w = self.workers.max(1);
        let base = total / w;
        let extra = total % w;
        (0..w)
            .into_par_iter()
            .map(|worker| {
                let count = base + usize::from(worker < extra);
                let start = worker * base + worker.min(extra);
                let mut rng = self.rng(worker);
                f(&mut rng, worker, start, count)
            })
            .collect()
    }
}

pub fn worker_rng(seed: u64, worker: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    rng
}

/// Uniform point in the interior of the ordered simplex: `n` uniforms
/// sorted in decreasing order.
pub fn uniform_simplex_coords<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        if v[n - 1] > 0.0 {
            return v;
        }
    }
}

pub fn uniform_simplex_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SimplexPoint<f64> {
    SimplexPoint::new(uniform_simplex_coords(n, rng)).expect("sorted uniforms lie in the simplex")
}

/// Mean and standard error of a sample given its sum and sum of squares.
pub fn mean_and_error(sum: f64, sum_sq: f64, count: u64) -> (f64, f64) {
    if count == 0 {
        return (f64::NAN, f64::NAN);
    }
    let c = count as f64;
    let mean = sum / c;
    let var = if count > 1 {
        ((sum_sq - c * mean * mean) / (c - 1.0)).max(0.0)
    } else {
        0.0
    };
    (mean, (var / c).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_fixed_seed_and_workers() {
        let p = Parallelism::new(7, 3);
        let a: Vec<f64> = p.run(10, |rng, _, _, c| (0..c).map(|_| rng.gen::<f64>()).sum());
        let b: Vec<f64> = p.run(10, |rng, _, _, c| (0..c).map(|_| rng.gen::<f64>()).sum());
        assert_eq!(a, b);
        let counts: Vec<usize> = p.run(10, |_, _, _, c| c);
        assert_eq!(counts, vec![4, 3, 3]);
        let starts: Vec<usize> = p.run(10, |_, _, s, _| s);
        assert_eq!(starts, vec![0, 4, 7]);
    }

    #[test]
    fn streams_differ() {
        let mut a = worker_rng(1, 0);
        let mut b = worker_rng(1, 1);
        assert_ne!(a.gen::<u64>(), b.gen::<u64>());
    }

    #[test]
    fn simplex_samples_are_ordered() {
        let mut rng = worker_rng(3, 0);
        for _ in 0..1000 {
            let v = uniform_simplex_coords(4, &mut rng);
            assert!(v.windows(2).all(|w| w[0] >= w[1]) && v[3] > 0.0 && v[0] < 1.0);
        }
    }
}
