//! Jump transformation and zero-block statistics over random orbits.
//!
//! A zero block is a run of `n - 1` consecutive zero digits. Digit positions
//! are 0-based: the block ending at `b_m` occupies positions
//! `m - (n - 2) ..= m`, and the jump lands on `T^(m+1)(x)`, the first point
//! after the block is consumed.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use serde::Serialize;

use super::birkhoff::{space_average, BirkhoffEstimate, Region};
use super::sampling::{uniform_simplex_coords, Parallelism};
use crate::cells::measure_ratio_lower_bound;
use crate::error::{Error, Result};
use crate::mcf::{fast_step, fast_step_in_place, Flavor, SimplexPoint};
use crate::scalar::Scalar;

pub const DEFAULT_MAX_SCAN: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpOutcome<T> {
    /// `m`, the index of the last digit of the first zero block.
    pub length: usize,
    /// Digits `b_0 ..= b_m` consumed by the jump.
    pub digits: Vec<u64>,
    /// `T^(m+1)(x)`.
    pub landing: SimplexPoint<T>,
}

/// The jump transformation `g`. Needs `n >= 2`.
pub fn jump_step<T: Scalar>(x: &SimplexPoint<T>, max_scan: usize) -> Result<JumpOutcome<T>> {
    let n = x.dim();
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let mut cur = x.clone();
    let mut digits = Vec::new();
    let mut run = 0usize;
    for m in 0..max_scan {
        let (next, b) = fast_step(&cur).map_err(|_| Error::OrbitTerminated(m))?;
        digits.push(b);
        cur = next;
        run = if b == 0 { run + 1 } else { 0 };
        if run >= n - 1 {
            return Ok(JumpOutcome {
                length: m,
                digits,
                landing: cur,
            });
        }
    }
    Err(Error::NoJumpFound(max_scan))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurveyParams {
    pub n: usize,
    pub samples: usize,
    pub orbit_length: usize,
    /// Digits `<= bound` count as small.
    pub bound: u64,
    /// Length of the small-digit blocks searched for; usually `n - 1`.
    pub block_length: usize,
    pub parallelism: Parallelism,
}

impl SurveyParams {
    pub fn new(n: usize, samples: usize, orbit_length: usize, bound: u64) -> Self {
        Self {
            n,
            samples,
            orbit_length,
            bound,
            block_length: n.saturating_sub(1),
            parallelism: Parallelism::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErgodicReport {
    pub n: usize,
    pub flavor: Flavor,
    pub sample_count: usize,
    pub orbit_length: usize,
    pub seed: u64,
    pub workers: usize,
    pub bound: u64,
    pub block_length: usize,
    pub total_digits: u64,
    /// digit -> relative frequency over all sampled digits
    pub digit_histogram: BTreeMap<u64, f64>,
    /// Fraction of orbits containing a run of `n - 1` zeros.
    pub zero_block_hit_fraction: f64,
    /// Fraction of orbits containing a run of `block_length` digits `<= bound`.
    pub bounded_block_hit_fraction: f64,
    /// Fraction of sliding windows `(b_j, ..., b_(j+n-1))` with `b_j >= 1`
    /// and the remaining `n - 1` digits `<= bound`.
    pub window_rate: f64,
    /// `1 / ((n-1) n ... (2n-2) n^(n-1))`, absent for `n = 1`.
    pub ratio_bound: Option<f64>,
    pub terminated_orbits: usize,
    /// Fraction of orbits without a zero block within `orbit_length` digits.
    pub no_jump_fraction: f64,
    /// jump length `m` -> number of orbits
    pub jump_length_histogram: BTreeMap<u64, u64>,
    pub birkhoff_estimates: Vec<BirkhoffEstimate>,
}

#[derive(Default)]
struct Tally {
    counts: BTreeMap<u64, u64>,
    total: u64,
    zero_hits: usize,
    bounded_hits: usize,
    windows: u64,
    window_hits: u64,
    terminated: usize,
    no_jump: usize,
    jumps: BTreeMap<u64, u64>,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        for (k, v) in o.counts {
            *self.counts.entry(k).or_default() += v;
        }
        for (k, v) in o.jumps {
            *self.jumps.entry(k).or_default() += v;
        }
        self.total += o.total;
        self.zero_hits += o.zero_hits;
        self.bounded_hits += o.bounded_hits;
        self.windows += o.windows;
        self.window_hits += o.window_hits;
        self.terminated += o.terminated;
        self.no_jump += o.no_jump;
        self
    }

    fn record(&mut self, p: &SurveyParams, digits: &[u64], terminated: bool) {
        let n = p.n;
        let zero_len = n.saturating_sub(1);
        if terminated {
            self.terminated += 1;
        }
        self.total += digits.len() as u64;
        let (mut zrun, mut brun) = (0usize, 0usize);
        let (mut zhit, mut bhit) = (zero_len == 0, p.block_length == 0);
        let mut jump = None;
        for (m, &b) in digits.iter().enumerate() {
            *self.counts.entry(b).or_default() += 1;
            zrun = if b == 0 { zrun + 1 } else { 0 };
            brun = if b <= p.bound { brun + 1 } else { 0 };
            if zero_len > 0 && zrun >= zero_len && !zhit {
                zhit = true;
                jump = Some(m as u64);
            }
            if p.block_length > 0 && brun >= p.block_length {
                bhit = true;
            }
        }
        if digits.len() >= n {
            for w in digits.windows(n) {
                self.windows += 1;
                if w[0] >= 1 && w[1..].iter().all(|&b| b <= p.bound) {
                    self.window_hits += 1;
                }
            }
        }
        self.zero_hits += usize::from(zhit);
        self.bounded_hits += usize::from(bhit);
        match jump {
            Some(m) => *self.jumps.entry(m).or_default() += 1,
            None if zero_len > 0 => self.no_jump += 1,
            None => {}
        }
    }
}

/// Orbits of `samples` uniform random points, `orbit_length` digits each.
pub fn zero_block_survey(p: &SurveyParams) -> Result<ErgodicReport> {
    let n = p.n;
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let par = p.parallelism;
    let tally = par
        .run(p.samples, |rng, _, _, count| {
            let mut t = Tally::default();
            let mut digits = Vec::with_capacity(p.orbit_length);
            for _ in 0..count {
                let mut x = uniform_simplex_coords(n, rng);
                digits.clear();
                let mut terminated = false;
                for _ in 0..p.orbit_length {
                    match fast_step_in_place(&mut x) {
                        Ok(b) => digits.push(b),
                        Err(_) => {
                            terminated = true;
                            break;
                        }
                    }
                }
                t.record(p, &digits, terminated);
            }
            t
        })
        .into_iter()
        .fold(Tally::default(), Tally::merge);

    let total = tally.total.max(1) as f64;
    let samples = p.samples.max(1) as f64;
    let digit_histogram = tally
        .counts
        .iter()
        .map(|(&k, &v)| (k, v as f64 / total))
        .collect();
    let ratio_bound = if n >= 2 {
        ToPrimitive::to_f64(&measure_ratio_lower_bound(n)?)
    } else {
        None
    };

    let mut birkhoff_estimates = Vec::new();
    for digit in 0..4u64 {
        let region = Region::DigitCylinder { digit };
        let time = tally.counts.get(&digit).copied().unwrap_or(0) as f64 / total;
        let (space, err) = space_average(n, &region, 200_000, par)?;
        birkhoff_estimates.push(BirkhoffEstimate {
            region,
            time_average: time,
            space_average: space,
            space_error: err,
            abs_error: (time - space).abs(),
        });
    }

    Ok(ErgodicReport {
        n,
        flavor: Flavor::Fast,
        sample_count: p.samples,
        orbit_length: p.orbit_length,
        seed: par.seed,
        workers: par.workers,
        bound: p.bound,
        block_length: p.block_length,
        total_digits: tally.total,
        digit_histogram,
        zero_block_hit_fraction: tally.zero_hits as f64 / samples,
        bounded_block_hit_fraction: tally.bounded_hits as f64 / samples,
        window_rate: tally.window_hits as f64 / tally.windows.max(1) as f64,
        ratio_bound,
        terminated_orbits: tally.terminated,
        no_jump_fraction: tally.no_jump as f64 / samples,
        jump_length_histogram: tally.jumps,
        birkhoff_estimates,
    })
}

impl ErgodicReport {
    /// `digit,count,frequency` rows for plotting.
    pub fn histogram_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(["digit", "count", "frequency"]).map_err(io)?;
        for (d, f) in &self.digit_histogram {
            let count = (f * self.total_digits as f64).round() as u64;
            w.write_record([d.to_string(), count.to_string(), f.to_string()])
                .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }
}
