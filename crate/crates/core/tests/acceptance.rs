//! Acceptance suite. Runs every criterion, prints one line each, and exits
//! nonzero if any criterion fails. Built with `harness = false` so the lines
//! are always visible in `cargo test` output.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use triangle_map::cells::{
    cell_diameter, certify_periodic, measure_ratio_lower_bound, volume_weight, Cell,
};
use triangle_map::combinatorics::{
    compositions_standard_order, partial_fraction_sides, row_prefix_sum, row_sum,
    signed_binomial, signed_multinomial, tree_prefix_sum,
};
use triangle_map::mcf::{
    digit, fast_step, fast_to_slow, inverse_branch_fast, slow_step, slow_to_fast, BitSequence,
    DigitSequence, Flavor, SimplexPoint,
};
use triangle_map::measure::{
    birkhoff_time_averages, density, density_raw, quadrature_constant, series_constant,
    space_average, suffix_ratio_mc, transfer_apply_fast, transfer_apply_slow,
    uniform_simplex_point, worker_rng, zero_block_survey, zero_tail_ratio_mc, DensityKind,
    Parallelism, Region, SurveyParams, jump_step,
};

/// One-sided 99% normal quantile.
const Z99: f64 = 2.326_347_874_040_841;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rng(tag: u64) -> ChaCha8Rng {
    worker_rng(0xACCE_0000 + tag, 0)
}

fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Random interior rational point: `n` distinct numerators over a common
/// random denominator, sorted decreasing.
fn random_rational_point(n: usize, rng: &mut ChaCha8Rng) -> SimplexPoint<BigRational> {
    loop {
        let den: i64 = rng.gen_range(n as i64 + 2..5000);
        let mut nums: Vec<i64> = (0..n).map(|_| rng.gen_range(1..den)).collect();
        nums.sort_unstable_by(|a, b| b.cmp(a));
        nums.dedup();
        if nums.len() == n {
            let coords = nums.into_iter().map(|k| q(k, den)).collect();
            return SimplexPoint::new(coords).expect("sorted interior rationals");
        }
    }
}

fn random_digits(rng: &mut ChaCha8Rng, len: usize, max: u64) -> Vec<u64> {
    (0..len).map(|_| rng.gen_range(0..=max)).collect()
}

fn c1_constants() -> Outcome {
    let par = Parallelism::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 1..=4 {
        let t = Instant::now();
        let s = series_constant(n, 1e-13, 1 << 40).expect("series");
        let series_err = (s.value - s.closed_form).abs();
        let mc = quadrature_constant(n, 10_000_000, par).expect("quadrature");
        let z = (mc.value - mc.closed_form).abs() / mc.error;
        let secs = t.elapsed().as_secs_f64();
        let ok = series_err < 1e-9 && z <= 3.0 && secs < 30.0;
        pass &= ok;
        parts.push(format!(
            "n={n} C={:.12} series_err={series_err:.1e} mc_z={z:.2} {secs:.1}s",
            s.closed_form
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c2_transfer() -> Outcome {
    let t = Instant::now();
    let mut r = rng(2);
    let mut worst = 0.0f64;
    let mut failures = 0usize;
    for n in 2..=4 {
        let f = |c: &[f64]| density_raw(Flavor::Fast, c);
        for _ in 0..100 {
            let x = uniform_simplex_point(n, &mut r);
            let fx = f(x.coords());
            match transfer_apply_fast(&f, &x, 1e-10) {
                Ok(l) => worst = worst.max((l.value - fx).abs() / fx),
                Err(_) => failures += 1,
            }
        }
    }
    let mut slow_exact = true;
    for n in 1..=4 {
        let kind = DensityKind::slow(n);
        let f = |p: &SimplexPoint<BigRational>| density(kind, p);
        for _ in 0..100 {
            let x = random_rational_point(n, &mut r);
            let lf = transfer_apply_slow(&f, &x).expect("slow transfer");
            slow_exact &= lf == density(kind, &x).expect("density");
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        worst < 1e-8 && failures == 0 && slow_exact && secs < 10.0,
        format!(
            "fast worst |Lf-f|/f={worst:.2e} over 300 points (failures {failures}); \
             slow exact={slow_exact}; {secs:.1}s"
        ),
    )
}

fn c3_identities() -> Outcome {
    let t = Instant::now();
    let mut r = rng(3);
    let mut pf_ok = true;
    let mut checked = 0usize;
    for n in 2..=12u32 {
        let mut done = 0;
        while done < 200 {
            let x = q(r.gen_range(-60..=60), r.gen_range(1..=60));
            let y = q(r.gen_range(-60..=60), r.gen_range(1..=60));
            // resample on a pole
            if let Ok((lhs, rhs)) = partial_fraction_sides(n, &x, &y) {
                pf_ok &= lhs == rhs;
                done += 1;
            }
        }
        checked += done;
    }
    let mut tree_ok = true;
    for n in 0..=16u32 {
        for k in 0..=n {
            let target = signed_binomial(n, k);
            tree_ok &= tree_prefix_sum(n, k).expect("tree") == target;
            tree_ok &= row_prefix_sum(n, k).expect("prefix") == target;
        }
    }
    let mut worked = tree_prefix_sum(4, 3).expect("tree") == BigInt::from(-4);
    for n in 1..=16u32 {
        let sign = if n % 2 == 1 { BigInt::one() } else { -BigInt::one() };
        worked &= row_sum(n).expect("row") == sign;
    }
    let c57 = &compositions_standard_order(5).expect("compositions")[6];
    worked &= c57.parts == vec![2, 1, 2] && signed_multinomial(c57).value == BigInt::from(30);
    let secs = t.elapsed().as_secs_f64();
    outcome(
        pf_ok && tree_ok && worked && secs < 60.0,
        format!(
            "partial fractions {checked} cases exact={pf_ok}; tree sums k<=n<=16 exact={tree_ok}; \
             worked values={worked}; {secs:.1}s"
        ),
    )
}

/// Vertices after appending the window `c_0, ..., c_(n-1)` to a cell with
/// vertices `a`:
/// `A_0' = c_0 A_0 + A_n`,
/// `A_i' = c_i A_i + sum_{j<i} (c_j + 1) A_j + A_n` for `1 <= i <= n-1`,
/// `A_n' = sum_{j<n} (c_j + 1) A_j + A_n`.
fn window_closed_form(a: &[Vec<BigInt>], c: &[u64]) -> Vec<Vec<BigInt>> {
    let n = a.len() - 1;
    let size = a[0].len();
    let comb = |coef: &[(BigInt, usize)]| -> Vec<BigInt> {
        (0..size)
            .map(|r| {
                coef.iter()
                    .fold(a[n][r].clone(), |acc, (k, j)| acc + k * &a[*j][r])
            })
            .collect()
    };
    let big = |v: u64| BigInt::from(v);
    let mut out = Vec::with_capacity(n + 1);
    out.push(comb(&[(big(c[0]), 0)]));
    for i in 1..n {
        let mut coef: Vec<(BigInt, usize)> = (0..i).map(|j| (big(c[j] + 1), j)).collect();
        coef.push((big(c[i]), i));
        out.push(comb(&coef));
    }
    let coef: Vec<(BigInt, usize)> = (0..n).map(|j| (big(c[j] + 1), j)).collect();
    out.push(comb(&coef));
    out
}

fn c4_recursion() -> Outcome {
    let mut r = rng(4);
    let mut mismatches = 0usize;
    let mut non_unimodular = 0usize;
    let mut total = 0usize;
    for n in 1..=6usize {
        for _ in 0..1000 {
            let plen = r.gen_range(0..=8);
            let base = Cell::from_digits(n, &random_digits(&mut r, plen, 30)).expect("cell");
            let window = random_digits(&mut r, n, 30);
            let mut ext = base.clone();
            for &b in &window {
                ext.extend_in_place(b);
            }
            if ext.vertices() != window_closed_form(base.vertices(), &window).as_slice() {
                mismatches += 1;
            }
            if !ext.is_unimodular() {
                non_unimodular += 1;
            }
            total += 1;
        }
    }
    outcome(
        mismatches == 0 && non_unimodular == 0,
        format!("{total} windows, n<=6: mismatches {mismatches}, non-unimodular {non_unimodular}"),
    )
}

fn c5_contraction() -> Outcome {
    let mut r = rng(5);
    let mut parts = Vec::new();
    let mut pass = true;
    for (n, bound) in [(2usize, 0u64), (2, 3), (3, 0), (3, 2), (4, 1)] {
        let (num, den) = ((bound * n as u64 + bound + n as u64) as f64, (bound * n as u64 + bound + n as u64 + 1) as f64);
        let mut windows = 0usize;
        let mut violations = 0usize;
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let plen = r.gen_range(2..=5);
            let mut cell = Cell::from_digits(n, &random_digits(&mut r, plen, 20)).expect("cell");
            for _ in 0..5 {
                let before = cell_diameter(&cell);
                cell.extend_in_place(r.gen_range(0..=40));
                for _ in 1..n {
                    cell.extend_in_place(r.gen_range(0..=bound));
                }
                let after = cell_diameter(&cell);
                windows += 1;
                let ratio = after * den / (before * num);
                worst = worst.max(ratio);
                if after * den > before * num * (1.0 + 1e-9) {
                    violations += 1;
                }
            }
        }
        pass &= violations == 0;
        parts.push(format!(
            "(n={n},B={bound}) {windows} windows, violations {violations}, max ratio {worst:.4}"
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c6_ratio_bound() -> Outcome {
    let par = Parallelism::default();
    let mut r = rng(6);
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [2usize, 3] {
        let bound = measure_ratio_lower_bound(n).expect("bound");
        let bound_f = num_traits::ToPrimitive::to_f64(&bound).expect("finite");
        let mut min_lower = f64::INFINITY;
        let mut min_est = f64::INFINITY;
        let mut passed = 0;
        for _ in 0..10 {
            let len = r.gen_range(3..=6);
            let cell = Cell::from_digits(n, &random_digits(&mut r, len, 5)).expect("cell");
            let est = zero_tail_ratio_mc(&cell, 1_000_000, par);
            let lower = est.lower(Z99);
            min_lower = min_lower.min(lower);
            min_est = min_est.min(est.estimate);
            if lower > bound_f {
                passed += 1;
            }
        }
        pass &= passed == 10;
        parts.push(format!(
            "n={n} bound={bound} cells above bound {passed}/10, min estimate {min_est:.5}, \
             min 99% lower {min_lower:.5}"
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c7_zero_blocks() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut r = rng(7);
    for n in [2usize, 3] {
        let report = zero_block_survey(&SurveyParams::new(n, 10_000, 10_000, 0)).expect("survey");
        let mut no_jump = 0usize;
        let trials = 10_000;
        for _ in 0..trials {
            let x = uniform_simplex_point(n, &mut r);
            if jump_step(&x, 10_000).is_err() {
                no_jump += 1;
            }
        }
        let rate = no_jump as f64 / trials as f64;
        let ok = report.zero_block_hit_fraction >= 0.999 && rate < 1e-3;
        pass &= ok;
        parts.push(format!(
            "n={n} hit fraction {:.5} (terminated {}), jump failure rate {rate:.1e}",
            report.zero_block_hit_fraction, report.terminated_orbits
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c8_birkhoff() -> Outcome {
    use rayon::prelude::*;
    let boxes: Vec<Region> = [
        ([0.5, 0.0], [1.0, 0.5]),
        ([0.2, 0.1], [0.6, 0.3]),
        ([0.7, 0.6], [1.0, 1.0]),
        ([0.0, 0.0], [0.3, 0.3]),
        ([0.4, 0.2], [0.9, 0.8]),
    ]
    .into_iter()
    .map(|(lo, hi)| Region::Box {
        lo: lo.to_vec(),
        hi: hi.to_vec(),
    })
    .collect();
    let space: Vec<f64> = boxes
        .iter()
        .map(|b| space_average(2, b, 0, Parallelism::default()).expect("space").0)
        .collect();
    let steps = 10_000_000u64;
    let runs: Vec<Result<Vec<f64>, String>> = (0..10u64)
        .into_par_iter()
        .map(|seed| {
            let x0 = uniform_simplex_point(2, &mut worker_rng(seed, 0));
            birkhoff_time_averages(&x0, &boxes, steps).map_err(|e| e.to_string())
        })
        .collect();
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for run in &runs {
        match run {
            Ok(t) => {
                for (ti, si) in t.iter().zip(&space) {
                    worst = worst.max((ti - si).abs() / si);
                }
            }
            Err(e) => errors.push(e.clone()),
        }
    }
    let target = (4.0f64 / 3.0).ln() / 2f64.ln();
    let cyl = [Region::DigitCylinder { digit: 0 }];
    let gauss: Vec<Result<f64, String>> = (0..10u64)
        .into_par_iter()
        .map(|seed| {
            let x0 = uniform_simplex_point(1, &mut worker_rng(seed, 1));
            birkhoff_time_averages(&x0, &cyl, steps)
                .map(|v| v[0])
                .map_err(|e| e.to_string())
        })
        .collect();
    let mut gauss_worst = 0.0f64;
    for g in &gauss {
        match g {
            Ok(v) => gauss_worst = gauss_worst.max((v - target).abs() / target),
            Err(e) => errors.push(e.clone()),
        }
    }
    outcome(
        worst < 0.02 && gauss_worst < 0.005 && errors.is_empty(),
        format!(
            "n=2 five boxes x 10 seeds x 1e7 steps: worst relative error {worst:.2e}; \
             n=1 digit-0 frequency worst relative error {gauss_worst:.2e} (target {target:.5}); \
             orbit errors {}",
            errors.len()
        ),
    )
}

fn c9_certify() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, poly, root) in [(1usize, "x^2 + x - 1", 0.6180339887), (2, "x^3 + x - 1", 0.6823278038)] {
        let c = certify_periodic(n, &[0]).expect("certificate");
        let cp = c.charpoly.normalized_sign().to_string();
        let ok = cp == poly
            && (c.dominant_root - root).abs() < 1e-9
            && c.eigen_residual < 1e-10
            && c.replay_ok
            && c.replay_digits.len() == 5;
        pass &= ok;
        parts.push(format!(
            "n={n} charpoly {cp}, mu={:.10}, residual {:.1e}, replay {:?}",
            c.dominant_root, c.eigen_residual, c.replay_digits
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c10_slow_fast() -> Outcome {
    let mut r = rng(10);
    let mut round_trip = true;
    for _ in 0..1000 {
        let len = r.gen_range(1..=60);
        let mut bits: Vec<u8> = (0..len).map(|_| r.gen_range(0..=1)).collect();
        // complete the final block
        bits.push(0);
        let seq = BitSequence::new(bits).expect("bits");
        let fast = slow_to_fast(&seq).expect("complete blocks");
        round_trip &= fast_to_slow(&fast) == seq;
        let digits = DigitSequence::new(random_digits(&mut r, len, 25));
        round_trip &= slow_to_fast(&fast_to_slow(&digits)).expect("blocks") == digits;
    }
    let mut coherent = true;
    for b in 0..=20u64 {
        for n in 1..=4usize {
            for _ in 0..5 {
                let x = random_rational_point(n, &mut r);
                let y = inverse_branch_fast(&x, b);
                coherent &= digit(&y).expect("digit") == b;
                let (fy, fb) = fast_step(&y).expect("fast");
                let mut z = y.clone();
                let mut bits = Vec::new();
                for _ in 0..=b {
                    let (next, bit) = slow_step(&z).expect("slow");
                    bits.push(bit);
                    z = next;
                }
                let mut expect = vec![1u8; b as usize];
                expect.push(0);
                coherent &= fb == b && z == fy && fy == x && bits == expect;
            }
        }
    }
    outcome(
        round_trip && coherent,
        format!(
            "1000 random sequences round trip={round_trip}; slow^(b+1) = fast for b<=20, \
             n<=4 exact={coherent}"
        ),
    )
}

fn c11_weights() -> Outcome {
    let par = Parallelism::default();
    let mut r = rng(11);
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [2usize, 3] {
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let len = r.gen_range(2..=5);
            let parent = Cell::from_digits(n, &random_digits(&mut r, len, 5)).expect("cell");
            let b = r.gen_range(0..=3u64);
            let exact = volume_weight(&parent.extend(b)) / volume_weight(&parent);
            let exact = num_traits::ToPrimitive::to_f64(&exact).expect("finite");
            let mc = suffix_ratio_mc(&parent, &[b], 1_000_000, par);
            worst = worst.max((mc.estimate - exact).abs() / exact);
        }
        pass &= worst < 0.03;
        parts.push(format!("n={n} 20 cells, worst relative gap {worst:.2e}"));
    }
    outcome(pass, parts.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("normalizing constants", c1_constants),
        ("transfer fixed points", c2_transfer),
        ("combinatorial identities", c3_identities),
        ("vertex recursion closed form", c4_recursion),
        ("contraction inequality", c5_contraction),
        ("measure-ratio lower bound", c6_ratio_bound),
        ("zero-block prevalence", c7_zero_blocks),
        ("Birkhoff averages", c8_birkhoff),
        ("algebraic certification", c9_certify),
        ("slow/fast coherence", c10_slow_fast),
        ("volume-weight proportionality", c11_weights),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let o = run();
        ran += 1;
        if !o.pass {
            failed += 1;
        }
        println!(
            "acceptance {id:>2} {:<4} {name} [{:.1}s] {}",
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
