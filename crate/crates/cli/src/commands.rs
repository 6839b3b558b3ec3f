use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};
use serde::Serialize;

use triangle_map::cells::{
    cell_diameter, certify_periodic, slice_volume, volume_weight, zero_tail_weight_bound, Cell,
    ZeroTailBound,
};
use triangle_map::combinatorics::{
    partial_fraction_sides, row_prefix_sum, signed_binomial, tree_prefix_sum,
};
use triangle_map::mcf::{
    fast_to_slow, orbit, slow_to_fast, BitSequence, DigitSequence, Flavor, Orbit, SimplexPoint,
};
use triangle_map::measure::{
    birkhoff_average, density_raw, normalizing_constant, slow_truncated_mass,
    transfer_apply_fast, uniform_simplex_point, zero_block_survey, zero_tail_ratio_exact,
    zero_tail_ratio_mc, BirkhoffEstimate, ConstantMethod, Parallelism, Region, SurveyParams,
};
use triangle_map::scalar::parse_rational;
use triangle_map::Scalar;

use crate::output::{CliError, CliResult, Payload};
use crate::{
    CellArgs, CertifyArgs, Cli, Command, ConvertArgs, FlavorArg, IdentityArgs, MeasureArgs,
    OrbitArgs, SurveyArgs, Target, Which,
};

pub fn run(cli: &Cli) -> CliResult<()> {
    let g = &cli.global;
    if g.n == 0 {
        return Err(CliError::input("n must be at least 1"));
    }
    if g.workers == 0 {
        return Err(CliError::input("--workers must be at least 1"));
    }
    let par = Parallelism::new(g.seed, g.workers);
    let payload = match &cli.command {
        Command::Orbit(a) => cmd_orbit(g.n, par, a)?,
        Command::Cell(a) => cmd_cell(g.n, a)?,
        Command::Identity(a) => cmd_identity(g.n, par, a)?,
        Command::Measure(a) => cmd_measure(g.n, par, a)?,
        Command::Certify(a) => cmd_certify(g.n, a)?,
        Command::Survey(a) => cmd_survey(g.n, par, a)?,
        Command::Convert(a) => cmd_convert(a)?,
    };
    payload.emit(g.format, g.output.as_deref())
}

enum ParsedPoint {
    Exact(SimplexPoint<BigRational>),
    Float(SimplexPoint<f64>),
}

/// Comma-separated coordinates. Any `/` selects exact mode unless
/// `force_float`; `force_exact` reads decimals exactly.
fn parse_point(s: &str, n: usize, force_exact: bool, force_float: bool) -> CliResult<ParsedPoint> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(CliError::input(format!(
            "point has {} coordinates, expected n = {n}",
            parts.len()
        )));
    }
    let exact = force_exact || (!force_float && parts.iter().any(|p| p.contains('/')));
    let rationals: Vec<BigRational> = parts
        .iter()
        .map(|p| parse_rational(p).ok_or_else(|| CliError::input(format!("bad coordinate {p:?}"))))
        .collect::<CliResult<_>>()?;
    if exact {
        Ok(ParsedPoint::Exact(SimplexPoint::new(rationals)?))
    } else {
        let floats = rationals
            .iter()
            .map(|r| ToPrimitive::to_f64(r).unwrap_or(f64::NAN))
            .collect();
        Ok(ParsedPoint::Float(SimplexPoint::new(floats)?))
    }
}

fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Serialize)]
struct OrbitReport {
    n: usize,
    flavor: Flavor,
    exact: bool,
    steps: usize,
    symbols: Vec<u64>,
    terminated: bool,
    points: Vec<Vec<String>>,
}

fn orbit_report<T: Scalar>(o: &Orbit<T>, n: usize, steps: usize, fmt: impl Fn(&T) -> String) -> OrbitReport {
    OrbitReport {
        n,
        flavor: o.flavor,
        exact: matches!(T::KIND, triangle_map::NumberKind::Exact),
        steps,
        symbols: o.symbols.clone(),
        terminated: o.terminated,
        points: o
            .points
            .iter()
            .map(|p| p.coords().iter().map(&fmt).collect())
            .collect(),
    }
}

fn cmd_orbit(n: usize, par: Parallelism, a: &OrbitArgs) -> CliResult<Payload> {
    let start = match (&a.point, a.random) {
        (Some(p), _) => parse_point(p, n, a.exact, a.float)?,
        (None, true) => {
            let x = uniform_simplex_point(n, &mut par.rng(0));
            if a.exact {
                let coords = x
                    .coords()
                    .iter()
                    .map(|&v| BigRational::from_f64(v).expect("finite"))
                    .collect();
                ParsedPoint::Exact(SimplexPoint::new(coords)?)
            } else {
                ParsedPoint::Float(x)
            }
        }
        (None, false) => return Err(CliError::input("give --point or --random")),
    };
    let flavor = match a.flavor {
        FlavorArg::Fast => Flavor::Fast,
        FlavorArg::Slow => Flavor::Slow,
    };
    let report = match &start {
        ParsedPoint::Exact(x) => orbit_report(&orbit(x, a.steps, flavor), n, a.steps, rational_string),
        ParsedPoint::Float(x) => orbit_report(&orbit(x, a.steps, flavor), n, a.steps, |v| format!("{v:?}")),
    };
    let mut rows = vec![{
        let mut h = vec!["step".to_string(), "symbol".to_string()];
        h.extend((1..=n).map(|i| format!("x{i}")));
        h
    }];
    for (k, p) in report.points.iter().enumerate() {
        let sym = report.symbols.get(k).map(u64::to_string).unwrap_or_default();
        let mut r = vec![k.to_string(), sym];
        r.extend(p.iter().cloned());
        rows.push(r);
    }
    let syms: Vec<String> = report.symbols.iter().map(u64::to_string).collect();
    let plain = format!(
        "{}{}",
        syms.join(" "),
        if report.terminated { "\nterminated" } else { "" }
    );
    Ok(Payload::new("orbit", &report)?.with_csv(rows).with_plain(plain))
}

#[derive(Serialize)]
struct CellReport {
    n: usize,
    digits: Vec<u64>,
    /// Row-major; column `i` is the vertex `A_i`.
    vertices: Vec<Vec<String>>,
    norms: Vec<String>,
    determinant: String,
    unimodular: bool,
    diameter: f64,
    volume_weight: String,
    slice_volume: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    zero_tail: Option<ZeroTailBound>,
}

fn cmd_cell(n: usize, a: &CellArgs) -> CliResult<Payload> {
    let cell = Cell::from_digits(n, &a.digits)?;
    let zero_tail = match a.zero_tail {
        Some(k) => Some(zero_tail_weight_bound(&cell, k)?),
        None => None,
    };
    let det = cell.determinant();
    let report = CellReport {
        n,
        digits: a.digits.clone(),
        vertices: cell.to_record().vertices,
        norms: cell.norms().iter().map(BigInt::to_string).collect(),
        unimodular: cell.is_unimodular(),
        determinant: det.to_string(),
        diameter: cell_diameter(&cell),
        volume_weight: rational_string(&volume_weight(&cell)),
        slice_volume: slice_volume(&cell),
        zero_tail,
    };
    let plain = format!(
        "vertices (columns A_0..A_n):\n{}\nnorms: {}\ndet: {}\nweight: {}\ndiameter: {}",
        report
            .vertices
            .iter()
            .map(|r| r.join(" "))
            .collect::<Vec<_>>()
            .join("\n"),
        report.norms.join(" "),
        report.determinant,
        report.volume_weight,
        report.diameter
    );
    Ok(Payload::new("cell", &report)?.with_plain(plain))
}

#[derive(Serialize)]
struct IdentityRecord {
    which: &'static str,
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y: Option<String>,
    lhs: String,
    rhs: String,
    equal: bool,
}

#[derive(Serialize)]
struct SweepReport {
    which: &'static str,
    cases: usize,
    all_equal: bool,
    failures: Vec<IdentityRecord>,
}

fn pf_record(n: u32, x: &BigRational, y: &BigRational) -> CliResult<IdentityRecord> {
    let (lhs, rhs) = partial_fraction_sides(n, x, y)?;
    Ok(IdentityRecord {
        which: "pf",
        n,
        k: None,
        x: Some(rational_string(x)),
        y: Some(rational_string(y)),
        equal: lhs == rhs,
        lhs: rational_string(&lhs),
        rhs: rational_string(&rhs),
    })
}

fn tree_record(n: u32, k: u32) -> CliResult<IdentityRecord> {
    let lhs = tree_prefix_sum(n, k)?;
    let rhs = signed_binomial(n, k);
    let prefix = row_prefix_sum(n, k)?;
    Ok(IdentityRecord {
        which: "tree",
        n,
        k: Some(k),
        x: None,
        y: None,
        equal: lhs == rhs && prefix == rhs,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    })
}

fn cmd_identity(n: usize, par: Parallelism, a: &IdentityArgs) -> CliResult<Payload> {
    let n = u32::try_from(n).map_err(|_| CliError::input("n too large"))?;
    if a.sweep {
        let mut records = Vec::new();
        match a.which {
            Which::Pf => {
                use rand_like::draw;
                let mut rng = par.rng(0);
                for m in 2..=12u32 {
                    let mut done = 0;
                    while done < 200 {
                        let x = draw(&mut rng);
                        let y = draw(&mut rng);
                        match pf_record(m, &x, &y) {
                            Ok(r) => {
                                records.push(r);
                                done += 1;
                            }
                            Err(e) if e.kind == "pole_hit" => continue,
                            Err(e) => return Err(e),
                        }
                    }
                }
            }
            Which::Tree => {
                for m in 0..=16u32 {
                    for k in 0..=m {
                        records.push(tree_record(m, k)?);
                    }
                }
            }
        }
        let cases = records.len();
        let failures: Vec<IdentityRecord> = records.into_iter().filter(|r| !r.equal).collect();
        let report = SweepReport {
            which: if a.which == Which::Pf { "pf" } else { "tree" },
            cases,
            all_equal: failures.is_empty(),
            failures,
        };
        if !report.all_equal {
            let p = Payload::new("identity", &report)?;
            println!("{}", p.json);
            return Err(CliError {
                kind: "identity_failed".into(),
                message: format!("{} of {cases} cases failed", report.failures.len()),
                exit: 1,
            });
        }
        let plain = format!("{} cases, all equal", report.cases);
        return Ok(Payload::new("identity", &report)?.with_plain(plain));
    }
    let record = match a.which {
        Which::Pf => {
            let parse = |s: &Option<String>, name: &str| -> CliResult<BigRational> {
                let s = s
                    .as_deref()
                    .ok_or_else(|| CliError::input(format!("--{name} is required for pf")))?;
                parse_rational(s).ok_or_else(|| CliError::input(format!("bad --{name} {s:?}")))
            };
            pf_record(n, &parse(&a.x, "x")?, &parse(&a.y, "y")?)?
        }
        Which::Tree => {
            let k = a.k.ok_or_else(|| CliError::input("-k is required for tree"))?;
            tree_record(n, k)?
        }
    };
    let plain = format!(
        "{} {} {}",
        record.lhs,
        if record.equal { "=" } else { "!=" },
        record.rhs
    );
    Ok(Payload::new("identity", &record)?.with_plain(plain))
}

/// Small random rationals for the pf sweep.
mod rand_like {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use rand::Rng;

    pub fn draw<R: Rng>(rng: &mut R) -> BigRational {
        BigRational::new(
            BigInt::from(rng.gen_range(-60i64..=60)),
            BigInt::from(rng.gen_range(1i64..=60)),
        )
    }
}

#[derive(Serialize)]
struct FixedPointReport {
    n: usize,
    points: usize,
    tol: f64,
    max_residual: f64,
    mean_residual: f64,
    max_terms: u64,
    worst_point: Vec<f64>,
}

#[derive(Serialize)]
struct SlowMassReport {
    n: usize,
    samples: u64,
    estimates: Vec<triangle_map::measure::SlowMassEstimate>,
}

#[derive(Serialize)]
struct ZeroTailReport {
    n: usize,
    digits: Vec<u64>,
    samples: u64,
    mc_estimate: f64,
    mc_std_error: f64,
    lower_99: f64,
    exact_series: f64,
    ratio_bound: f64,
    exceeds_bound: bool,
}

#[derive(Serialize)]
struct BirkhoffReport {
    n: usize,
    steps: u64,
    start: Vec<f64>,
    #[serde(flatten)]
    estimate: BirkhoffEstimate,
}

fn parse_region(s: &str, n: usize) -> CliResult<Region> {
    let s = s.trim();
    if s == "full" {
        return Ok(Region::Full);
    }
    if let Some(d) = s.strip_prefix("digit:") {
        let digit = d
            .parse()
            .map_err(|_| CliError::input(format!("bad digit in region {s:?}")))?;
        return Ok(Region::DigitCylinder { digit });
    }
    if let Some(rest) = s.strip_prefix("box:") {
        let (lo, hi) = rest
            .split_once(':')
            .ok_or_else(|| CliError::input("box region needs lo:hi"))?;
        let list = |t: &str| -> CliResult<Vec<f64>> {
            t.split(',')
                .map(|v| {
                    v.trim()
                        .parse()
                        .map_err(|_| CliError::input(format!("bad box bound {v:?}")))
                })
                .collect()
        };
        let (lo, hi) = (list(lo)?, list(hi)?);
        if lo.len() != n || hi.len() != n {
            return Err(CliError::input(format!("box bounds need n = {n} entries")));
        }
        return Ok(Region::Box { lo, hi });
    }
    Err(CliError::input(format!("unknown region {s:?}")))
}

fn cmd_measure(n: usize, par: Parallelism, a: &MeasureArgs) -> CliResult<Payload> {
    if let Some(m) = a.constant {
        let method: ConstantMethod = a.method.parse()?;
        let budget = match method {
            ConstantMethod::Series => 1 << 40,
            ConstantMethod::Quadrature => a.samples,
        };
        let est = normalizing_constant(m, method, budget, par)?;
        let plain = format!("{:.15}", est.value);
        return Ok(Payload::new("measure", &est)?.with_plain(plain));
    }
    if let Some(m) = a.fixed_point {
        if m == 0 {
            return Err(CliError::input("dimension must be at least 1"));
        }
        let mut rng = par.rng(0);
        let f = |c: &[f64]| density_raw(Flavor::Fast, c);
        let (mut worst, mut sum, mut max_terms) = (0.0f64, 0.0, 0u64);
        let mut worst_point = Vec::new();
        for _ in 0..a.points {
            let x = uniform_simplex_point(m, &mut rng);
            let fx = f(x.coords());
            let l = transfer_apply_fast(&f, &x, a.tol)?;
            let r = (l.value - fx).abs() / fx;
            sum += r;
            max_terms = max_terms.max(l.terms);
            if r >= worst {
                worst = r;
                worst_point = x.coords().to_vec();
            }
        }
        let report = FixedPointReport {
            n: m,
            points: a.points,
            tol: a.tol,
            max_residual: worst,
            mean_residual: sum / a.points.max(1) as f64,
            max_terms,
            worst_point,
        };
        let plain = format!("max residual {:.3e}", report.max_residual);
        return Ok(Payload::new("measure", &report)?.with_plain(plain));
    }
    if a.birkhoff {
        let region = parse_region(&a.region, n)?;
        let x0 = match &a.start {
            Some(s) => match parse_point(s, n, false, true)? {
                ParsedPoint::Float(p) => p,
                ParsedPoint::Exact(_) => unreachable!("float forced"),
            },
            None => uniform_simplex_point(n, &mut par.rng(0)),
        };
        let est = birkhoff_average(&x0, &region, a.steps)?;
        let report = BirkhoffReport {
            n,
            steps: a.steps,
            start: x0.coords().to_vec(),
            estimate: est,
        };
        let plain = format!(
            "time {:.6} space {:.6}",
            report.estimate.time_average, report.estimate.space_average
        );
        return Ok(Payload::new("measure", &report)?.with_plain(plain));
    }
    if a.slow_mass {
        let estimates = a
            .eps
            .iter()
            .map(|&e| slow_truncated_mass(n, e, a.samples, par))
            .collect::<Result<Vec<_>, _>>()?;
        let mut rows = vec![vec![
            "eps".to_string(),
            "branch_one".into(),
            "branch_one_error".into(),
            "branch_zero".into(),
            "branch_zero_error".into(),
        ]];
        for e in &estimates {
            rows.push(vec![
                e.eps.to_string(),
                e.branch_one.to_string(),
                e.branch_one_error.to_string(),
                e.branch_zero.to_string(),
                e.branch_zero_error.to_string(),
            ]);
        }
        let report = SlowMassReport {
            n,
            samples: a.samples,
            estimates,
        };
        return Ok(Payload::new("measure", &report)?.with_csv(rows));
    }
    if let Some(digits) = &a.zero_tail {
        if n < 2 {
            return Err(CliError::input("--zero-tail needs n >= 2"));
        }
        let cell = Cell::from_digits(n, digits)?;
        let mc = zero_tail_ratio_mc(&cell, a.samples, par);
        let bound =
            ToPrimitive::to_f64(&triangle_map::cells::measure_ratio_lower_bound(n)?).unwrap_or(0.0);
        let lower = mc.lower(2.326_347_874_040_841);
        let report = ZeroTailReport {
            n,
            digits: digits.clone(),
            samples: a.samples,
            mc_estimate: mc.estimate,
            mc_std_error: mc.std_error,
            lower_99: lower,
            exact_series: zero_tail_ratio_exact(&cell, 20_000)?,
            ratio_bound: bound,
            exceeds_bound: lower > bound,
        };
        return Ok(Payload::new("measure", &report)?);
    }
    Err(CliError::usage("choose one experiment"))
}

fn cmd_certify(n: usize, a: &CertifyArgs) -> CliResult<Payload> {
    let c = certify_periodic(n, &a.period)?;
    let plain = format!(
        "charpoly {}\nmu {:.12}\nalpha {:?}\nreplay {}",
        c.charpoly.normalized_sign(),
        c.dominant_root,
        c.candidate_point,
        if c.replay_ok { "ok" } else { "FAILED" }
    );
    Ok(Payload::new("certify", &c)?.with_plain(plain))
}

fn cmd_survey(n: usize, par: Parallelism, a: &SurveyArgs) -> CliResult<Payload> {
    let mut p = SurveyParams::new(n, a.samples, a.orbit_length, a.bound);
    if let Some(b) = a.block_length {
        p.block_length = b;
    }
    p.parallelism = par;
    let report = zero_block_survey(&p)?;
    let mut rows = vec![vec![
        "digit".to_string(),
        "count".to_string(),
        "frequency".to_string(),
    ]];
    let csv = report.histogram_csv()?;
    rows.extend(
        csv.lines()
            .skip(1)
            .map(|l| l.split(',').map(str::to_string).collect()),
    );
    let plain = format!(
        "zero-block hit fraction {:.6}\nbounded-block hit fraction {:.6}\nwindow rate {:.6}",
        report.zero_block_hit_fraction, report.bounded_block_hit_fraction, report.window_rate
    );
    Ok(Payload::new("survey", &report)?
        .with_csv(rows)
        .with_plain(plain))
}

#[derive(Serialize)]
struct ConvertReport {
    to: &'static str,
    digits: Vec<u64>,
    bits: Vec<u8>,
}

fn cmd_convert(a: &ConvertArgs) -> CliResult<Payload> {
    let report = match a.to {
        Target::Slow => {
            let d = DigitSequence::new(a.symbols.clone());
            ConvertReport {
                to: "slow",
                bits: fast_to_slow(&d).bits().to_vec(),
                digits: d.digits,
            }
        }
        Target::Fast => {
            let bits: Vec<u8> = a
                .symbols
                .iter()
                .map(|&s| u8::try_from(s).map_err(|_| CliError::input(format!("bit {s} is not 0 or 1"))))
                .collect::<CliResult<_>>()?;
            let seq = BitSequence::new(bits)?;
            ConvertReport {
                to: "fast",
                digits: slow_to_fast(&seq)?.digits,
                bits: seq.bits().to_vec(),
            }
        }
    };
    let out: Vec<String> = match a.to {
        Target::Slow => report.bits.iter().map(u8::to_string).collect(),
        Target::Fast => report.digits.iter().map(u64::to_string).collect(),
    };
    Ok(Payload::new("convert", &report)?.with_plain(out.join(" ")))
}
