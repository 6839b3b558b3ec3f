//! `trimap`: command-line laboratory for the n-dimensional triangle map.
//!
//! Every subcommand writes one payload to stdout (or `--output`) and exits
//! 0. Failures write `{"schema": 1, "error": {...}}` to stdout, a one-line
//! message to stderr, and exit 1 (bad input) or 2 (usage).

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use output::{CliError, Format};

const CONVENTIONS: &str = "\
Conventions:
  Points x = (x_1, ..., x_n) lie in the ordered simplex 1 >= x_1 >= ... >= x_n >= 0.
  Coordinates are comma separated; decimals (0.7) select float mode and
  rationals (7/10) select exact mode.
  Fast digits are indexed from 0: b_0 = floor((1 - x_1) / x_n) is the digit of x itself.
  Slow digits are bits; a fast digit b corresponds to the bits 1^b 0.
  A zero block is a run of n-1 consecutive zero fast digits.
  Big integers and exact rationals are written as decimal strings.";

#[derive(Parser, Debug)]
#[command(
    name = "trimap",
    version,
    about = "Triangle-map laboratory: orbits, exact cells, identities, invariant measures",
    after_help = CONVENTIONS
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Dimension n of the simplex (n >= 1).
    #[arg(short = 'n', long = "dim", global = true, default_value_t = 2)]
    pub n: usize,
    /// Master seed for every random stream.
    #[arg(long, global = true, env = "MCF_SEED", default_value_t = triangle_map::measure::DEFAULT_SEED)]
    pub seed: u64,
    /// Worker count. Output is identical for identical (seed, workers).
    #[arg(long, global = true, default_value_t = triangle_map::measure::DEFAULT_WORKERS)]
    pub workers: usize,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the payload to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Iterate the fast or slow map from a point.
    #[command(after_help = CONVENTIONS)]
    Orbit(OrbitArgs),
    /// Exact cylinder cell of a digit prefix: vertices, norms, diameter, volume weight.
    #[command(after_help = CELL_HELP)]
    Cell(CellArgs),
    /// Check the partial-fraction or the signed multinomial-tree identity exactly.
    #[command(after_help = IDENTITY_HELP)]
    Identity(IdentityArgs),
    /// Invariant-measure experiments: normalizing constants, transfer fixed
    /// points, Birkhoff averages, slow-measure masses, cell ratios.
    #[command(after_help = MEASURE_HELP)]
    Measure(MeasureArgs),
    /// Certify that the point with a purely periodic digit sequence is algebraic.
    #[command(after_help = CERTIFY_HELP)]
    Certify(CertifyArgs),
    /// Zero-block and digit statistics over random orbits.
    #[command(after_help = SURVEY_HELP)]
    Survey(SurveyArgs),
    /// Convert between fast digits and slow bits.
    #[command(after_help = CONVENTIONS)]
    Convert(ConvertArgs),
}

const CELL_HELP: &str = "\
The cell of digits (b_0, ..., b_m) is the cone spanned by integer columns
A_0, ..., A_n. The root cell has A_k = (1, 1^k, 0^(n-k)); appending b sets
A_i <- A_(i+1) (i < n-1), A_(n-1) <- b A_0 + A_n, A_n <- (b+1) A_0 + A_n.
volume_weight = 1 / (||A_0|| ... ||A_n||) (l1 norms); the slice simplex has
Lebesgue measure sqrt(n+1)/n! * volume_weight. Diameter is the l2 diameter
of the slice simplex with vertices A_i / ||A_i||.";

const IDENTITY_HELP: &str = "\
pf:   sum_{j=0}^{n-2} C(n-2,j)(-1)^j / ((j+1)x + y) = (n-2)! x^(n-2) / prod_{i=1}^{n-1} (ix + y)
tree: the signed multinomials of compositions of n+1 in standard order
      (larger parts first, 1-based index i), summed over i = 1 mod 2^(n-k),
      equal C(n,k)(-1)^k.
--sweep checks pf for n <= 12 on 200 random rationals per n, or tree for all 0 <= k <= n <= 16.";

const MEASURE_HELP: &str = "\
--constant N     C_N, the total mass of dx / (x_1 ... x_(N-1) (1 + x_N)):
                 log 2 for N = 1, (1 - 2^(1-N)) zeta(N) otherwise.
--fixed-point N  max |Lf - f| / f of the fast transfer operator at random points.
--birkhoff       fraction of T^k x_0, k < steps, inside --region, against nu(region) / C_n.
                 Regions: full | digit:B | box:lo_1,...,lo_n:hi_1,...,hi_n
--slow-mass      nu of the two slow branches restricted to x_n >= eps.
--zero-tail      share of a cell whose next n digits are (b >= 1, 0^(n-1)).";

const CERTIFY_HELP: &str = "\
F = T_(p_(k-1)) ... T_(p_0) is the forward period matrix. The periodic point
alpha has homogeneous lift (1, alpha), an eigenvector of F with eigenvalue mu;
charpoly is det(xI - F). Replay iterates an exact rational approximation of
alpha for 5 periods.";

const SURVEY_HELP: &str = "\
Samples uniform points of the simplex and records their first L fast digits.
zero_block_hit_fraction: orbits containing n-1 consecutive zeros.
bounded_block_hit_fraction: orbits containing block-length consecutive digits <= B.
window_rate: share of windows (b_j, ..., b_(j+n-1)) with b_j >= 1 and the other n-1 digits <= B.
--format csv emits the digit histogram as digit,count,frequency.";

#[derive(Args, Debug)]
pub struct OrbitArgs {
    /// Starting point, e.g. 7/10,2/10 or 0.7,0.2.
    #[arg(long, conflicts_with = "random", allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Start from a uniform random point drawn with --seed.
    #[arg(long)]
    pub random: bool,
    /// Number of steps.
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = FlavorArg::Fast)]
    pub flavor: FlavorArg,
    /// Force exact rational arithmetic (decimals are read exactly).
    #[arg(long, conflicts_with = "float")]
    pub exact: bool,
    /// Force float arithmetic even for rational input.
    #[arg(long)]
    pub float: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlavorArg {
    Fast,
    Slow,
}

#[derive(Args, Debug)]
pub struct CellArgs {
    /// Digits b_0, ..., b_m (comma or space separated).
    #[arg(value_delimiter = ',', num_args = 0..)]
    pub digits: Vec<u64>,
    /// Also compare the zero-tail share with its closed-form bound, summing
    /// this many children exactly.
    #[arg(long)]
    pub zero_tail: Option<u64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Pf,
    Tree,
}

#[derive(Args, Debug)]
pub struct IdentityArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    /// Tree level k (tree only).
    #[arg(short = 'k', long)]
    pub k: Option<u32>,
    /// x as an integer, rational or decimal (pf only).
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// y as an integer, rational or decimal (pf only).
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    /// Exhaustive check instead of a single case.
    #[arg(long)]
    pub sweep: bool,
}

#[derive(Args, Debug)]
#[command(group(
    ArgGroup::new("experiment")
        .required(true)
        .multiple(false)
        .args(["constant", "fixed_point", "birkhoff", "slow_mass", "zero_tail"])
))]
pub struct MeasureArgs {
    /// Normalizing constant C_N.
    #[arg(long, value_name = "N")]
    pub constant: Option<usize>,
    /// Transfer-operator fixed-point residuals in dimension N.
    #[arg(long, value_name = "N")]
    pub fixed_point: Option<usize>,
    /// Birkhoff time average against the space average (uses -n).
    #[arg(long)]
    pub birkhoff: bool,
    /// Slow-measure branch masses above each eps (uses -n).
    #[arg(long)]
    pub slow_mass: bool,
    /// Zero-tail share of the cell with these digits, Monte Carlo and exact (uses -n).
    #[arg(long, value_name = "DIGITS", value_delimiter = ',', num_args = 0..)]
    pub zero_tail: Option<Vec<u64>>,
    /// series | quadrature (alias mc), for --constant.
    #[arg(long, default_value = "series")]
    pub method: String,
    /// Sample count for Monte Carlo estimates.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Random points for --fixed-point.
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Series tolerance for --fixed-point.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Region for --birkhoff.
    #[arg(long, default_value = "digit:0")]
    pub region: String,
    /// Orbit length for --birkhoff.
    #[arg(long, default_value_t = 1_000_000)]
    pub steps: u64,
    /// Starting point for --birkhoff (random from --seed if absent).
    #[arg(long)]
    pub start: Option<String>,
    /// Floors for --slow-mass.
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.001,0.0001")]
    pub eps: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// One period of the digit sequence, e.g. 0 or 1,0,2.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub period: Vec<u64>,
}

#[derive(Args, Debug)]
pub struct SurveyArgs {
    /// Number of random starting points.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Digits recorded per orbit.
    #[arg(long, default_value_t = 1000)]
    pub orbit_length: usize,
    /// Digits <= B count as small.
    #[arg(long, default_value_t = 0)]
    pub bound: u64,
    /// Length of the small-digit block (default n - 1).
    #[arg(long)]
    pub block_length: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Fast,
    Slow,
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    /// Direction: `slow` turns fast digits into bits, `fast` turns bits into digits.
    #[arg(long, value_enum)]
    pub to: Target,
    /// Input symbols, comma separated.
    #[arg(value_delimiter = ',', num_args = 1.., required = true)]
    pub symbols: Vec<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return output::report_error(&CliError::usage(e.to_string()));
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => output::report_error(&e),
    }
}
