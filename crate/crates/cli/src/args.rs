use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "ktensor", version, about = "Killing tensors on flat and conformally flat tori")]
pub struct Cli {
    /// Worker threads for parallel runs (defaults to rayon's choice).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the band-limited kernel of the Killing operator.
    Kernel(KernelArgs),
    /// Compare kernels with the predicted solution space.
    Verify(VerifyArgs),
    /// Solve the scalar recursion and check it against a numerical ODE solve.
    OdeLemma(OdeArgs),
    /// Integrate the geodesic flow and measure drift of candidate integrals.
    Geodesic(GeodesicArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Torus dimension.
    #[arg(short = 'n', long = "dim")]
    pub n: usize,
    /// Tensor degree.
    #[arg(short = 'p', long = "degree")]
    pub p: usize,
    /// `flat`, `inv-cos:<c>,<a>` or `exp-cos:<A>`.
    #[arg(long, default_value = "inv-cos:2,1")]
    pub factor: String,
    /// Fourier band, one entry per axis or a single value for all.
    #[arg(long)]
    pub band: Option<String>,
    #[arg(long, default_value = "exact")]
    pub arith: String,
    /// Singular value cutoff relative to the largest one (float mode).
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record wall-clock timings in the report.
    #[arg(long)]
    pub timings: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Killing,
    ConformalKilling,
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "killing")]
    pub variant: Variant,
    /// Also write the assembled matrix as `row col value` lines.
    #[arg(long)]
    pub dump_matrix: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(short = 'n', long = "dim", requires = "p")]
    pub n: Option<usize>,
    #[arg(short = 'p', long = "degree", requires = "n")]
    pub p: Option<usize>,
    #[arg(long, default_value = "inv-cos:2,1")]
    pub factor: String,
    #[arg(long)]
    pub band: Option<String>,
    #[arg(long, default_value = "exact")]
    pub arith: String,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// JSON list of `{n, p, factor?, band?, arith?}` entries.
    #[arg(long, conflicts_with_all = ["n", "p"])]
    pub suite: Option<PathBuf>,
    /// Skip the rerun at a wider last-axis band.
    #[arg(long)]
    pub no_stability: bool,
    /// Include the kernel basis in each report.
    #[arg(long)]
    pub basis: bool,
    /// Parallel jobs for suites.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct OdeArgs {
    /// Torus dimension for the specialized system.
    #[arg(short = 'n', long = "dim", requires = "p")]
    pub n: Option<usize>,
    /// Degree for the specialized system.
    #[arg(short = 'p', long = "degree", requires = "n")]
    pub p: Option<usize>,
    /// Restrict the coefficient listing to one equation index.
    #[arg(long)]
    pub j: Option<usize>,
    /// Use random rational `b_j, c_j` of the given depth instead.
    #[arg(long, conflicts_with_all = ["n", "p", "j"])]
    pub raw: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Value of the constant `α_0` (random in raw mode if omitted, else 1).
    #[arg(long)]
    pub alpha0: Option<String>,
    /// Comma list of integration constants `C_j` (random in raw mode if
    /// omitted, else zero).
    #[arg(long)]
    pub constants: Option<String>,
    /// Amplitude `A` of the test function `f = A cos x`.
    #[arg(long, default_value_t = 0.5)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 1.0)]
    pub interval: f64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Write the numerical samples as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct GeodesicArgs {
    #[arg(short = 'n', long = "dim")]
    pub n: usize,
    /// Degree of the kernel or span elements.
    #[arg(short = 'p', long = "degree", default_value_t = 2)]
    pub p: usize,
    #[arg(long, default_value = "inv-cos:2,1")]
    pub factor: String,
    #[arg(long)]
    pub band: Option<String>,
    /// `from-kernel:<i>`, `span:<i>` or `control:<xn|xn2|flat-l>`;
    /// repeatable. Defaults to the whole kernel plus all controls.
    #[arg(long = "k")]
    pub integrals: Vec<String>,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 100.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 5)]
    pub states: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest relative drift accepted for genuine integrals.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Smallest relative drift expected of the controls.
    #[arg(long, default_value_t = 1e-2)]
    pub control_floor: f64,
    /// Write the trajectory of the first state as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub csv_stride: usize,
    #[command(flatten)]
    pub output: Output,
}
