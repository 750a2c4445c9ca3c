use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use gaussian_hellinger::sweep::{Family, Measure, SweepRange};

#[derive(Debug, Parser)]
#[command(
    name = "ghk",
    version,
    about = "Hellinger-distance Gaussian discord of two-mode Gaussian states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correlation report for a single two-mode state, as JSON (or one CSV row).
    Report(ReportArgs),
    /// Evaluate a state family over a parameter range.
    Sweep(SweepArgs),
    /// Check closed forms against the brute-force oracles on seeded random states.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["sts", "mts", "std_form", "matrix"])))]
pub struct ReportArgs {
    /// Squeezed thermal state, e.g. `nbar1=1 nbar2=1 r=1` (or `kappa1`, `kappa2` instead of the occupancies).
    #[arg(long, num_args = 1.., value_delimiter = ',', value_name = "K=V")]
    pub sts: Option<Vec<String>>,

    /// Mode-mixed thermal state, e.g. `kappa1=3 kappa2=1 theta=1.57`.
    #[arg(long, num_args = 1.., value_delimiter = ',', value_name = "K=V")]
    pub mts: Option<Vec<String>>,

    #[arg(long, value_name = "B1,B2,C,D[,S1,S2]")]
    pub std_form: Option<String>,

    /// 4×4 covariance matrix: a file or inline text. Accepts 16 numbers (rows split by `;` or
    /// newlines), a JSON array of rows, or a JSON report produced by this command.
    #[arg(long, value_name = "PATH|INLINE")]
    pub matrix: Option<String>,

    /// First moments `(q1, p1, q2, p2)`; they shift the closest product state only.
    #[arg(long, value_name = "Q1,P1,Q2,P2", allow_hyphen_values = true)]
    pub mean: Option<String>,

    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    pub out: OutFormat,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// State family: sts, mts or symmetric.
    #[arg(long)]
    pub family: Family,

    #[arg(long, value_name = "NAME")]
    pub sweep_param: String,

    #[arg(long, value_name = "START:STOP:STEPS", allow_hyphen_values = true)]
    pub range: SweepRange,

    /// Fixed family parameters; repeat the flag or separate with commas.
    #[arg(long, num_args = 1.., value_delimiter = ',', value_name = "K=V")]
    pub fixed: Vec<String>,

    /// Output columns (default: all). One or more of hellinger, max_affinity, entropic, mutual,
    /// classical, eof, separable.
    #[arg(long, alias = "outputs", value_delimiter = ',', value_name = "MEASURE")]
    pub columns: Vec<Measure>,

    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub out: OutFormat,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,

    /// Multi-start count of the optimization oracle.
    #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..))]
    pub starts: u64,

    /// Emit the summary as JSON instead of a table.
    #[arg(long)]
    pub json: bool,

    /// Perturbs every closed-form maximal affinity by this amount (harness self-test).
    #[arg(long, hide = true, default_value_t = 0.0, allow_hyphen_values = true)]
    pub inject_breach: f64,
}
