use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lpn_core::model::LambdaSpec;

#[derive(Debug, Parser)]
#[command(name = "lpn", version, about = "Exact series checks for the equivariant I-function of local P^n")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rows of the restricted I-function at every weight.
    Ifun(Common),
    /// μ, L and R_0..R_K at every weight, plus the A-table comparison.
    Asymp(Common),
    /// Checks that the Picard–Fuchs operator annihilates the I-function.
    VerifyPf(Common),
    /// Checks the asymptotic form against the I-function.
    VerifyAsymp(Common),
    /// Derives the L-variable system and checks it on the series.
    DeriveOde(Common),
    /// Recovers closed forms of R_k by exact fitting.
    Fit(FitArgs),
    /// Checks the sufficient admissibility conditions and runs the recursion.
    Admissible(Common),
    /// Coefficients of the local P^1 mirror map.
    MirrorMap(Common),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ifun(_) => "ifun",
            Command::Asymp(_) => "asymp",
            Command::VerifyPf(_) => "verify-pf",
            Command::VerifyAsymp(_) => "verify-asymp",
            Command::DeriveOde(_) => "derive-ode",
            Command::Fit(_) => "fit",
            Command::Admissible(_) => "admissible",
            Command::MirrorMap(_) => "mirror-map",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Fit(f) => &f.common,
            Command::Ifun(c)
            | Command::Asymp(c)
            | Command::VerifyPf(c)
            | Command::VerifyAsymp(c)
            | Command::DeriveOde(c)
            | Command::Admissible(c)
            | Command::MirrorMap(c) => c,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Debug, Args)]
pub struct Common {
    /// Dimension n; inferred from --lambda when omitted.
    #[arg(long)]
    pub n: Option<usize>,
    /// Weights: a list like `1,2/3,-4`, `zeta:m` or `spl2-canonical`.
    #[arg(long, value_parser = parse_lambda)]
    pub lambda: Option<LambdaSpec>,
    /// Truncation order N in q.
    #[arg(long, default_value_t = 10)]
    pub order: usize,
    /// Depth K in z.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Largest power of z kept in I-function rows; defaults to K.
    #[arg(long, allow_negative_numbers = true)]
    pub zmax: Option<i64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Cache directory for expensive series.
    #[arg(long, env = "LPN_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl Common {
    pub fn zmax(&self) -> i64 {
        self.zmax.unwrap_or(self.k as i64)
    }
}

#[derive(Clone, Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: Common,
    /// Smallest power of L in the ansatz.
    #[arg(long, allow_negative_numbers = true)]
    pub j_min: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub j_max: Option<i64>,
    /// Smallest power of f in the ansatz.
    #[arg(long, allow_negative_numbers = true)]
    pub e_min: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub e_max: Option<i64>,
}

fn parse_lambda(s: &str) -> Result<LambdaSpec, String> {
    s.parse().map_err(|e: lpn_core::Error| e.to_string())
}
