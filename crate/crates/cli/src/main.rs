use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod cache;
mod commands;
mod config;

use config::ConfigError;

#[derive(Parser, Debug)]
#[command(name = "mdd", version, about = "Divisor sums over integers with a missing digit")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// Base of the digit expansion.
    #[arg(long, global = true)]
    pub g: Option<u64>,
    /// Excluded digit, 2 ≤ b ≤ g-1.
    #[arg(long, global = true)]
    pub b: Option<u64>,
    /// Sets X = g^m.
    #[arg(long, global = true, conflicts_with = "X")]
    pub m: Option<u32>,
    #[arg(long = "X", id = "X", global = true)]
    pub x: Option<u64>,
    #[arg(long = "H", id = "H", global = true, conflicts_with = "auto-H")]
    pub h: Option<u64>,
    /// Pick H = g^k so that |(0, H]*| tracks (X/(log X)³)^{1/(2λ)}.
    #[arg(long = "auto-H", id = "auto-H", global = true)]
    pub auto_h: bool,
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    /// Major-arc denominator cutoff; overrides the η-derived value (needs --Q).
    #[arg(long = "P", id = "P", global = true)]
    pub p: Option<u64>,
    /// Arc radius parameter; overrides the η-derived value (needs --P).
    #[arg(long = "Q", id = "Q", global = true)]
    pub q: Option<u64>,
    /// Output directory for the CSV and its manifest.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for sieve tables; MDD_CACHE takes priority.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Flat key=value file; a previous run's manifest works too.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Σ d₂(n) over (X, X+H]* against d₂(g(g-1))·|set|·(log X)³ and |set|·log X.
    DivisorSum,
    /// Major-arc main term, in either algebraic form, against the true sum.
    MainTerm {
        #[arg(long, value_enum)]
        form: Option<FormArg>,
        /// Maximum quadrature nodes.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Classify random α and check Dirichlet approximations.
    Arcs {
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Voronoi-side checks: boundary formula, reflection, major-arc error, truncated Δ.
    VoronoiCheck {
        #[arg(long, value_enum)]
        check: Option<CheckArg>,
        #[arg(long = "q-max")]
        q_max: Option<u64>,
        /// β (or x) points per modulus.
        #[arg(long)]
        points: Option<u64>,
        /// Truncation length of the Voronoi series.
        #[arg(long)]
        terms: Option<u64>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// ∫₁^X |Δ(a/q; x)|² dx at decades up to X.
    Moment {
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        a: Option<u64>,
    },
    /// Residue-class deviation of (0, X]* for each modulus.
    Discrepancy {
        #[arg(long = "q-max")]
        q_max: Option<u64>,
        /// Keep moduli sharing a factor with g(g-1).
        #[arg(long = "all-q")]
        all_q: bool,
        /// Sum q·deviation instead of deviation.
        #[arg(long)]
        weighted: bool,
    },
    /// ∫₀¹ |S_{(0,g^k]*}(α)| dα for a range of k.
    L1 {
        #[arg(long = "k-min")]
        k_min: Option<u32>,
        #[arg(long = "k-max")]
        k_max: Option<u32>,
        /// Multiplier on the minimum node count.
        #[arg(long)]
        oversample: Option<u64>,
    },
    /// Σ_n Σ_{q<P} c_q(n)/q and its absolute version over (X, X+H]*.
    DoubleSum,
    /// Σ d₂(n) over (X, 2X]* by sieve and by counting divisor pairs.
    Hyperbola,
    /// max |S₂(α; X, X+H)| over minor-arc grid points.
    MinorScan {
        #[arg(long)]
        nodes: Option<u64>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormArg {
    Beta,
    Sine,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckArg {
    Boundary,
    Reflection,
    MajorArc,
    Delta,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    if let Some(e) = err.downcast_ref::<mdd_core::Error>() {
        return match e {
            e if e.is_numeric_guard() => 3,
            mdd_core::Error::Io(_) => 1,
            _ => 2,
        };
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
