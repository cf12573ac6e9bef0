use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "rankone", version, about = "Exact experiments on rank-one cutting-and-stacking constructions")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Output file, or `-` for stdout.
    #[arg(long, global = true, default_value = "-")]
    pub output: String,
    /// Human-readable table or CSV (commands that emit rows always use CSV).
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Echo parsed sets and run settings on stderr.
    #[arg(long, short, global = true)]
    pub verbose: bool,
    /// Largest number of level spans a refinement may produce.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    pub cap: u128,
    /// Seed for sampled scans.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Evaluate independent work items on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exhaustive,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scope {
    /// Follow `X_j ∩ TᵐX_j` through every built stage.
    Full,
    /// Only intersections realized inside tower `j + 1`.
    NextTower,
}

#[derive(Debug, Args)]
pub struct ParamsArg {
    /// Parameter document (JSON). `P0` and `T1` name built-in schedules
    /// when no such file exists.
    #[arg(long)]
    pub params: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the per-stage class conditions of a schedule.
    Validate {
        #[command(flatten)]
        params: ParamsArg,
    },
    /// Print heights, widths, tower measures and offsets.
    Build {
        #[command(flatten)]
        params: ParamsArg,
        /// Use only the first N stages of the schedule.
        #[arg(long)]
        stages: Option<usize>,
    },
    /// Exact correlations μ(A ∩ TᵐB) as CSV.
    Corr {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long)]
        set_a: String,
        #[arg(long)]
        set_b: String,
        /// Shifts: comma-separated integers and inclusive ranges `a..b`.
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        /// Split rationals into numerator/denominator columns.
        #[arg(long)]
        split: bool,
    },
    /// Brute-force correlations by flattening to one stage.
    Oracle {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long)]
        set_a: String,
        #[arg(long)]
        set_b: String,
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        /// Stage to flatten to (default: the last built stage).
        #[arg(long)]
        stage: Option<usize>,
    },
    /// Count columns of tower j met by X_j ∩ TᵐX_j over h_j < m ≤ h_{j+1}.
    Sidon {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long)]
        j: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Scope::Full)]
        scope: Scope,
        /// Print a row for every scanned shift, not only failing ones.
        #[arg(long)]
        all: bool,
    },
    /// μ(A ∩ TᵐB) against k μ(A)/r_j over a range of shifts.
    Mixing {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long, allow_hyphen_values = true)]
        m_from: String,
        #[arg(long, allow_hyphen_values = true)]
        m_to: String,
        #[arg(long, default_value = "1:0")]
        set_a: String,
        /// Defaults to the same set as --set-a.
        #[arg(long)]
        set_b: Option<String>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Sample this many shifts instead of walking the whole range.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Check one of the three averaging identities.
    Lemma {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        j: Option<usize>,
        #[arg(long)]
        i: Option<usize>,
        #[arg(long)]
        m: Option<String>,
        #[arg(long, default_value = "1:0")]
        floor: String,
    },
    /// ‖r²P_{r,n}A⊗A − F_n‖² against its closed form and bound.
    Approx {
        #[command(flatten)]
        params: ParamsArg,
        /// Omit --r and --n to sweep every (r, n) pair in the schedule.
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        n: Option<String>,
        #[arg(long, default_value = "1:0")]
        floor: String,
    },
    /// Emit a parameter document.
    Generate {
        /// Minimal class member for the given (r, n) stage pairs.
        #[arg(long)]
        t2_min: bool,
        #[arg(long, default_value = "4")]
        h1: String,
        /// Stage pairs `r:n`, comma-separated.
        #[arg(long)]
        pairs: String,
    },
}
