use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pathfx::sample::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(name = "pathfx", version, about = "Path interventions on finite discrete causal models")]
pub struct Cli {
    /// Add wall-clock time to the JSON report (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and check a model file, then summarize it.
    Validate { file: PathBuf },

    /// List the directed paths between two variables.
    Paths {
        file: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },

    /// Report the recanting witness of a path, if it has one.
    Witness {
        file: PathBuf,
        /// Path written `A->M->Y`.
        #[arg(long)]
        path: String,
    },

    /// Emit the (intervention) diagram as DOT.
    Diagram {
        file: PathBuf,
        #[command(flatten)]
        intervention: InterventionArgs,
        /// Include exogenous noise nodes.
        #[arg(long)]
        augmented: bool,
        /// Write DOT here instead of standard output.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },

    /// Factorize and evaluate an intervened model exactly.
    Infer {
        file: PathBuf,
        #[command(flatten)]
        intervention: InterventionArgs,
        /// Variables to report, comma-separated. Defaults to the path's last
        /// node, or to every variable without an intervention.
        #[arg(long, value_delimiter = ',')]
        target: Vec<String>,
        /// Also keep every factual variable in the reported marginal.
        #[arg(long)]
        keep_factual: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },

    /// Draw an empirical table from a model or an intervened model.
    Sample {
        file: PathBuf,
        #[command(flatten)]
        intervention: InterventionArgs,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Restrict the table to these variables, comma-separated.
        #[arg(long, value_delimiter = ',')]
        target: Vec<String>,
        /// Give every variable a counterfactual copy under a path intervention.
        #[arg(long)]
        keep_all: bool,
    },

    /// Exact and sampled laws of a path effect side by side, optionally with
    /// the nested counterfactual under shared noise.
    Compare {
        file: PathBuf,
        #[arg(long)]
        path: String,
        #[arg(long)]
        value: String,
        /// `a,a'`: the head value along the path and elsewhere.
        #[arg(long)]
        nested: Option<String>,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Outcome variable; defaults to the path's last node.
        #[arg(long)]
        target: Option<String>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct InterventionArgs {
    /// `X=v`: replace X's mechanism by the constant v. Repeatable.
    #[arg(long = "do", value_name = "X=v")]
    pub do_: Vec<String>,
    /// `X=v`: every child of X reads v instead of X. Repeatable.
    #[arg(long, value_name = "X=v")]
    pub info: Vec<String>,
    /// Path written `A->M->Y`; needs `--value`.
    #[arg(long)]
    pub path: Option<String>,
    /// Value transmitted by the path head.
    #[arg(long)]
    pub value: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
}
