// SPDX-License-Identifier: Apache-2.0

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

const EXIT_CODES: &str = "Exit codes:
  0  success
  1  other failure
  2  invalid configuration or usage
  3  input/output or parse error
  4  generation fell short (white space, net budget, or backbone stalled)
  5  certification failed";

/// Placement benchmarks with certified near-optimal wirelength.
#[derive(Parser, Debug)]
#[command(name = "optbench", version, after_help = EXIT_CODES)]
pub struct Cli {
    /// Print failures as one JSON object on stderr.
    #[arg(long, global = true)]
    pub json_errors: bool,

    /// Worker threads for independent sweep items and scoring.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Output directory.
    #[arg(long, short, global = true, env = "OPTBENCH_OUT", default_value = "out")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate mixed-size benchmarks with a wirelength certificate.
    GenMs(GenMsArgs),
    /// Rewrite a placed netlist so its placement is provably optimal.
    GenMc(GenMcArgs),
    /// Snap certified placements to bin centers.
    Ogp(OgpArgs),
    /// Score placements against certificates.
    Eval(EvalArgs),
}

#[derive(Args, Debug)]
pub struct GenMsArgs {
    /// `key = value` file, or a run manifest to repeat.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Extra `key=value` settings; override the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Standard-cell count.
    #[arg(long)]
    pub cells: Option<usize>,
    /// Net-degree counts such as `2:500,3:200`.
    #[arg(long)]
    pub histogram: Option<String>,
    /// Take histogram, cell count, region, and macros from a Bookshelf `.aux`.
    #[arg(long)]
    pub from_bundle: Option<PathBuf>,
    /// Comma-separated sweep of fractions, `max`, or `pack`.
    #[arg(long, value_delimiter = ',')]
    pub white_space: Vec<String>,
    /// Zero white space on the left half, a little on the right.
    #[arg(long)]
    pub pack: bool,
    /// Per-bin movable utilization target instead of uniform white space.
    #[arg(long)]
    pub utilization: Option<f64>,
    /// Add monotone chains between perimeter pads.
    #[arg(long)]
    pub chains: bool,
}

#[derive(Args, Debug)]
pub struct GenMcArgs {
    /// Seed netlist (`.aux`); its placement must put pins on grid-cell centers.
    #[arg(long, required_unless_present = "synthetic")]
    pub aux: Option<PathBuf>,
    /// Placement to use instead of the one listed in the `.aux`.
    #[arg(long)]
    pub pl: Option<PathBuf>,
    /// Build a clustered seed netlist with this many cells instead.
    #[arg(long, conflicts_with = "aux")]
    pub synthetic: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub max_chains_per_terminal: usize,
}

#[derive(Args, Debug)]
pub struct OgpArgs {
    #[arg(long)]
    pub aux: PathBuf,
    /// Certificate JSON; defaults to `<name>.cert.json` beside the `.aux`.
    #[arg(long)]
    pub cert: Option<PathBuf>,
    /// Bin sizes in grid units, such as `1x1,2x2,4x4`.
    #[arg(long, value_delimiter = ',', default_value = "1x1,2x2,4x4,8x8")]
    pub bins: Vec<String>,
    /// Keep macros in place (the default).
    #[arg(long, conflicts_with = "move_all")]
    pub fix_macros: bool,
    /// Snap movable macros too.
    #[arg(long)]
    pub move_all: bool,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Bundles to score.
    #[arg(long, required = true, num_args = 1..)]
    pub aux: Vec<PathBuf>,
    /// Placement to score instead of the one in the `.aux` (single bundle only).
    #[arg(long)]
    pub pl: Option<PathBuf>,
    /// Certificates: one for all bundles or one per bundle, in order.
    #[arg(long, num_args = 1..)]
    pub cert: Vec<PathBuf>,
    /// Reference bundle for displacement statistics.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Utilization target; enables bin overflow and SHPWL scaling.
    #[arg(long)]
    pub utilization: Option<f64>,
    /// Bin side in standard-cell rows.
    #[arg(long, default_value_t = 10.0)]
    pub bin_rows: f64,
    /// Append a lower-median row.
    #[arg(long)]
    pub median: bool,
    /// Name of the batch report file.
    #[arg(long, default_value = "report")]
    pub report: String,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = commands::exit_code(&e);
            if cli.json_errors {
                let body = serde_json::json!({ "error": commands::describe(&e), "code": code, "kind": commands::error_kind(&e) });
                eprintln!("{body}");
            } else {
                eprintln!("error: {}", commands::describe(&e));
            }
            ExitCode::from(code)
        }
    }
}
