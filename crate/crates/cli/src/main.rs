//! Command-line front end: generate scenarios, solve them, simulate the
//! schedules, compare against the single-hop baseline and export artifacts.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tour_patrol::Method;

#[derive(Parser, Debug)]
#[command(
    name = "tour-patrol",
    version,
    about = "Plan and simulate cooperative patrolling on closed tours"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a new scenario file.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Pick a tree, directions and schedule; write the augmented scenario.
    Solve(SolveArgs),
    /// Run the event simulator on a solved scenario and write a metrics row.
    Simulate(SimulateArgs),
    /// Compare tree methods with the single-hop baseline on grid scenarios.
    Compare(CompareArgs),
    /// Render a scenario as DOT, an LP model or a character map.
    Export(ExportArgs),
}

#[derive(Subcommand, Debug)]
enum GenerateKind {
    /// Obstacle-free grid split into `n` loops.
    Grid {
        #[arg(long, default_value_t = 20)]
        w: i32,
        #[arg(long, default_value_t = 60)]
        h: i32,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        rcom: i32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Walled 40 by 20 grid with eight rectangular loops.
    Corridor {
        #[command(flatten)]
        out: OutArg,
    },
    /// Tour graph encoding a 3-CNF formula, with fixed directions.
    #[command(name = "3sat")]
    Sat {
        /// Clauses separated by `&`, literals like `x1` or `!x2`; or
        /// `example` for the built-in worked formula.
        #[arg(long, conflicts_with = "seed")]
        formula: Option<String>,
        /// Draw a random formula instead.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 4)]
        max_vars: u32,
        #[arg(long, default_value_t = 3)]
        max_clauses: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// A long chain with short arms back to the root tour.
    Chainarms {
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[arg(long, default_value_t = 1000.0)]
        big: f64,
        #[arg(long, default_value_t = 0.1)]
        small: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Random tour graph with uniform lengths and meeting points.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Probability of each non-tree edge.
        #[arg(long, default_value_t = 0.3)]
        extra: f64,
        #[arg(long, default_value_t = 1.0)]
        min_len: f64,
        #[arg(long, default_value_t = 20.0)]
        max_len: f64,
        /// Only the random spanning tree, no extra edges.
        #[arg(long)]
        tree: bool,
        /// Give some tours a partial sensing arc.
        #[arg(long)]
        partial_sensing: bool,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args, Debug)]
struct OutArg {
    /// Output scenario file.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SolveArgs {
    scenario: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Output scenario file; defaults to rewriting the input.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Largest instance the exhaustive search accepts.
    #[arg(long, env = "PATROL_OPT_CAP")]
    cap: Option<usize>,
    /// Run the exhaustive search on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    scenario: PathBuf,
    /// End of the run; defaults to two periods after the warm-up.
    #[arg(long)]
    horizon: Option<f64>,
    /// Start of the measuring window; defaults to the settling time of the
    /// tree after the last disturbance.
    #[arg(long)]
    warmup: Option<f64>,
    /// Extra wait at a robot's next departure, as `tour=ID,t=TIME,dt=WAIT`.
    #[arg(long = "disturb", value_parser = commands::parse_disturbance)]
    disturb: Vec<tour_patrol::sim::Disturbance>,
    /// Metrics CSV; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Write the per-event trace CSV here.
    #[arg(long, conflicts_with = "replay")]
    trace: Option<PathBuf>,
    /// Re-run a recorded trace and check it is reproduced exactly.
    #[arg(long, conflicts_with = "disturb")]
    replay: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Scenario with a grid embedding.
    scenario: PathBuf,
    /// Methods, including `singlehop`.
    #[arg(long, value_delimiter = ',', default_value = "sp,cg,singlehop")]
    methods: Vec<String>,
    /// Robot counts to sweep, as a list or a range `a..b` (inclusive);
    /// the loops in the file are used when omitted.
    #[arg(long, value_parser = commands::parse_counts)]
    counts: Option<Counts>,
    /// Seeds to sweep; the scenario's seed when omitted.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    /// Largest instance the exhaustive search accepts; larger ones get `size-cap` rows.
    #[arg(long, env = "PATROL_OPT_CAP")]
    cap: Option<usize>,
    /// Run the sweep and the exhaustive search on one thread.
    #[arg(long)]
    sequential: bool,
    /// Results CSV; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct Counts(pub Vec<usize>);

#[derive(Args, Debug)]
struct ExportArgs {
    scenario: PathBuf,
    #[arg(long, value_enum)]
    format: ExportFormat,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Sp,
    Cg,
    Opt,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Sp => Method::Sp,
            MethodArg::Cg => Method::Cg,
            MethodArg::Opt => Method::Opt,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    Dot,
    Lp,
    AsciiMap,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
