use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use tour_patrol::experiment::{compare_loops, solve_fixed, steady_window, sweep_grid, CompareRow};
use tour_patrol::export::{to_ascii_map, to_dot};
use tour_patrol::gen::{
    candidate_meetings, chain_arms, corridor, gen_3sat_mdt, grand_tour, k_splitour, random_graph, random_tree, Formula,
    GridScenario,
};
use tour_patrol::meeting::select_meeting_points;
use tour_patrol::scenario::ScenarioFile;
use tour_patrol::sim::{replay, simulate, Disturbance, SimConfig, TraceKind, TraceRecord};
use tour_patrol::trees::{emit_milp, ExactOptions, DEFAULT_CAP};
use tour_patrol::{Execution, Method, SolveResult, TourGraph, TourId};

use crate::{Command, CompareArgs, Counts, ExportArgs, ExportFormat, GenerateKind, SimulateArgs, SolveArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] tour_patrol::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use tour_patrol::Error as E;
        match self {
            CliError::Core(E::SizeCap { .. }) => 4,
            CliError::Core(E::Parameter(_) | E::Format(_) | E::Formula(_)) => 2,
            CliError::Core(_) => 3,
            CliError::Usage(_) | CliError::Io { .. } | CliError::Csv { .. } => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Generate { kind } => generate(kind),
        Command::Solve(args) => solve(args),
        Command::Simulate(args) => simulate_cmd(args),
        Command::Compare(args) => compare(args),
        Command::Export(args) => export(args),
    }
}

/// Parses `tour=ID,t=TIME,dt=WAIT`.
pub fn parse_disturbance(s: &str) -> std::result::Result<Disturbance, String> {
    let mut fields = BTreeMap::new();
    for part in s.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, found {part:?}"))?;
        fields.insert(k.trim(), v.trim());
    }
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| format!("missing {k}="));
    let tour = get("tour")?.parse::<u32>().map_err(|e| format!("tour: {e}"))?;
    let time = get("t")?.parse::<f64>().map_err(|e| format!("t: {e}"))?;
    let extra_wait = get("dt")?.parse::<f64>().map_err(|e| format!("dt: {e}"))?;
    if fields.len() != 3 {
        return Err("only tour, t and dt are allowed".into());
    }
    Ok(Disturbance {
        tour: TourId(tour),
        time,
        extra_wait,
    })
}

/// Parses `a..b` (inclusive) or a comma-separated list.
pub fn parse_counts(s: &str) -> std::result::Result<Counts, String> {
    let bad = |e: std::num::ParseIntError| e.to_string();
    let counts: Vec<usize> = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(bad)?..=b.trim().parse().map_err(bad)?).collect(),
        None => s
            .split(',')
            .map(|c| c.trim().parse().map_err(bad))
            .collect::<std::result::Result<_, _>>()?,
    };
    if counts.is_empty() || counts.contains(&0) {
        return Err("need at least one positive count".into());
    }
    Ok(Counts(counts))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write(p, text),
        None => io::stdout().write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

/// Human-facing report on stdout; a closed pipe is not an error.
fn say(text: &str) {
    let _ = io::stdout().write_all(text.as_bytes());
}

fn load(path: &Path) -> Result<ScenarioFile> {
    Ok(ScenarioFile::from_json(&read(path)?)?)
}

fn csv_text<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|source| CliError::Csv {
            path: "<csv>".into(),
            source,
        })?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// The resolved graph, running meeting-point selection on candidate lists.
fn resolve(file: ScenarioFile) -> Result<(ScenarioFile, TourGraph)> {
    if file.is_resolved() {
        let g = file.graph()?;
        return Ok((file, g));
    }
    let mg = file.multigraph()?;
    let (g, trace) = select_meeting_points(&mg)?;
    Ok((file.with_selection(&g, &trace), g))
}

fn options(cap: Option<usize>, sequential: bool) -> ExactOptions {
    ExactOptions {
        cap: cap.unwrap_or(DEFAULT_CAP),
        execution: if sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    }
}

fn summary(file: &ScenarioFile) -> String {
    let total: f64 = file.tours.iter().map(|t| t.length).sum();
    let edges = match &file.candidates {
        Some(c) if !file.is_resolved() => c.len(),
        _ => file.tours.iter().map(|t| t.meetings.len()).sum::<usize>() / 2,
    };
    format!("n={} total_length={} edges={}", file.tours.len(), total, edges)
}

fn generate(kind: GenerateKind) -> Result<()> {
    let (file, out) = match kind {
        GenerateKind::Grid {
            w,
            h,
            n,
            rcom,
            seed,
            out,
        } => {
            let grid = GridScenario::new(w, h, n, rcom, seed);
            let tour = grand_tour(&grid)?;
            let loops = k_splitour(&grid, &tour, n)?;
            let mg = candidate_meetings(&grid, &loops)?;
            let file = ScenarioFile::from_multigraph(&mg)
                .with_source(format!("grid w={w} h={h} n={n} rcom={rcom} seed={seed}"))
                .with_grid(&grid, &loops);
            (file, out.out)
        }
        GenerateKind::Corridor { out } => {
            let (grid, loops) = corridor();
            let mg = candidate_meetings(&grid, &loops)?;
            let file = ScenarioFile::from_multigraph(&mg)
                .with_source("corridor")
                .with_grid(&grid, &loops);
            (file, out.out)
        }
        GenerateKind::Sat {
            formula,
            seed,
            max_vars,
            max_clauses,
            out,
        } => {
            let formula: Formula = match (formula, seed) {
                (Some(f), _) => f.parse()?,
                (None, Some(seed)) => Formula::random(&mut ChaCha8Rng::seed_from_u64(seed), max_vars, max_clauses),
                (None, None) => return Err(CliError::Usage("3sat needs --formula or --seed".into())),
            };
            let (graph, dirs, _) = gen_3sat_mdt(&formula)?;
            let file = ScenarioFile::from_graph(&graph)
                .with_source(format!("3sat {formula}"))
                .with_fixed_directions(dirs);
            (file, out.out)
        }
        GenerateKind::Chainarms { k, big, small, out } => {
            let graph = chain_arms(k, big, small)?;
            let file = ScenarioFile::from_graph(&graph).with_source(format!("chainarms k={k} big={big} small={small}"));
            (file, out.out)
        }
        GenerateKind::Random {
            n,
            seed,
            extra,
            min_len,
            max_len,
            tree,
            partial_sensing,
            out,
        } => {
            if !(0.0..=1.0).contains(&extra) {
                return Err(CliError::Usage(format!("--extra must be a probability, got {extra}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let graph = if tree {
                random_tree(&mut rng, n, (min_len, max_len), partial_sensing)?
            } else {
                random_graph(&mut rng, n, extra, (min_len, max_len), partial_sensing)?
            };
            let file = ScenarioFile::from_graph(&graph).with_source(format!("random n={n} seed={seed}"));
            (file, out.out)
        }
    };
    write(&out, &file.to_json())?;
    say(&format!("{}\n", summary(&file)));
    Ok(())
}

fn solve(args: SolveArgs) -> Result<()> {
    let (file, graph) = resolve(load(&args.scenario)?)?;
    let method = Method::from(args.method);
    let s = solve_fixed(
        &graph,
        method,
        file.fixed_directions.as_ref(),
        options(args.cap, args.sequential),
    )?;
    let file = file.with_solution(&s);
    write(args.out.as_deref().unwrap_or(&args.scenario), &file.to_json())?;
    say(&format!(
        "method={} n={} WI={} WD={} depth={}\n{}",
        method,
        graph.len(),
        s.worst_idleness(),
        s.worst_delay(),
        s.tree.height(),
        s.schedule.table()
    ));
    Ok(())
}

#[derive(Serialize)]
struct SimulateRow {
    method: String,
    n: usize,
    #[serde(rename = "WI_analytic")]
    wi_analytic: f64,
    #[serde(rename = "WI_measured")]
    wi_measured: f64,
    #[serde(rename = "WD_analytic")]
    wd_analytic: f64,
    #[serde(rename = "WD_measured")]
    wd_measured: f64,
    convergence_time: f64,
    sum_distance: f64,
    status: String,
}

fn read_trace(path: &Path) -> Result<Vec<TraceRecord>> {
    let text = read(path)?;
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|source| CliError::Csv {
            path: path.into(),
            source,
        })
}

fn window(s: &SolveResult, disturbances: &[Disturbance], horizon: Option<f64>, warmup: Option<f64>) -> SimConfig {
    let steady = steady_window(s);
    let settle = steady.warmup;
    let last = disturbances.iter().map(|d| d.time).fold(0.0, f64::max);
    let warmup = warmup.unwrap_or(if disturbances.is_empty() {
        settle
    } else {
        settle.max(last + settle)
    });
    let period = s.tree.graph().max_length();
    let horizon = horizon.unwrap_or(warmup + 2.0 * period);
    SimConfig::new(horizon, warmup)
}

fn simulate_cmd(args: SimulateArgs) -> Result<()> {
    let file = load(&args.scenario)?;
    let s = file
        .solution()?
        .ok_or_else(|| CliError::Usage("scenario has no solution; run `solve` first".into()))?;
    let initial = BTreeMap::new();
    let (metrics, world) = match &args.replay {
        Some(path) => {
            let trace = read_trace(path)?;
            let recorded: Vec<Disturbance> = trace
                .iter()
                .filter(|t| t.kind == TraceKind::Disturb)
                .map(|t| Disturbance {
                    tour: t.robot,
                    time: t.time,
                    extra_wait: t.delta_t,
                })
                .collect();
            let config = window(&s, &recorded, args.horizon, args.warmup);
            replay(&s, &initial, &trace, config)?
        }
        None => {
            let mut config = window(&s, &args.disturb, args.horizon, args.warmup);
            config.record_trace = args.trace.is_some();
            simulate(&s, &initial, &args.disturb, config)?
        }
    };
    if let Some(path) = &args.trace {
        write(path, &csv_text(world.trace())?)?;
    }
    let row = SimulateRow {
        method: s.method.to_string(),
        n: s.tree.graph().len(),
        wi_analytic: s.worst_idleness(),
        wi_measured: metrics.worst_idleness,
        wd_analytic: s.worst_delay(),
        wd_measured: metrics.worst_delay,
        convergence_time: metrics.convergence_time,
        sum_distance: metrics.sum_distance(),
        status: metrics.status(),
    };
    if metrics.flags.short_horizon {
        eprintln!("warning: horizon is shorter than one cycle after warm-up");
    }
    emit(args.out.as_deref(), &csv_text(&[row])?)
}

fn compare(args: CompareArgs) -> Result<()> {
    let file = load(&args.scenario)?;
    let grid = file
        .grid
        .as_ref()
        .ok_or_else(|| CliError::Usage("compare needs a scenario with a grid embedding".into()))?;
    let mut methods = Vec::new();
    let mut single_hop = false;
    for m in &args.methods {
        match m.as_str() {
            "singlehop" => single_hop = true,
            other => methods.push(other.parse::<Method>()?),
        }
    }
    let opts = options(args.cap, args.sequential);
    let execution = opts.execution;
    let mut rows: Vec<CompareRow> = match (&args.counts, args.seeds.is_empty()) {
        (None, true) => compare_loops(&grid.scenario, &grid.loops, &methods, opts)?.0,
        (counts, _) => {
            let counts = counts.as_ref().map_or_else(|| vec![grid.loops.len()], |c| c.0.clone());
            let seeds = if args.seeds.is_empty() {
                vec![grid.scenario.seed]
            } else {
                args.seeds.clone()
            };
            sweep_grid(&grid.scenario, &counts, &seeds, &methods, opts, execution)?
        }
    };
    if !single_hop {
        rows.retain(|r| r.method != "singlehop");
    }
    emit(args.out.as_deref(), &csv_text(&rows)?)
}

fn export(args: ExportArgs) -> Result<()> {
    let file = load(&args.scenario)?;
    let text = match args.format {
        ExportFormat::AsciiMap => {
            let grid = file
                .grid
                .as_ref()
                .ok_or_else(|| CliError::Usage("ascii-map needs a scenario with a grid embedding".into()))?;
            to_ascii_map(&grid.scenario, &grid.loops)
        }
        ExportFormat::Dot => {
            let solution = file.solution()?;
            let (_, graph) = resolve(file)?;
            to_dot(&graph, solution.as_ref())
        }
        ExportFormat::Lp => emit_milp(&resolve(file)?.1)?,
    };
    emit(args.out.as_deref(), &text)
}
