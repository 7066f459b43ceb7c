//! `skylink`: plan drone missions over a dependability-weighted airspace
//! graph built from obstacle, no-fly, cellular, and ground-risk layers.
//!
//! Results go to stdout, diagnostics to stderr; the exit code is nonzero
//! exactly on errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use skylink_core::generate::{generate_scenario, generate_validation_scenario, GenParams, RiskProfile};
use skylink_core::oracle::{exhaustive_best, DEFAULT_VERTEX_BUDGET};
use skylink_core::report::{export_plan, path_records, plan_scenario, records_to_csv, PlanReport};
use skylink_core::scenario::{load_scenario, save_scenario, Scenario};
use skylink_core::solver::{solve, PlanMode};
use skylink_core::{Cell, DependabilityGraph};

#[derive(Debug, Parser)]
#[command(
    name = "skylink",
    version,
    about = "BVLoS drone mission planner over a dependability-weighted airspace graph"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan a mission and print the summary plus the path record stream.
    Plan(PlanArgs),
    /// Build the graph and print its statistics; optionally dump it.
    Graph(GraphArgs),
    /// Generate a synthetic scenario file from a seed.
    Gen(GenArgs),
    /// Cross-check the solver against the brute-force oracle.
    Validate(ValidateArgs),
    /// Plan a mission and write the export bundle (CSV/TSV tables).
    Export(ExportArgs),
}

#[derive(Debug, Args)]
struct MissionArgs {
    /// Scenario file.
    #[arg(long)]
    scenario: PathBuf,
    /// Start cell as x,y,z (overrides the scenario request).
    #[arg(long, value_parser = parse_cell)]
    from: Option<Cell>,
    /// Goal cell as x,y,z (overrides the scenario request).
    #[arg(long, value_parser = parse_cell)]
    to: Option<Cell>,
    /// Objective: full, min-risk, max-connectivity, or min-handover.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<PlanMode>,
}

#[derive(Debug, Args)]
struct PlanArgs {
    #[command(flatten)]
    mission: MissionArgs,
    /// Also write the export bundle into this directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GraphArgs {
    /// Scenario file.
    #[arg(long)]
    scenario: PathBuf,
    /// Dump the graph as text to this path, or `-` for stdout.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Cells along x.
    #[arg(long)]
    n: usize,
    /// Cells along y.
    #[arg(long)]
    m: usize,
    /// Cells along z.
    #[arg(long)]
    h: usize,
    /// Number of towers to place on free ground cells.
    #[arg(long, default_value_t = 3)]
    towers: usize,
    /// Fraction of columns carrying an obstacle, in [0,1].
    #[arg(long, default_value_t = 0.15)]
    obstacle_density: f64,
    /// Risk profile: uniform, hotspot, or corridor.
    #[arg(long, default_value = "hotspot", value_parser = parse_profile)]
    risk_profile: RiskProfile,
    /// RNG seed; the output is a pure function of the parameters.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cell side in meters.
    #[arg(long, default_value_t = 20.0)]
    cell_side: f64,
    /// Output scenario file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Validate this scenario file (otherwise generate random instances).
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Number of generated instances when no scenario is given.
    #[arg(long, default_value_t = 25)]
    count: usize,
    /// Base seed for generated instances.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest graph (in vertices) the oracle will enumerate.
    #[arg(long, default_value_t = DEFAULT_VERTEX_BUDGET)]
    budget: usize,
    /// Objective to validate under.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<PlanMode>,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[command(flatten)]
    mission: MissionArgs,
    /// Output directory for the export bundle.
    #[arg(long)]
    out_dir: PathBuf,
}

fn parse_cell(s: &str) -> Result<Cell, String> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<PlanMode, String> {
    s.parse()
}

fn parse_profile(s: &str) -> Result<RiskProfile, String> {
    s.parse()
}

fn load(path: &Path) -> Result<Scenario> {
    let (scenario, warnings) = load_scenario(path)
        .with_context(|| format!("loading scenario {}", path.display()))?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(scenario)
}

fn run_plan(mission: &MissionArgs, label: &str) -> Result<(Scenario, PlanReport)> {
    let scenario = load(&mission.scenario)?;
    let report = plan_scenario(&scenario, label, mission.from, mission.to, mission.mode)?;
    Ok((scenario, report))
}

fn print_report(scenario: &Scenario, report: &PlanReport) {
    print!("{}", report.summary(scenario));
    if let Some(path) = &report.path {
        println!();
        print!("{}", records_to_csv(&path_records(&report.graph, path)));
    }
}

fn cmd_plan(args: &PlanArgs) -> Result<()> {
    let label = args.mission.scenario.display().to_string();
    let (scenario, report) = run_plan(&args.mission, &label)?;
    print_report(&scenario, &report);
    if let Some(dir) = &args.out_dir {
        let files = export_plan(dir, &scenario, &report)
            .with_context(|| format!("writing export bundle to {}", dir.display()))?;
        for f in files {
            eprintln!("wrote {}", f.display());
        }
    }
    if report.path.is_none() {
        bail!("no path from {} to {}", report.from, report.to);
    }
    Ok(())
}

fn cmd_graph(args: &GraphArgs) -> Result<()> {
    let scenario = load(&args.scenario)?;
    let (env, graph) = scenario.compile()?;
    let (n, m, h) = env.dims();
    let bounds = graph.bounds();
    println!("box: {n}x{m}x{h} cells, {} free", env.free_cell_count());
    println!("towers: {}", graph.tower_count());
    println!("vertices: {} (bound {})", graph.vertex_count(), bounds.vertex_bound);
    println!("edges: {} (bound {})", graph.edge_count(), bounds.edge_bound);
    if let Some(dump) = &args.dump {
        if dump.as_os_str() == "-" {
            let stdout = std::io::stdout();
            graph.dump(stdout.lock())?;
        } else {
            let file = std::fs::File::create(dump)
                .with_context(|| format!("creating {}", dump.display()))?;
            graph.dump(std::io::BufWriter::new(file))?;
            eprintln!("wrote {}", dump.display());
        }
    }
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    let params = GenParams {
        n: args.n,
        m: args.m,
        h: args.h,
        cell_side_m: args.cell_side,
        tower_count: args.towers,
        obstacle_density: args.obstacle_density,
        risk_profile: args.risk_profile,
        seed: args.seed,
    };
    let scenario = generate_scenario(&params)?;
    save_scenario(&args.out, &scenario)?;
    eprintln!("wrote {}", args.out.display());
    Ok(())
}

/// Compares solver and oracle on one graph; returns a one-line verdict or
/// an error on disagreement.
fn check_instance(
    graph: &DependabilityGraph,
    from: Cell,
    to: Cell,
    mode: PlanMode,
    budget: usize,
) -> Result<String> {
    let solved = solve(graph, from, to, mode.mode())?;
    let brute = exhaustive_best(graph, from, to, mode.mode(), budget)?;
    match (solved, brute) {
        (None, None) => Ok("agree: no-path".to_string()),
        (Some(p), Some(o)) => {
            let diff = (p.dependability - o.best_dependability).abs();
            if diff <= 1e-9 * o.best_dependability.abs().max(f64::MIN_POSITIVE) {
                Ok(format!(
                    "agree: dependability {} ({} paths enumerated)",
                    p.dependability, o.paths_explored
                ))
            } else {
                Err(anyhow!(
                    "disagree: solver {} vs oracle {}",
                    p.dependability,
                    o.best_dependability
                ))
            }
        }
        (s, o) => Err(anyhow!(
            "verdicts disagree: solver {:?} vs oracle {:?}",
            s.map(|p| p.dependability),
            o.map(|r| r.best_dependability)
        )),
    }
}

fn cmd_validate(args: &ValidateArgs) -> Result<()> {
    let mode = args.mode.unwrap_or_default();
    let mut failures = 0usize;
    let mut run_one = |label: &str, scenario: &Scenario| -> Result<()> {
        let (env, graph) = scenario.compile()?;
        let (from, to) = match &scenario.request {
            Some(r) => (r.from, r.to),
            None => {
                let mut free = env.free_cells();
                let from = free.next().context("scenario has no free cells")?;
                let to = env.free_cells().last().unwrap();
                (from, to)
            }
        };
        match check_instance(&graph, from, to, mode, args.budget) {
            Ok(line) => println!("{label}: {line}"),
            Err(e) => {
                failures += 1;
                eprintln!("{label}: {e}");
            }
        }
        Ok(())
    };

    match &args.scenario {
        Some(path) => {
            let scenario = load(path)?;
            run_one(&path.display().to_string(), &scenario)?;
        }
        None => {
            for i in 0..args.count {
                let seed = args.seed.wrapping_add(i as u64);
                let scenario = generate_validation_scenario(seed);
                run_one(&format!("instance {i} (seed {seed})"), &scenario)?;
            }
        }
    }
    if failures > 0 {
        bail!("{failures} instance(s) disagreed");
    }
    Ok(())
}

fn cmd_export(args: &ExportArgs) -> Result<()> {
    let label = args.mission.scenario.display().to_string();
    let (scenario, report) = run_plan(&args.mission, &label)?;
    let files = export_plan(&args.out_dir, &scenario, &report)
        .with_context(|| format!("writing export bundle to {}", args.out_dir.display()))?;
    let mut stdout = std::io::stdout();
    for f in &files {
        writeln!(stdout, "{}", f.display())?;
    }
    if report.path.is_none() {
        bail!("no path from {} to {}", report.from, report.to);
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Plan(args) => cmd_plan(args),
        Command::Graph(args) => cmd_graph(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Export(args) => cmd_export(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
