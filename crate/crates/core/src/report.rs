//! Planning driver, mission reports, and plot-data export.
//!
//! A plan run produces a [`PlanReport`]: the solved path (if any), graph
//! statistics against the structural bounds, and wall-clock timings. The
//! report can be rendered as a human-readable summary, as a CSV record
//! stream of the traversed vertices, and as delimiter-separated layer
//! tables for external plotting.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::{build_graph, DependabilityGraph};
use crate::grid::{Cell, Grid2D, GridError};
use crate::risk::GroundRisk;
use crate::scenario::Scenario;
use crate::solver::{solve, MissionPath, PlanMode, SolveError};

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("no start/goal: the scenario has no [request] section; pass --from and --to")]
    MissingEndpoints,
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Graph size next to the structural bounds from the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphStats {
    pub vertices: usize,
    pub edges: usize,
    pub vertex_bound: usize,
    pub edge_bound: usize,
}

impl GraphStats {
    pub fn of(graph: &DependabilityGraph) -> Self {
        let bounds = graph.bounds();
        GraphStats {
            vertices: graph.vertex_count(),
            edges: graph.edge_count(),
            vertex_bound: bounds.vertex_bound,
            edge_bound: bounds.edge_bound,
        }
    }
}

/// Result of one plan run.
#[derive(Debug)]
pub struct PlanReport {
    pub label: String,
    pub from: Cell,
    pub to: Cell,
    pub mode: PlanMode,
    /// `None` when the goal is unreachable.
    pub path: Option<MissionPath>,
    pub stats: GraphStats,
    pub build_time: Duration,
    pub solve_time: Duration,
    pub graph: DependabilityGraph,
}

/// Builds the graph for a scenario and solves the requested mission.
/// Explicit `from`/`to`/`mode` arguments override the scenario's request.
pub fn plan_scenario(
    scenario: &Scenario,
    label: &str,
    from: Option<Cell>,
    to: Option<Cell>,
    mode: Option<PlanMode>,
) -> Result<PlanReport, PlanError> {
    let request = scenario.request.as_ref();
    let from = from.or(request.map(|r| r.from)).ok_or(PlanError::MissingEndpoints)?;
    let to = to.or(request.map(|r| r.to)).ok_or(PlanError::MissingEndpoints)?;
    let mode = mode.or(request.map(|r| r.mode)).unwrap_or_default();

    let build_start = Instant::now();
    let env = scenario.build_environment()?;
    let graph = build_graph(&env, &scenario.towers, &scenario.radio, &scenario.ground_risk());
    let build_time = build_start.elapsed();

    let solve_start = Instant::now();
    let path = solve(&graph, from, to, mode.mode())?;
    let solve_time = solve_start.elapsed();

    Ok(PlanReport {
        label: label.to_string(),
        from,
        to,
        mode,
        path,
        stats: GraphStats::of(&graph),
        build_time,
        solve_time,
        graph,
    })
}

impl PlanReport {
    /// The human-readable summary, including the exact parameter echo.
    pub fn summary(&self, scenario: &Scenario) -> String {
        let mut out = String::new();
        let b = &scenario.box_params;
        let (n, m, h) = self.graph.dims();
        let _ = writeln!(out, "scenario: {}", self.label);
        let _ = writeln!(
            out,
            "box: {n}x{m}x{h} cells of {} m ({} x {} x {} m)",
            b.cell_side_m, b.length_m, b.width_m, b.height_m
        );
        let _ = writeln!(
            out,
            "radio: alpha={} beta={} rx_gain={} elevation_unit={}",
            scenario.radio.alpha,
            scenario.radio.beta,
            scenario.radio.rx_gain,
            scenario.radio.elevation_unit.as_str()
        );
        let _ = writeln!(out, "towers: {}", scenario.towers.len());
        let risk_kind = match &scenario.risk {
            Some(GroundRisk::Factors(_)) => "factor grids",
            Some(GroundRisk::Precomputed(_)) => "precomputed grid",
            None => "none (zero risk)",
        };
        let _ = writeln!(out, "risk: {risk_kind}");
        let _ = writeln!(out, "mode: {}", self.mode);
        let _ = writeln!(out, "from: {}", self.from);
        let _ = writeln!(out, "to: {}", self.to);
        let _ = writeln!(
            out,
            "graph: {} vertices (bound {}), {} edges (bound {})",
            self.stats.vertices, self.stats.vertex_bound, self.stats.edges, self.stats.edge_bound
        );
        let _ = writeln!(out, "build_time_ms: {:.3}", self.build_time.as_secs_f64() * 1e3);
        let _ = writeln!(out, "solve_time_ms: {:.3}", self.solve_time.as_secs_f64() * 1e3);
        match &self.path {
            None => {
                let _ = writeln!(out, "result: no-path");
            }
            Some(p) => {
                let _ = writeln!(out, "result: path");
                let _ = writeln!(out, "steps: {}", p.edge_count());
                let _ = writeln!(out, "handovers: {}", p.handover_count());
                let _ = writeln!(out, "dependability: {}", p.dependability);
                let _ = writeln!(out, "log_cost: {}", p.log_cost);
            }
        }
        out
    }
}

/// One row of the path record stream.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub step: usize,
    pub kind: &'static str,
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub tower: Option<String>,
    /// Weight of the edge that entered this vertex; `None` for step 0.
    pub edge_weight: Option<f64>,
}

/// Expands a mission path into per-vertex records. Tower indices are
/// resolved to tower ids through the graph.
pub fn path_records(graph: &DependabilityGraph, path: &MissionPath) -> Vec<PathRecord> {
    path.vertices
        .iter()
        .enumerate()
        .map(|(step, v)| {
            let c = v.cell();
            PathRecord {
                step,
                kind: if v.tower().is_some() { "tower" } else { "cell" },
                x: c.x,
                y: c.y,
                z: c.z,
                tower: v.tower().map(|t| graph.tower_id(t).to_string()),
                edge_weight: step.checked_sub(1).map(|i| path.edge_weights[i]),
            }
        })
        .collect()
}

pub const PATH_CSV_HEADER: &str = "step,kind,x,y,z,tower,edge_weight";

/// Renders the record stream as CSV, weights at full round-trip precision.
pub fn records_to_csv(records: &[PathRecord]) -> String {
    let mut out = String::from(PATH_CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.step,
            r.kind,
            r.x,
            r.y,
            r.z,
            r.tower.as_deref().unwrap_or(""),
            r.edge_weight.map(|w| w.to_string()).unwrap_or_default()
        );
    }
    out
}

/// Parses a record stream written by [`records_to_csv`].
pub fn parse_path_csv(text: &str) -> Result<Vec<PathRecord>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == PATH_CSV_HEADER => {}
        other => return Err(format!("bad header: {other:?}")),
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(format!("row {} has {} fields, expected 7", i + 2, fields.len()));
        }
        let parse = |what: &str, v: &str| -> Result<usize, String> {
            v.parse::<usize>().map_err(|e| format!("row {}: bad {what} {v:?}: {e}", i + 2))
        };
        let kind = match fields[1] {
            "cell" => "cell",
            "tower" => "tower",
            other => return Err(format!("row {}: unknown kind {other:?}", i + 2)),
        };
        records.push(PathRecord {
            step: parse("step", fields[0])?,
            kind,
            x: parse("x", fields[2])?,
            y: parse("y", fields[3])?,
            z: parse("z", fields[4])?,
            tower: (!fields[5].is_empty()).then(|| fields[5].to_string()),
            edge_weight: if fields[6].is_empty() {
                None
            } else {
                Some(
                    fields[6]
                        .parse::<f64>()
                        .map_err(|e| format!("row {}: bad weight: {e}", i + 2))?,
                )
            },
        });
    }
    Ok(records)
}

fn grid_to_tsv(grid: &Grid2D<f64>) -> String {
    let mut out = String::new();
    for x in 1..=grid.n() {
        let row: Vec<String> = grid.row(x).iter().map(f64::to_string).collect();
        let _ = writeln!(out, "{}", row.join("\t"));
    }
    out
}

fn bool_grid_to_tsv(grid: &Grid2D<bool>) -> String {
    let mut out = String::new();
    for x in 1..=grid.n() {
        let row: Vec<&str> = grid.row(x).iter().map(|&b| if b { "1" } else { "0" }).collect();
        let _ = writeln!(out, "{}", row.join("\t"));
    }
    out
}

/// Writes the full export bundle into `dir`: the path record stream, the
/// summary, and the layer tables. Returns the written paths.
pub fn export_plan(
    dir: &Path,
    scenario: &Scenario,
    report: &PlanReport,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut emit = |name: &str, contents: String| -> io::Result<()> {
        let path = dir.join(name);
        fs::write(&path, contents)?;
        written.push(path);
        Ok(())
    };

    let records = match &report.path {
        Some(p) => path_records(&report.graph, p),
        None => Vec::new(),
    };
    emit("path.csv", records_to_csv(&records))?;
    emit("summary.txt", report.summary(scenario))?;
    emit("obstacles.tsv", grid_to_tsv(scenario.obstacles.heights()))?;
    emit("nofly.tsv", bool_grid_to_tsv(scenario.nofly.mask()))?;
    emit("risk.tsv", grid_to_tsv(&scenario.ground_risk().effective_grid()))?;
    Ok(written)
}
