//! Scenario files: a line-oriented structured-text document with named
//! sections describing the box, radio parameters, towers, layers, and an
//! optional solve request.
//!
//! ```text
//! [box]
//! length_m = 100
//! width_m = 100
//! height_m = 20
//! cell_side_m = 20
//!
//! [radio]
//! rx_gain = 1
//! alpha = 4.88
//! beta = 0.43
//! elevation_unit = degrees
//!
//! [towers]
//! # id x y tx_power_w tx_gain wavelength_m
//! a 2 2 20 1.5 0.125
//!
//! [obstacles]   # n rows of m heights in meters
//! [nofly]       # n rows of m 0/1 flags
//! [risk.p_event] [risk.p_impact] [risk.p_fatality]   # factor grids
//! [risk.precomputed]                                 # or a single risk grid
//!
//! [request]
//! from = 1,1,1
//! to = 5,5,1
//! mode = full
//! ```
//!
//! Grids are row-major: row `x` of the file holds the `m` values for
//! `y = 1..=m`. Blank lines and `#` comments are ignored. Numbers are
//! written back at full round-trip precision, so `load(save(s))` is
//! equivalent to `s`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::graph::{build_graph, DependabilityGraph};
use crate::grid::{Cell, EnvironmentBox, Grid2D, GridError, NoFlyLayer, ObstacleLayer};
use crate::radio::{ElevationUnit, RadioError, RadioParams, Tower};
use crate::risk::{GroundRisk, RiskError, RiskFactorLayers};
use crate::solver::PlanMode;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("failed to access {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing required section [{0}]")]
    MissingSection(&'static str),
    #[error("missing key {key} in section [{section}]")]
    MissingKey { section: &'static str, key: &'static str },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Risk(#[from] RiskError),
    #[error(transparent)]
    Radio(#[from] RadioError),
    #[error("tower {id:?} at ({x},{y}) is outside the {n}x{m} footprint")]
    TowerOutOfBounds { id: String, x: usize, y: usize, n: usize, m: usize },
    #[error("tower {id:?} at ({x},{y}) is on a blocked cell")]
    TowerOnBlockedCell { id: String, x: usize, y: usize },
    #[error("more than one tower on cell ({x},{y})")]
    DuplicateTowerCell { x: usize, y: usize },
    #[error("duplicate tower id {id:?}")]
    DuplicateTowerId { id: String },
    #[error("request {which} cell {cell} is not a free cell of the environment")]
    RequestCellInvalid { which: &'static str, cell: Cell },
    #[error("risk factor grids are incomplete: missing [risk.{missing}]")]
    IncompleteRiskFactors { missing: &'static str },
}

/// The optional solve request embedded in a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanRequest {
    pub from: Cell,
    pub to: Cell,
    pub mode: PlanMode,
}

/// Box dimensions in meters plus the cell side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxParams {
    pub length_m: f64,
    pub width_m: f64,
    pub height_m: f64,
    pub cell_side_m: f64,
}

/// A fully validated scenario: the in-memory form of a scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub box_params: BoxParams,
    pub radio: RadioParams,
    /// Sorted by id; at most one tower per ground cell, all on free cells.
    pub towers: Vec<Tower>,
    pub obstacles: ObstacleLayer,
    pub nofly: NoFlyLayer,
    pub risk: Option<GroundRisk>,
    pub request: Option<PlanRequest>,
}

impl Scenario {
    /// Rebuilds the environment box with both layers applied.
    pub fn build_environment(&self) -> Result<EnvironmentBox, GridError> {
        EnvironmentBox::new(
            self.box_params.length_m,
            self.box_params.width_m,
            self.box_params.height_m,
            self.box_params.cell_side_m,
        )?
        .apply_obstacles(&self.obstacles)?
        .apply_nofly(&self.nofly)
    }

    /// The effective ground-risk layer; zero risk when none was supplied.
    pub fn ground_risk(&self) -> GroundRisk {
        match &self.risk {
            Some(r) => r.clone(),
            None => {
                let (n, m) = self.obstacles.heights().shape();
                GroundRisk::zero(n, m)
            }
        }
    }

    /// Builds the environment and the dependability graph in one step.
    pub fn compile(&self) -> Result<(EnvironmentBox, DependabilityGraph), GridError> {
        let env = self.build_environment()?;
        let graph = build_graph(&env, &self.towers, &self.radio, &self.ground_risk());
        Ok((env, graph))
    }

    /// Parses and validates a scenario document, returning non-fatal
    /// warnings alongside it.
    pub fn from_text(text: &str) -> Result<(Scenario, Vec<String>), ScenarioError> {
        let raw = RawDocument::parse(text)?;
        raw.build()
    }

    /// Serializes the scenario; stable output, full float precision.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let b = &self.box_params;
        out.push_str("[box]\n");
        let _ = writeln!(out, "length_m = {}", b.length_m);
        let _ = writeln!(out, "width_m = {}", b.width_m);
        let _ = writeln!(out, "height_m = {}", b.height_m);
        let _ = writeln!(out, "cell_side_m = {}", b.cell_side_m);
        out.push_str("\n[radio]\n");
        let _ = writeln!(out, "rx_gain = {}", self.radio.rx_gain);
        let _ = writeln!(out, "alpha = {}", self.radio.alpha);
        let _ = writeln!(out, "beta = {}", self.radio.beta);
        let _ = writeln!(out, "elevation_unit = {}", self.radio.elevation_unit.as_str());
        out.push_str("\n[towers]\n# id x y tx_power_w tx_gain wavelength_m\n");
        for t in &self.towers {
            let _ = writeln!(
                out,
                "{} {} {} {} {} {}",
                t.id, t.x, t.y, t.tx_power_w, t.tx_gain, t.wavelength_m
            );
        }
        out.push_str("\n[obstacles]\n");
        write_f64_grid(&mut out, self.obstacles.heights());
        out.push_str("\n[nofly]\n");
        let mask = self.nofly.mask();
        for x in 1..=mask.n() {
            let row: Vec<&str> = mask.row(x).iter().map(|&b| if b { "1" } else { "0" }).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        match &self.risk {
            Some(GroundRisk::Factors(f)) => {
                out.push_str("\n[risk.p_event]\n");
                write_f64_grid(&mut out, f.p_event());
                out.push_str("\n[risk.p_impact]\n");
                write_f64_grid(&mut out, f.p_impact());
                out.push_str("\n[risk.p_fatality]\n");
                write_f64_grid(&mut out, f.p_fatality());
            }
            Some(GroundRisk::Precomputed(g)) => {
                out.push_str("\n[risk.precomputed]\n");
                write_f64_grid(&mut out, g);
            }
            None => {}
        }
        if let Some(req) = &self.request {
            out.push_str("\n[request]\n");
            let _ = writeln!(out, "from = {},{},{}", req.from.x, req.from.y, req.from.z);
            let _ = writeln!(out, "to = {},{},{}", req.to.x, req.to.y, req.to.z);
            let _ = writeln!(out, "mode = {}", req.mode);
        }
        out
    }
}

fn write_f64_grid(out: &mut String, grid: &Grid2D<f64>) {
    for x in 1..=grid.n() {
        let row: Vec<String> = grid.row(x).iter().map(f64::to_string).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

/// Loads and validates a scenario file; the second element carries
/// non-fatal warnings.
pub fn load_scenario(path: &Path) -> Result<(Scenario, Vec<String>), ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })?;
    Scenario::from_text(&text)
}

/// Writes a scenario file.
pub fn save_scenario(path: &Path, scenario: &Scenario) -> Result<(), ScenarioError> {
    std::fs::write(path, scenario.to_text())
        .map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })
}

const KV_SECTIONS: [&str; 3] = ["box", "radio", "request"];
const ROW_SECTIONS: [&str; 7] = [
    "towers",
    "obstacles",
    "nofly",
    "risk.p_event",
    "risk.p_impact",
    "risk.p_fatality",
    "risk.precomputed",
];

#[derive(Default)]
struct RawDocument {
    kv: HashMap<String, Vec<(usize, String, String)>>,
    rows: HashMap<String, Vec<(usize, Vec<String>)>>,
}

impl RawDocument {
    fn parse(text: &str) -> Result<RawDocument, ScenarioError> {
        let mut doc = RawDocument::default();
        let mut current: Option<String> = None;
        for (i, raw_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                let name = name.trim();
                if !KV_SECTIONS.contains(&name) && !ROW_SECTIONS.contains(&name) {
                    return Err(ScenarioError::Parse {
                        line: line_no,
                        message: format!("unknown section [{name}]"),
                    });
                }
                if doc.kv.contains_key(name) || doc.rows.contains_key(name) {
                    return Err(ScenarioError::Parse {
                        line: line_no,
                        message: format!("duplicate section [{name}]"),
                    });
                }
                if KV_SECTIONS.contains(&name) {
                    doc.kv.insert(name.to_string(), Vec::new());
                } else {
                    doc.rows.insert(name.to_string(), Vec::new());
                }
                current = Some(name.to_string());
                continue;
            }
            let Some(section) = &current else {
                return Err(ScenarioError::Parse {
                    line: line_no,
                    message: format!("content before any section: {line:?}"),
                });
            };
            if let Some(entries) = doc.kv.get_mut(section) {
                let Some((key, value)) = line.split_once('=') else {
                    return Err(ScenarioError::Parse {
                        line: line_no,
                        message: format!("expected key = value in [{section}], got {line:?}"),
                    });
                };
                entries.push((line_no, key.trim().to_string(), value.trim().to_string()));
            } else if let Some(rows) = doc.rows.get_mut(section) {
                rows.push((line_no, line.split_whitespace().map(str::to_string).collect()));
            }
        }
        Ok(doc)
    }

    fn kv_value(&self, section: &'static str, key: &'static str) -> Option<(usize, &str)> {
        self.kv
            .get(section)?
            .iter()
            .find(|(_, k, _)| k == key)
            .map(|(line, _, v)| (*line, v.as_str()))
    }

    fn require_f64(&self, section: &'static str, key: &'static str) -> Result<f64, ScenarioError> {
        if !self.kv.contains_key(section) {
            return Err(ScenarioError::MissingSection(section));
        }
        let (line, v) = self
            .kv_value(section, key)
            .ok_or(ScenarioError::MissingKey { section, key })?;
        v.parse::<f64>().map_err(|e| ScenarioError::Parse {
            line,
            message: format!("bad number for {key}: {e}"),
        })
    }

    fn f64_grid(&self, section: &'static str) -> Result<Option<Grid2D<f64>>, ScenarioError> {
        let Some(rows) = self.rows.get(section) else {
            return Ok(None);
        };
        let mut parsed: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
        for (line, tokens) in rows {
            let mut row = Vec::with_capacity(tokens.len());
            for tok in tokens {
                row.push(tok.parse::<f64>().map_err(|e| ScenarioError::Parse {
                    line: *line,
                    message: format!("bad number {tok:?}: {e}"),
                })?);
            }
            parsed.push(row);
        }
        Ok(Some(Grid2D::from_rows(parsed)?))
    }

    fn build(self) -> Result<(Scenario, Vec<String>), ScenarioError> {
        let mut warnings = Vec::new();

        let box_params = BoxParams {
            length_m: self.require_f64("box", "length_m")?,
            width_m: self.require_f64("box", "width_m")?,
            height_m: self.require_f64("box", "height_m")?,
            cell_side_m: self.require_f64("box", "cell_side_m")?,
        };
        let bare_env = EnvironmentBox::new(
            box_params.length_m,
            box_params.width_m,
            box_params.height_m,
            box_params.cell_side_m,
        )?;
        let (n, m) = (bare_env.n(), bare_env.m());

        let elevation_unit = match self.kv_value("radio", "elevation_unit") {
            None => ElevationUnit::Degrees,
            Some((_, "degrees")) => ElevationUnit::Degrees,
            Some((_, "radians")) => ElevationUnit::Radians,
            Some((line, other)) => {
                return Err(ScenarioError::Parse {
                    line,
                    message: format!("elevation_unit must be degrees or radians, got {other:?}"),
                })
            }
        };
        let radio = RadioParams::new(
            self.require_f64("radio", "rx_gain")?,
            self.require_f64("radio", "alpha")?,
            self.require_f64("radio", "beta")?,
            elevation_unit,
        )?;

        let obstacles = match self.f64_grid("obstacles")? {
            Some(grid) => ObstacleLayer::new(grid)?,
            None => ObstacleLayer::none(n, m),
        };
        let nofly = match self.rows.get("nofly") {
            None => NoFlyLayer::none(n, m),
            Some(rows) => {
                let mut parsed: Vec<Vec<bool>> = Vec::with_capacity(rows.len());
                for (line, tokens) in rows {
                    let mut row = Vec::with_capacity(tokens.len());
                    for tok in tokens {
                        row.push(match tok.as_str() {
                            "0" => false,
                            "1" => true,
                            other => {
                                return Err(ScenarioError::Parse {
                                    line: *line,
                                    message: format!("no-fly entries are 0 or 1, got {other:?}"),
                                })
                            }
                        });
                    }
                    parsed.push(row);
                }
                NoFlyLayer::new(Grid2D::from_rows(parsed)?)
            }
        };
        let env = bare_env.apply_obstacles(&obstacles)?.apply_nofly(&nofly)?;

        let p_event = self.f64_grid("risk.p_event")?;
        let p_impact = self.f64_grid("risk.p_impact")?;
        let p_fatality = self.f64_grid("risk.p_fatality")?;
        let precomputed = self.f64_grid("risk.precomputed")?;
        let factors = match (p_event, p_impact, p_fatality) {
            (None, None, None) => None,
            (Some(e), Some(i), Some(f)) => Some(RiskFactorLayers::new(e, i, f)?),
            (e, i, _) => {
                let missing = if e.is_none() {
                    "p_event"
                } else if i.is_none() {
                    "p_impact"
                } else {
                    "p_fatality"
                };
                return Err(ScenarioError::IncompleteRiskFactors { missing });
            }
        };
        let risk = match (factors, precomputed) {
            (Some(_), Some(grid)) => {
                warnings.push(
                    "both risk factor grids and a precomputed risk grid are present; using the precomputed grid"
                        .to_string(),
                );
                Some(check_risk_shape(GroundRisk::precomputed(grid)?, n, m)?)
            }
            (Some(f), None) => Some(check_risk_shape(GroundRisk::Factors(f), n, m)?),
            (None, Some(grid)) => Some(check_risk_shape(GroundRisk::precomputed(grid)?, n, m)?),
            (None, None) => {
                warnings.push("no risk layer provided; assuming zero ground risk".to_string());
                None
            }
        };

        let mut towers = Vec::new();
        if let Some(rows) = self.rows.get("towers") {
            for (line, tokens) in rows {
                if tokens.len() != 6 {
                    return Err(ScenarioError::Parse {
                        line: *line,
                        message: format!(
                            "tower rows have 6 fields (id x y tx_power_w tx_gain wavelength_m), got {}",
                            tokens.len()
                        ),
                    });
                }
                let parse_usize = |tok: &str| {
                    tok.parse::<usize>().map_err(|e| ScenarioError::Parse {
                        line: *line,
                        message: format!("bad coordinate {tok:?}: {e}"),
                    })
                };
                let parse_f64 = |tok: &str| {
                    tok.parse::<f64>().map_err(|e| ScenarioError::Parse {
                        line: *line,
                        message: format!("bad number {tok:?}: {e}"),
                    })
                };
                towers.push(Tower::new(
                    tokens[0].clone(),
                    parse_usize(&tokens[1])?,
                    parse_usize(&tokens[2])?,
                    parse_f64(&tokens[3])?,
                    parse_f64(&tokens[4])?,
                    parse_f64(&tokens[5])?,
                )?);
            }
        }
        for t in &towers {
            if t.x < 1 || t.x > n || t.y < 1 || t.y > m {
                return Err(ScenarioError::TowerOutOfBounds {
                    id: t.id.clone(),
                    x: t.x,
                    y: t.y,
                    n,
                    m,
                });
            }
            if !env.is_free(t.cell()) {
                return Err(ScenarioError::TowerOnBlockedCell { id: t.id.clone(), x: t.x, y: t.y });
            }
        }
        towers.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in towers.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(ScenarioError::DuplicateTowerId { id: pair[0].id.clone() });
            }
        }
        let mut cells: Vec<(usize, usize)> = towers.iter().map(|t| (t.x, t.y)).collect();
        cells.sort_unstable();
        for pair in cells.windows(2) {
            if pair[0] == pair[1] {
                return Err(ScenarioError::DuplicateTowerCell { x: pair[0].0, y: pair[0].1 });
            }
        }

        let request = if self.kv.contains_key("request") {
            let cell_key = |key: &'static str| -> Result<Cell, ScenarioError> {
                let (line, v) = self
                    .kv_value("request", key)
                    .ok_or(ScenarioError::MissingKey { section: "request", key })?;
                v.parse::<Cell>()
                    .map_err(|message| ScenarioError::Parse { line, message })
            };
            let from = cell_key("from")?;
            let to = cell_key("to")?;
            let mode = match self.kv_value("request", "mode") {
                None => PlanMode::Full,
                Some((line, v)) => v
                    .parse::<PlanMode>()
                    .map_err(|message| ScenarioError::Parse { line, message })?,
            };
            for (which, cell) in [("from", from), ("to", to)] {
                if !env.is_free(cell) {
                    return Err(ScenarioError::RequestCellInvalid { which, cell });
                }
            }
            Some(PlanRequest { from, to, mode })
        } else {
            None
        };

        Ok((
            Scenario { box_params, radio, towers, obstacles, nofly, risk, request },
            warnings,
        ))
    }
}

fn check_risk_shape(risk: GroundRisk, n: usize, m: usize) -> Result<GroundRisk, ScenarioError> {
    if risk.shape() != (n, m) {
        let (got_n, got_m) = risk.shape();
        return Err(ScenarioError::Grid(GridError::ShapeMismatch {
            got_n,
            got_m,
            want_n: n,
            want_m: m,
        }));
    }
    Ok(risk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::solve;

    const THREE_CELL: &str = "
[box]
length_m = 60
width_m = 20
height_m = 20
cell_side_m = 20

[radio]
rx_gain = 1
alpha = 4.88
beta = 0.43
elevation_unit = degrees

[towers]
a 2 1 20 1.5 0.125

[obstacles]
0
0
0

[nofly]
0
0
0

[risk.p_event]
0.1
0.1
0.1

[risk.p_impact]
0.5
0.5
0.5

[risk.p_fatality]
0.2
0.2
0.2

[request]
from = 1,1,1
to = 3,1,1
mode = full
";

    #[test]
    fn a_full_scenario_parses_and_plans() {
        let (scenario, warnings) = Scenario::from_text(THREE_CELL).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(scenario.towers.len(), 1);
        let (env, graph) = scenario.compile().unwrap();
        assert_eq!(env.dims(), (3, 1, 1));
        let req = scenario.request.unwrap();
        let path = solve(&graph, req.from, req.to, req.mode.mode()).unwrap().unwrap();
        assert!(path.dependability > 0.0);
    }

    #[test]
    fn minimal_scenario_loads_and_plans_trivially() {
        let text = "
[box]
length_m = 20
width_m = 20
height_m = 20
cell_side_m = 20

[radio]
rx_gain = 1
alpha = 4.88
beta = 0.43

[request]
from = 1,1,1
to = 1,1,1
";
        let (scenario, warnings) = Scenario::from_text(text).unwrap();
        assert_eq!(warnings.len(), 1); // zero-risk assumption
        let (_, graph) = scenario.compile().unwrap();
        let req = scenario.request.unwrap();
        let path = solve(&graph, req.from, req.to, req.mode.mode()).unwrap().unwrap();
        assert_eq!(path.dependability, 1.0);
        assert!(path.is_empty());
    }

    #[test]
    fn out_of_range_risk_reports_grid_coordinates() {
        let text = THREE_CELL.replace(
            "[risk.p_impact]\n0.5\n0.5\n0.5",
            "[risk.p_impact]\n0.5\n0.5\n1.3",
        );
        let err = Scenario::from_text(&text).unwrap_err();
        assert_eq!(err.to_string(), "p_impact[3,1] = 1.3 outside [0,1]");
    }

    #[test]
    fn tower_on_blocked_cell_is_rejected() {
        let text = THREE_CELL.replace("[obstacles]\n0\n0\n0", "[obstacles]\n0\n15\n0");
        let err = Scenario::from_text(&text).unwrap_err();
        assert_eq!(err.to_string(), "tower \"a\" at (2,1) is on a blocked cell");
    }

    #[test]
    fn duplicate_towers_are_rejected() {
        let text = THREE_CELL.replace("a 2 1 20 1.5 0.125", "a 2 1 20 1.5 0.125\nb 2 1 9 1 0.125");
        let err = Scenario::from_text(&text).unwrap_err();
        assert!(matches!(err, ScenarioError::DuplicateTowerCell { x: 2, y: 1 }));

        let text = THREE_CELL.replace("a 2 1 20 1.5 0.125", "a 2 1 20 1.5 0.125\na 3 1 9 1 0.125");
        let err = Scenario::from_text(&text).unwrap_err();
        assert!(matches!(err, ScenarioError::DuplicateTowerId { .. }));
    }

    #[test]
    fn tower_outside_footprint_is_rejected() {
        let text = THREE_CELL.replace("a 2 1 20 1.5 0.125", "a 9 1 20 1.5 0.125");
        assert!(matches!(
            Scenario::from_text(&text).unwrap_err(),
            ScenarioError::TowerOutOfBounds { .. }
        ));
    }

    #[test]
    fn request_cells_must_be_free() {
        let text = THREE_CELL.replace("[nofly]\n0\n0\n0", "[nofly]\n1\n0\n0");
        let err = Scenario::from_text(&text).unwrap_err();
        assert!(matches!(
            err,
            ScenarioError::RequestCellInvalid { which: "from", .. }
        ));
    }

    #[test]
    fn incomplete_risk_factors_are_rejected() {
        let text = THREE_CELL.replace("[risk.p_fatality]\n0.2\n0.2\n0.2", "");
        let err = Scenario::from_text(&text).unwrap_err();
        assert!(matches!(
            err,
            ScenarioError::IncompleteRiskFactors { missing: "p_fatality" }
        ));
    }

    #[test]
    fn precomputed_risk_wins_over_factors_with_a_warning() {
        let text = THREE_CELL.replace(
            "[request]",
            "[risk.precomputed]\n0.5\n0.5\n0.5\n\n[request]",
        );
        let (scenario, warnings) = Scenario::from_text(&text).unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("precomputed"));
        assert!(matches!(scenario.risk, Some(GroundRisk::Precomputed(_))));
        assert_eq!(scenario.ground_risk().risk_at(1, 1), 0.5);
    }

    #[test]
    fn non_divisible_box_is_rejected() {
        let text = THREE_CELL.replace("length_m = 60", "length_m = 70");
        let err = Scenario::from_text(&text).unwrap_err();
        assert_eq!(err.to_string(), "length not divisible by cell side");
    }

    #[test]
    fn structural_parse_errors_carry_line_numbers() {
        assert!(matches!(
            Scenario::from_text("[nonsense]\n").unwrap_err(),
            ScenarioError::Parse { line: 1, .. }
        ));
        assert!(matches!(
            Scenario::from_text("x = 1\n").unwrap_err(),
            ScenarioError::Parse { line: 1, .. }
        ));
        let text = THREE_CELL.replace("[nofly]\n0\n0\n0", "[nofly]\n0\n2\n0");
        assert!(matches!(
            Scenario::from_text(&text).unwrap_err(),
            ScenarioError::Parse { .. }
        ));
        let text = format!("{THREE_CELL}\n[box]\nlength_m = 60\n");
        assert!(matches!(
            Scenario::from_text(&text).unwrap_err(),
            ScenarioError::Parse { .. }
        ));
    }

    #[test]
    fn missing_sections_and_keys_are_named() {
        let err = Scenario::from_text("[radio]\nrx_gain = 1\nalpha = 1\nbeta = 1\n").unwrap_err();
        assert!(matches!(err, ScenarioError::MissingSection("box")));
        let text = THREE_CELL.replace("beta = 0.43\n", "");
        let err = Scenario::from_text(&text).unwrap_err();
        assert!(matches!(err, ScenarioError::MissingKey { section: "radio", key: "beta" }));
    }

    #[test]
    fn serialization_round_trips_byte_for_byte() {
        let (scenario, _) = Scenario::from_text(THREE_CELL).unwrap();
        let first = scenario.to_text();
        let (reloaded, _) = Scenario::from_text(&first).unwrap();
        assert_eq!(reloaded, scenario);
        assert_eq!(reloaded.to_text(), first);
    }

    #[test]
    fn files_round_trip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("case.scn");
        let (scenario, _) = Scenario::from_text(THREE_CELL).unwrap();
        save_scenario(&path, &scenario).unwrap();
        let (loaded, _) = load_scenario(&path).unwrap();
        assert_eq!(loaded, scenario);
        let missing = dir.path().join("absent.scn");
        assert!(matches!(
            load_scenario(&missing).unwrap_err(),
            ScenarioError::Io { .. }
        ));
    }
}
