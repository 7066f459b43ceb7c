//! Seeded synthetic scenario generation.
//!
//! Generation is a pure function of the parameter tuple including the seed:
//! the same parameters serialize to byte-identical scenario files. Towers
//! are placed on distinct free ground cells; obstacles draw a height in
//! `(0, box height]` so a blocked column always blocks at least the ground
//! level; the no-fly mask is left empty (no-fly zones are authored by hand).

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grid::{Cell, Grid2D, NoFlyLayer, ObstacleLayer};
use crate::radio::{RadioParams, SCurvePreset, Tower};
use crate::risk::{GroundRisk, RiskFactorLayers};
use crate::scenario::{BoxParams, PlanRequest, Scenario};
use crate::solver::PlanMode;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GenError {
    #[error("{name} is invalid: {message}")]
    InvalidParameter { name: &'static str, message: String },
    #[error("tower_count {requested} exceeds free ground cells ({available})")]
    TowersExceedFreeGround { requested: usize, available: usize },
}

/// Shape of the generated risk factor grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RiskProfile {
    /// Independent uniform draws per cell and factor.
    Uniform,
    /// A few high-risk peaks decaying with distance over a low background.
    #[default]
    Hotspot,
    /// A low-risk band along the x axis, high risk elsewhere.
    Corridor,
}

impl RiskProfile {
    pub const ALL: [RiskProfile; 3] =
        [RiskProfile::Uniform, RiskProfile::Hotspot, RiskProfile::Corridor];

    pub fn as_str(self) -> &'static str {
        match self {
            RiskProfile::Uniform => "uniform",
            RiskProfile::Hotspot => "hotspot",
            RiskProfile::Corridor => "corridor",
        }
    }
}

impl fmt::Display for RiskProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RiskProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(RiskProfile::Uniform),
            "hotspot" => Ok(RiskProfile::Hotspot),
            "corridor" => Ok(RiskProfile::Corridor),
            other => Err(format!("unknown risk profile {other:?}; expected uniform, hotspot, or corridor")),
        }
    }
}

/// Generation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    pub n: usize,
    pub m: usize,
    pub h: usize,
    pub cell_side_m: f64,
    pub tower_count: usize,
    pub obstacle_density: f64,
    pub risk_profile: RiskProfile,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n: 8,
            m: 8,
            h: 2,
            cell_side_m: 20.0,
            tower_count: 3,
            obstacle_density: 0.15,
            risk_profile: RiskProfile::Hotspot,
            seed: 0,
        }
    }
}

const WAVELENGTHS_M: [f64; 3] = [0.125, 0.0857, 0.0107]; // 2.4, 3.5, 28 GHz

/// Generates a scenario deterministically from the parameters.
pub fn generate_scenario(params: &GenParams) -> Result<Scenario, GenError> {
    let GenParams { n, m, h, cell_side_m, tower_count, obstacle_density, risk_profile, seed } =
        *params;
    for (name, value) in [("n", n), ("m", m), ("h", h)] {
        if value == 0 {
            return Err(GenError::InvalidParameter {
                name,
                message: "cell counts must be positive".to_string(),
            });
        }
    }
    if !(cell_side_m > 0.0) {
        return Err(GenError::InvalidParameter {
            name: "cell_side_m",
            message: format!("must be positive, got {cell_side_m}"),
        });
    }
    if !(0.0..=1.0).contains(&obstacle_density) {
        return Err(GenError::InvalidParameter {
            name: "obstacle_density",
            message: format!("must be in [0,1], got {obstacle_density}"),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let box_params = BoxParams {
        length_m: n as f64 * cell_side_m,
        width_m: m as f64 * cell_side_m,
        height_m: h as f64 * cell_side_m,
        cell_side_m,
    };

    let preset = SCurvePreset::ALL[rng.random_range(0..SCurvePreset::ALL.len())];
    let radio = RadioParams::preset(preset);

    let mut heights = Grid2D::filled(n, m, 0.0);
    for x in 1..=n {
        for y in 1..=m {
            if rng.random::<f64>() < obstacle_density {
                // (0, height_m]: any obstacle blocks at least the ground level
                heights.set(x, y, (1.0 - rng.random::<f64>()) * box_params.height_m);
            }
        }
    }
    let obstacles = ObstacleLayer::new(heights).expect("generated heights are non-negative");
    let nofly = NoFlyLayer::none(n, m);

    let risk = GroundRisk::Factors(generate_risk(&mut rng, n, m, risk_profile));

    let env = crate::grid::EnvironmentBox::new(
        box_params.length_m,
        box_params.width_m,
        box_params.height_m,
        cell_side_m,
    )
    .expect("generated dimensions are exact multiples")
    .apply_obstacles(&obstacles)
    .expect("shape matches")
    .apply_nofly(&nofly)
    .expect("shape matches");

    let ground: Vec<Cell> = env.free_ground_cells().collect();
    if tower_count > ground.len() {
        return Err(GenError::TowersExceedFreeGround {
            requested: tower_count,
            available: ground.len(),
        });
    }
    let mut picks: Vec<usize> = rand::seq::index::sample(&mut rng, ground.len(), tower_count).into_vec();
    picks.sort_unstable();
    let id_width = tower_count.to_string().len().max(2);
    let mut towers = Vec::with_capacity(tower_count);
    for (i, &pick) in picks.iter().enumerate() {
        let cell = ground[pick];
        towers.push(
            Tower::new(
                format!("t{:0width$}", i + 1, width = id_width),
                cell.x,
                cell.y,
                rng.random_range(5.0..40.0),
                rng.random_range(1.0..16.0),
                WAVELENGTHS_M[rng.random_range(0..WAVELENGTHS_M.len())],
            )
            .expect("generated tower parameters are positive"),
        );
    }

    let mut free = env.free_cells();
    let request = match (free.next(), env.free_cells().last()) {
        (Some(from), Some(to)) => Some(PlanRequest { from, to, mode: PlanMode::Full }),
        _ => None,
    };

    Ok(Scenario { box_params, radio, towers, obstacles, nofly, risk: Some(risk), request })
}

fn generate_risk(rng: &mut ChaCha8Rng, n: usize, m: usize, profile: RiskProfile) -> RiskFactorLayers {
    let mut p_event = Grid2D::filled(n, m, 0.0);
    let mut p_impact = Grid2D::filled(n, m, 0.0);
    let mut p_fatality = Grid2D::filled(n, m, 0.0);
    match profile {
        RiskProfile::Uniform => {
            for x in 1..=n {
                for y in 1..=m {
                    p_event.set(x, y, rng.random::<f64>());
                    p_impact.set(x, y, rng.random::<f64>());
                    p_fatality.set(x, y, rng.random::<f64>());
                }
            }
        }
        RiskProfile::Hotspot => {
            let count = 1 + n * m / 36;
            let peaks: Vec<(f64, f64)> = (0..count)
                .map(|_| {
                    (
                        rng.random_range(1.0..=n as f64),
                        rng.random_range(1.0..=m as f64),
                    )
                })
                .collect();
            let sigma = (n.max(m) as f64 / 5.0).max(1.0);
            for x in 1..=n {
                for y in 1..=m {
                    let intensity = peaks
                        .iter()
                        .map(|&(px, py)| {
                            let d2 = (x as f64 - px).powi(2) + (y as f64 - py).powi(2);
                            (-d2 / (2.0 * sigma * sigma)).exp()
                        })
                        .fold(0.0f64, f64::max);
                    p_event.set(x, y, (0.02 + 0.9 * intensity).clamp(0.0, 1.0));
                    p_impact.set(x, y, (0.2 + 0.6 * intensity).clamp(0.0, 1.0));
                    p_fatality.set(x, y, (0.3 + 0.4 * rng.random::<f64>()).clamp(0.0, 1.0));
                }
            }
        }
        RiskProfile::Corridor => {
            let center = rng.random_range(1..=m) as f64;
            let half_width = (m as f64 / 4.0).max(1.0);
            for x in 1..=n {
                for y in 1..=m {
                    let inside = (y as f64 - center).abs() <= half_width;
                    let base = if inside { 0.02 } else { 0.7 };
                    p_event.set(x, y, (base + 0.1 * rng.random::<f64>()).clamp(0.0, 1.0));
                    p_impact.set(x, y, 0.5);
                    p_fatality.set(x, y, 0.6);
                }
            }
        }
    }
    RiskFactorLayers::new(p_event, p_impact, p_fatality).expect("generated factors are in range")
}

/// Parameters for a small solver-vs-oracle validation instance: boxes up to
/// 4x4x2 with up to three towers, sized so the graph stays well under the
/// oracle's vertex budget.
pub fn validation_params(seed: u64) -> GenParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1));
    GenParams {
        n: rng.random_range(2..=4),
        m: rng.random_range(2..=4),
        h: rng.random_range(1..=2),
        cell_side_m: 20.0,
        tower_count: rng.random_range(0..=3),
        obstacle_density: rng.random_range(0.0..0.35),
        risk_profile: RiskProfile::ALL[rng.random_range(0..3)],
        seed,
    }
}

/// Generates a validation instance, dropping the towers when obstacles left
/// too few free ground cells for the drawn tower count.
pub fn generate_validation_scenario(seed: u64) -> Scenario {
    let mut params = validation_params(seed);
    match generate_scenario(&params) {
        Ok(s) => s,
        Err(GenError::TowersExceedFreeGround { .. }) => {
            params.tower_count = 0;
            generate_scenario(&params).expect("zero towers always fit")
        }
        Err(e) => panic!("validation scenario generation failed: {e}"),
    }
}
