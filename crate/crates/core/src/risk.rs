//! Ground-risk layer: the per-column probability that a drone failure causes
//! a fatal injury on the ground, and its complement, ground safeness.
//!
//! Risk either comes as three factor grids (crash, person impact given
//! crash, fatality given impact) whose product is the risk, or as a single
//! precomputed risk grid. The layer is 2D: risk does not depend on the
//! drone's altitude.

use thiserror::Error;

use crate::grid::{Cell, Grid2D};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RiskError {
    #[error("{layer}[{x},{y}] = {value} outside [0,1]")]
    OutOfRange { layer: &'static str, x: usize, y: usize, value: f64 },
    #[error("risk layer {layer} is {got_n}x{got_m} but {want_n}x{want_m} was expected")]
    ShapeMismatch {
        layer: &'static str,
        got_n: usize,
        got_m: usize,
        want_n: usize,
        want_m: usize,
    },
}

fn check_probabilities(layer: &'static str, grid: &Grid2D<f64>) -> Result<(), RiskError> {
    for (x, y, &v) in grid.iter() {
        if !(0.0..=1.0).contains(&v) {
            return Err(RiskError::OutOfRange { layer, x, y, value: v });
        }
    }
    Ok(())
}

/// The three risk factor grids, all over the box footprint.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskFactorLayers {
    p_event: Grid2D<f64>,
    p_impact: Grid2D<f64>,
    p_fatality: Grid2D<f64>,
}

impl RiskFactorLayers {
    pub fn new(
        p_event: Grid2D<f64>,
        p_impact: Grid2D<f64>,
        p_fatality: Grid2D<f64>,
    ) -> Result<Self, RiskError> {
        let shape = p_event.shape();
        for (layer, grid) in [("p_impact", &p_impact), ("p_fatality", &p_fatality)] {
            if grid.shape() != shape {
                return Err(RiskError::ShapeMismatch {
                    layer,
                    got_n: grid.n(),
                    got_m: grid.m(),
                    want_n: shape.0,
                    want_m: shape.1,
                });
            }
        }
        check_probabilities("p_event", &p_event)?;
        check_probabilities("p_impact", &p_impact)?;
        check_probabilities("p_fatality", &p_fatality)?;
        Ok(RiskFactorLayers { p_event, p_impact, p_fatality })
    }

    pub fn p_event(&self) -> &Grid2D<f64> {
        &self.p_event
    }

    pub fn p_impact(&self) -> &Grid2D<f64> {
        &self.p_impact
    }

    pub fn p_fatality(&self) -> &Grid2D<f64> {
        &self.p_fatality
    }

    /// Risk at a ground column: product of the three factors.
    pub fn risk_at(&self, x: usize, y: usize) -> f64 {
        self.p_event.get(x, y) * self.p_impact.get(x, y) * self.p_fatality.get(x, y)
    }
}

/// Resolved ground-risk layer used by graph construction.
#[derive(Debug, Clone, PartialEq)]
pub enum GroundRisk {
    Factors(RiskFactorLayers),
    Precomputed(Grid2D<f64>),
}

impl GroundRisk {
    /// A zero-risk layer over an `n x m` footprint.
    pub fn zero(n: usize, m: usize) -> Self {
        GroundRisk::Precomputed(Grid2D::filled(n, m, 0.0))
    }

    pub fn precomputed(grid: Grid2D<f64>) -> Result<Self, RiskError> {
        check_probabilities("risk", &grid)?;
        Ok(GroundRisk::Precomputed(grid))
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            GroundRisk::Factors(f) => f.p_event.shape(),
            GroundRisk::Precomputed(g) => g.shape(),
        }
    }

    pub fn risk_at(&self, x: usize, y: usize) -> f64 {
        match self {
            GroundRisk::Factors(f) => f.risk_at(x, y),
            GroundRisk::Precomputed(g) => *g.get(x, y),
        }
    }

    /// Risk below the cell's column; independent of the cell height.
    pub fn risk(&self, c: Cell) -> f64 {
        self.risk_at(c.x, c.y)
    }

    /// Ground safeness `1 - risk`: 0 is the highest risk, 1 is no risk.
    pub fn ground_safeness(&self, c: Cell) -> f64 {
        1.0 - self.risk(c)
    }

    /// The effective risk grid, materialized (used for plot export).
    pub fn effective_grid(&self) -> Grid2D<f64> {
        match self {
            GroundRisk::Precomputed(g) => g.clone(),
            GroundRisk::Factors(f) => {
                let (n, m) = f.p_event.shape();
                let mut out = Grid2D::filled(n, m, 0.0);
                for x in 1..=n {
                    for y in 1..=m {
                        out.set(x, y, f.risk_at(x, y));
                    }
                }
                out
            }
        }
    }
}
