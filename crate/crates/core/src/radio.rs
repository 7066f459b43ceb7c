//! Air-to-ground channel model: received power, line-of-sight probability,
//! link reliability, and the set of towers visible from a cell.
//!
//! Towers sit at ground level (`z = 1`). Received power follows the Friis
//! transmission equation and is normalized so that the maximum (drone and
//! tower co-located) is exactly 1. Line-of-sight probability is a modified
//! sigmoid of the elevation angle between tower and drone.

use std::f64::consts::PI;

use thiserror::Error;

use crate::grid::Cell;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RadioError {
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
}

/// Unit in which the elevation angle enters the S-curve.
///
/// The published S-curve parameter sets are calibrated for degrees; radians
/// are available for sensitivity studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ElevationUnit {
    #[default]
    Degrees,
    Radians,
}

impl ElevationUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            ElevationUnit::Degrees => "degrees",
            ElevationUnit::Radians => "radians",
        }
    }
}

/// Widely used S-curve parameter pairs for common environment types.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SCurvePreset {
    Suburban,
    Urban,
    DenseUrban,
    Highrise,
}

impl SCurvePreset {
    pub const ALL: [SCurvePreset; 4] = [
        SCurvePreset::Suburban,
        SCurvePreset::Urban,
        SCurvePreset::DenseUrban,
        SCurvePreset::Highrise,
    ];

    /// `(alpha, beta)` for the elevation angle expressed in degrees.
    pub fn alpha_beta(self) -> (f64, f64) {
        match self {
            SCurvePreset::Suburban => (4.88, 0.43),
            SCurvePreset::Urban => (9.61, 0.16),
            SCurvePreset::DenseUrban => (12.08, 0.11),
            SCurvePreset::Highrise => (27.23, 0.08),
        }
    }
}

/// A ground-level cellular tower.
#[derive(Debug, Clone, PartialEq)]
pub struct Tower {
    pub id: String,
    pub x: usize,
    pub y: usize,
    pub tx_power_w: f64,
    pub tx_gain: f64,
    pub wavelength_m: f64,
}

impl Tower {
    pub fn new(
        id: impl Into<String>,
        x: usize,
        y: usize,
        tx_power_w: f64,
        tx_gain: f64,
        wavelength_m: f64,
    ) -> Result<Self, RadioError> {
        check_positive("tx_power_w", tx_power_w)?;
        check_positive("tx_gain", tx_gain)?;
        check_positive("wavelength_m", wavelength_m)?;
        Ok(Tower { id: id.into(), x, y, tx_power_w, tx_gain, wavelength_m })
    }

    /// The ground cell the tower occupies.
    pub fn cell(&self) -> Cell {
        Cell::new(self.x, self.y, 1)
    }
}

/// Drone-side and environment-side channel parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    pub rx_gain: f64,
    pub alpha: f64,
    pub beta: f64,
    pub elevation_unit: ElevationUnit,
}

impl RadioParams {
    pub fn new(
        rx_gain: f64,
        alpha: f64,
        beta: f64,
        elevation_unit: ElevationUnit,
    ) -> Result<Self, RadioError> {
        check_positive("rx_gain", rx_gain)?;
        check_positive("alpha", alpha)?;
        check_positive("beta", beta)?;
        Ok(RadioParams { rx_gain, alpha, beta, elevation_unit })
    }

    pub fn preset(preset: SCurvePreset) -> Self {
        let (alpha, beta) = preset.alpha_beta();
        RadioParams { rx_gain: 1.0, alpha, beta, elevation_unit: ElevationUnit::Degrees }
    }
}

impl Default for RadioParams {
    fn default() -> Self {
        RadioParams::preset(SCurvePreset::Suburban)
    }
}

fn check_positive(what: &'static str, value: f64) -> Result<(), RadioError> {
    if !(value > 0.0) {
        return Err(RadioError::NonPositive { what, value });
    }
    Ok(())
}

/// Raw Friis transmission equation: received power in watts at distance
/// `distance_m`. The caller is responsible for keeping the distance away
/// from zero.
pub fn friis_received_power(
    tx_power_w: f64,
    tx_gain: f64,
    rx_gain: f64,
    wavelength_m: f64,
    distance_m: f64,
) -> f64 {
    let bracket = wavelength_m / (4.0 * PI * distance_m);
    tx_power_w * tx_gain * rx_gain * bracket * bracket
}

/// Whether tower `t` is inside the visibility square of `c`: a square of
/// side `1 + 2 * z_c` centered on the cell's column.
pub fn is_visible(c: Cell, t: &Tower) -> bool {
    let dx = (t.x as i64 - c.x as i64).unsigned_abs() as usize;
    let dy = (t.y as i64 - c.y as i64).unsigned_abs() as usize;
    dx <= c.z && dy <= c.z
}

/// Indices (into `towers`) of the towers visible from `c`, in input order.
///
/// The set grows with the cell height: at `z = 1` the square has side 3, at
/// `z = 2` side 5, and so on.
pub fn visible_towers(c: Cell, towers: &[Tower]) -> Vec<usize> {
    towers
        .iter()
        .enumerate()
        .filter(|(_, t)| is_visible(c, t))
        .map(|(i, _)| i)
        .collect()
}

/// Channel model bound to a concrete cell side, evaluating the per-pair
/// quantities on physical distances.
///
/// All methods are pure; evaluating them concurrently over many
/// `(cell, tower)` pairs is safe.
#[derive(Debug, Clone, Copy)]
pub struct RadioModel {
    pub params: RadioParams,
    pub cell_side_m: f64,
}

impl RadioModel {
    pub fn new(params: RadioParams, cell_side_m: f64) -> Self {
        debug_assert!(cell_side_m > 0.0);
        RadioModel { params, cell_side_m }
    }

    /// Euclidean slant distance between the drone antenna in `c` and the
    /// tower antenna, in meters, clamped below at one cell side so the
    /// co-located case stays finite.
    pub fn slant_distance(&self, c: Cell, t: &Tower) -> f64 {
        let dx = c.x as f64 - t.x as f64;
        let dy = c.y as f64 - t.y as f64;
        let dz = (c.z - 1) as f64;
        let d = self.cell_side_m * (dx * dx + dy * dy + dz * dz).sqrt();
        d.max(self.cell_side_m)
    }

    /// Horizontal ground distance between the cell column and the tower, in
    /// meters.
    pub fn ground_distance(&self, c: Cell, t: &Tower) -> f64 {
        let dx = c.x as f64 - t.x as f64;
        let dy = c.y as f64 - t.y as f64;
        self.cell_side_m * (dx * dx + dy * dy).sqrt()
    }

    /// Received power at the drone in watts (Friis at the slant distance).
    pub fn friis_power(&self, t: &Tower, c: Cell) -> f64 {
        friis_received_power(
            t.tx_power_w,
            t.tx_gain,
            self.params.rx_gain,
            t.wavelength_m,
            self.slant_distance(c, t),
        )
    }

    /// Received power normalized to `[0, 1]` against the reference distance
    /// of one cell side; exactly 1 when the slant-distance clamp is active.
    pub fn normalized_power(&self, t: &Tower, c: Cell) -> f64 {
        let at_reference = friis_received_power(
            t.tx_power_w,
            t.tx_gain,
            self.params.rx_gain,
            t.wavelength_m,
            self.cell_side_m,
        );
        (self.friis_power(t, c) / at_reference).clamp(0.0, 1.0)
    }

    /// Elevation angle from the tower base to the drone, in the configured
    /// unit. 90 degrees when the drone is directly above the tower.
    pub fn elevation_angle(&self, c: Cell, t: &Tower) -> f64 {
        let height = self.cell_side_m * c.z as f64;
        let theta = height.atan2(self.ground_distance(c, t));
        match self.params.elevation_unit {
            ElevationUnit::Degrees => theta.to_degrees(),
            ElevationUnit::Radians => theta,
        }
    }

    /// Line-of-sight probability for a given elevation angle (in the
    /// configured unit): `1 / (1 + alpha * exp(-beta * (theta - alpha)))`.
    pub fn los_probability_at_angle(&self, theta: f64) -> f64 {
        1.0 / (1.0 + self.params.alpha * (-self.params.beta * (theta - self.params.alpha)).exp())
    }

    /// Line-of-sight probability between `c` and `t`.
    pub fn los_probability(&self, c: Cell, t: &Tower) -> f64 {
        self.los_probability_at_angle(self.elevation_angle(c, t))
    }

    /// Link reliability: LoS probability times normalized received power,
    /// or 0 when the tower is outside the visibility square (no connection).
    pub fn link_reliability(&self, c: Cell, t: &Tower) -> f64 {
        if !is_visible(c, t) {
            return 0.0;
        }
        self.los_probability(c, t) * self.normalized_power(t, c)
    }
}
