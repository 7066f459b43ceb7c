//! Discretized 3D airspace: the environment box, its cubic cells, and the
//! obstacle / no-fly layers that remove cells from the flyable volume.
//!
//! Coordinates are 1-based. Cell `(x, y, 1)` is the lowest flyable level and
//! its center sits one cell side above the ground; cell `z` spans the
//! altitude interval `(side * (z - 1), side * z]`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Errors raised by box construction and layer application.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GridError {
    #[error("{axis} must be positive")]
    NonPositive { axis: &'static str },
    #[error("{axis} not divisible by cell side")]
    NotDivisible { axis: &'static str },
    #[error("layer is {got_n}x{got_m} but the box footprint is {want_n}x{want_m}")]
    ShapeMismatch {
        got_n: usize,
        got_m: usize,
        want_n: usize,
        want_m: usize,
    },
    #[error("row {row} has {got} entries, expected {want}")]
    RaggedRows { row: usize, got: usize, want: usize },
    #[error("cell {cell} is outside the {n}x{m}x{h} box")]
    OutOfBounds {
        cell: Cell,
        n: usize,
        m: usize,
        h: usize,
    },
    #[error("cell {cell} is not free")]
    NotFree { cell: Cell },
    #[error("obstacle height at [{x},{y}] is negative ({value})")]
    NegativeHeight { x: usize, y: usize, value: f64 },
}

/// A cell of the discretized box, addressed by 1-based grid coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl Cell {
    pub const fn new(x: usize, y: usize, z: usize) -> Self {
        Cell { x, y, z }
    }

    /// Ground-level cell of the same column.
    pub const fn ground(self) -> Cell {
        Cell { x: self.x, y: self.y, z: 1 }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

impl FromStr for Cell {
    type Err = String;

    /// Parses `"x,y,z"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected x,y,z, got {s:?}"));
        }
        let coord = |i: usize| -> Result<usize, String> {
            parts[i]
                .parse::<usize>()
                .map_err(|e| format!("bad coordinate {:?}: {e}", parts[i]))
        };
        let (x, y, z) = (coord(0)?, coord(1)?, coord(2)?);
        if x == 0 || y == 0 || z == 0 {
            return Err(format!("coordinates are 1-based, got {s:?}"));
        }
        Ok(Cell { x, y, z })
    }
}

/// Dense 2D grid indexed by 1-based `(x, y)`, row-major in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D<T> {
    n: usize,
    m: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid2D<T> {
    pub fn filled(n: usize, m: usize, value: T) -> Self {
        Grid2D { n, m, data: vec![value; n * m] }
    }

    /// Builds a grid from `n` rows of `m` entries each.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, GridError> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * m);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != m {
                return Err(GridError::RaggedRows { row: i + 1, got: row.len(), want: m });
            }
            data.extend(row);
        }
        Ok(Grid2D { n, m, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn get(&self, x: usize, y: usize) -> &T {
        debug_assert!(x >= 1 && x <= self.n && y >= 1 && y <= self.m);
        &self.data[(x - 1) * self.m + (y - 1)]
    }

    pub fn set(&mut self, x: usize, y: usize, value: T) {
        debug_assert!(x >= 1 && x <= self.n && y >= 1 && y <= self.m);
        self.data[(x - 1) * self.m + (y - 1)] = value;
    }

    /// Row `x` as a slice of `m` entries.
    pub fn row(&self, x: usize) -> &[T] {
        &self.data[(x - 1) * self.m..(x - 1) * self.m + self.m]
    }

    /// All `(x, y, value)` triples in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> + '_ {
        self.data
            .iter()
            .enumerate()
            .map(move |(i, v)| (i / self.m + 1, i % self.m + 1, v))
    }
}

/// Heights of solid obstacles per ground column, in meters. Zero means no
/// obstacle; values above the box height block the full column.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleLayer {
    heights: Grid2D<f64>,
}

impl ObstacleLayer {
    pub fn new(heights: Grid2D<f64>) -> Result<Self, GridError> {
        for (x, y, &v) in heights.iter() {
            if v < 0.0 {
                return Err(GridError::NegativeHeight { x, y, value: v });
            }
        }
        Ok(ObstacleLayer { heights })
    }

    pub fn none(n: usize, m: usize) -> Self {
        ObstacleLayer { heights: Grid2D::filled(n, m, 0.0) }
    }

    pub fn heights(&self) -> &Grid2D<f64> {
        &self.heights
    }
}

/// Columns where flight is forbidden at any height.
#[derive(Debug, Clone, PartialEq)]
pub struct NoFlyLayer {
    mask: Grid2D<bool>,
}

impl NoFlyLayer {
    pub fn new(mask: Grid2D<bool>) -> Self {
        NoFlyLayer { mask }
    }

    pub fn none(n: usize, m: usize) -> Self {
        NoFlyLayer { mask: Grid2D::filled(n, m, false) }
    }

    pub fn mask(&self) -> &Grid2D<bool> {
        &self.mask
    }
}

/// The discretized airspace: a box of `n * m * h` cubic cells of side
/// `cell_side_m`, with a free/blocked mask per cell.
///
/// Immutable once the layers have been applied; safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentBox {
    length_m: f64,
    width_m: f64,
    height_m: f64,
    cell_side_m: f64,
    n: usize,
    m: usize,
    h: usize,
    free: Vec<bool>,
}

/// Relative tolerance for the exact-divisibility check on box dimensions.
const DIVISIBILITY_TOL: f64 = 1e-9;

fn axis_cells(axis: &'static str, dim: f64, side: f64) -> Result<usize, GridError> {
    if !(dim > 0.0) {
        return Err(GridError::NonPositive { axis });
    }
    let ratio = dim / side;
    let k = ratio.round();
    if k < 1.0 || (ratio - k).abs() > DIVISIBILITY_TOL * ratio.max(1.0) {
        return Err(GridError::NotDivisible { axis });
    }
    Ok(k as usize)
}

impl EnvironmentBox {
    /// Creates a box with every cell free.
    ///
    /// Each dimension must divide exactly by the cell side; silent rounding
    /// would change the airspace.
    pub fn new(
        length_m: f64,
        width_m: f64,
        height_m: f64,
        cell_side_m: f64,
    ) -> Result<Self, GridError> {
        if !(cell_side_m > 0.0) {
            return Err(GridError::NonPositive { axis: "cell side" });
        }
        let n = axis_cells("length", length_m, cell_side_m)?;
        let m = axis_cells("width", width_m, cell_side_m)?;
        let h = axis_cells("height", height_m, cell_side_m)?;
        Ok(EnvironmentBox {
            length_m,
            width_m,
            height_m,
            cell_side_m,
            n,
            m,
            h,
            free: vec![true; n * m * h],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n, self.m, self.h)
    }

    pub fn cell_side_m(&self) -> f64 {
        self.cell_side_m
    }

    pub fn length_m(&self) -> f64 {
        self.length_m
    }

    pub fn width_m(&self) -> f64 {
        self.width_m
    }

    pub fn height_m(&self) -> f64 {
        self.height_m
    }

    fn check_shape(&self, got: (usize, usize)) -> Result<(), GridError> {
        if got != (self.n, self.m) {
            return Err(GridError::ShapeMismatch {
                got_n: got.0,
                got_m: got.1,
                want_n: self.n,
                want_m: self.m,
            });
        }
        Ok(())
    }

    /// Linear index of a cell in canonical `(x, y, z)` lexicographic order.
    fn index(&self, c: Cell) -> usize {
        ((c.x - 1) * self.m + (c.y - 1)) * self.h + (c.z - 1)
    }

    pub fn contains(&self, c: Cell) -> bool {
        (1..=self.n).contains(&c.x) && (1..=self.m).contains(&c.y) && (1..=self.h).contains(&c.z)
    }

    pub fn is_free(&self, c: Cell) -> bool {
        self.contains(c) && self.free[self.index(c)]
    }

    /// Removes every cell whose vertical span intersects an obstacle: cell
    /// `z` is blocked iff the obstacle height strictly exceeds the cell's
    /// floor `side * (z - 1)`.
    pub fn apply_obstacles(mut self, layer: &ObstacleLayer) -> Result<Self, GridError> {
        self.check_shape(layer.heights.shape())?;
        for (x, y, &height) in layer.heights.iter() {
            for z in 1..=self.h {
                if height > self.cell_side_m * (z - 1) as f64 {
                    let idx = self.index(Cell::new(x, y, z));
                    self.free[idx] = false;
                }
            }
        }
        Ok(self)
    }

    /// Removes every cell of each masked column; no-fly zones are effective
    /// at any height.
    pub fn apply_nofly(mut self, layer: &NoFlyLayer) -> Result<Self, GridError> {
        self.check_shape(layer.mask.shape())?;
        for (x, y, &forbidden) in layer.mask.iter() {
            if forbidden {
                for z in 1..=self.h {
                    let idx = self.index(Cell::new(x, y, z));
                    self.free[idx] = false;
                }
            }
        }
        Ok(self)
    }

    /// All free cells in canonical `(x, y, z)` order.
    pub fn free_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (1..=self.n).flat_map(move |x| {
            (1..=self.m).flat_map(move |y| {
                (1..=self.h)
                    .map(move |z| Cell::new(x, y, z))
                    .filter(move |&c| self.free[self.index(c)])
            })
        })
    }

    pub fn free_cell_count(&self) -> usize {
        self.free.iter().filter(|&&f| f).count()
    }

    /// Free ground-level cells, canonical order.
    pub fn free_ground_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.free_cells().filter(|c| c.z == 1)
    }

    /// The free 26-neighborhood of `c`: every free cell differing by at most
    /// one step per axis, in canonical order.
    pub fn adjacent(&self, c: Cell) -> Result<Vec<Cell>, GridError> {
        if !self.contains(c) {
            return Err(GridError::OutOfBounds { cell: c, n: self.n, m: self.m, h: self.h });
        }
        if !self.is_free(c) {
            return Err(GridError::NotFree { cell: c });
        }
        let mut neighbors = Vec::with_capacity(26);
        for x in c.x.saturating_sub(1).max(1)..=(c.x + 1).min(self.n) {
            for y in c.y.saturating_sub(1).max(1)..=(c.y + 1).min(self.m) {
                for z in c.z.saturating_sub(1).max(1)..=(c.z + 1).min(self.h) {
                    let cand = Cell::new(x, y, z);
                    if cand != c && self.free[self.index(cand)] {
                        neighbors.push(cand);
                    }
                }
            }
        }
        Ok(neighbors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn box_dimensions_follow_from_cell_side() {
        let env = EnvironmentBox::new(100.0, 100.0, 40.0, 20.0).unwrap();
        assert_eq!(env.dims(), (5, 5, 2));
        assert_eq!(env.free_cell_count(), 50);

        let env = EnvironmentBox::new(1200.0, 800.0, 120.0, 40.0).unwrap();
        assert_eq!(env.dims(), (30, 20, 3));
    }

    #[test]
    fn non_divisible_dimension_names_axis() {
        let err = EnvironmentBox::new(100.0, 100.0, 40.0, 30.0).unwrap_err();
        assert_eq!(err, GridError::NotDivisible { axis: "length" });
        assert_eq!(err.to_string(), "length not divisible by cell side");

        let err = EnvironmentBox::new(90.0, 100.0, 40.0, 30.0).unwrap_err();
        assert_eq!(err, GridError::NotDivisible { axis: "width" });
    }

    #[test]
    fn non_positive_arguments_are_rejected() {
        assert_eq!(
            EnvironmentBox::new(0.0, 100.0, 40.0, 20.0).unwrap_err(),
            GridError::NonPositive { axis: "length" }
        );
        assert_eq!(
            EnvironmentBox::new(100.0, 100.0, 40.0, 0.0).unwrap_err(),
            GridError::NonPositive { axis: "cell side" }
        );
        assert_eq!(
            EnvironmentBox::new(100.0, -5.0, 40.0, 20.0).unwrap_err(),
            GridError::NonPositive { axis: "width" }
        );
    }

    #[test]
    fn obstacle_blocks_every_cell_it_intrudes_into() {
        // side 20, 3 levels: height 25 blocks z=1 (25 > 0) and z=2 (25 > 20),
        // leaves z=3 free (25 <= 40).
        let env = EnvironmentBox::new(60.0, 60.0, 60.0, 20.0).unwrap();
        let mut heights = Grid2D::filled(3, 3, 0.0);
        heights.set(2, 2, 25.0);
        let env = env.apply_obstacles(&ObstacleLayer::new(heights).unwrap()).unwrap();
        assert!(!env.is_free(Cell::new(2, 2, 1)));
        assert!(!env.is_free(Cell::new(2, 2, 2)));
        assert!(env.is_free(Cell::new(2, 2, 3)));
        // untouched column stays fully free
        assert!(env.is_free(Cell::new(1, 1, 1)));
        assert_eq!(env.free_cell_count(), 27 - 2);
    }

    #[test]
    fn full_height_obstacle_blocks_whole_column() {
        let env = EnvironmentBox::new(40.0, 40.0, 40.0, 20.0).unwrap();
        let mut heights = Grid2D::filled(2, 2, 0.0);
        heights.set(1, 2, 40.0);
        let env = env.apply_obstacles(&ObstacleLayer::new(heights).unwrap()).unwrap();
        assert!(!env.is_free(Cell::new(1, 2, 1)));
        assert!(!env.is_free(Cell::new(1, 2, 2)));
    }

    #[test]
    fn zero_height_leaves_column_free() {
        let env = EnvironmentBox::new(40.0, 40.0, 40.0, 20.0).unwrap();
        let env = env.apply_obstacles(&ObstacleLayer::none(2, 2)).unwrap();
        assert_eq!(env.free_cell_count(), 8);
    }

    #[test]
    fn negative_obstacle_height_is_rejected() {
        let mut heights = Grid2D::filled(2, 2, 0.0);
        heights.set(2, 1, -1.0);
        assert_eq!(
            ObstacleLayer::new(heights).unwrap_err(),
            GridError::NegativeHeight { x: 2, y: 1, value: -1.0 }
        );
    }

    #[test]
    fn nofly_column_is_removed_at_every_height() {
        let env = EnvironmentBox::new(60.0, 60.0, 60.0, 20.0).unwrap();
        let mut mask = Grid2D::filled(3, 3, false);
        mask.set(2, 3, true);
        let env = env.apply_nofly(&NoFlyLayer::new(mask)).unwrap();
        for z in 1..=3 {
            assert!(!env.is_free(Cell::new(2, 3, z)));
        }
        assert_eq!(env.free_cell_count(), 27 - 3);
    }

    #[test]
    fn all_true_nofly_mask_removes_everything() {
        let env = EnvironmentBox::new(40.0, 40.0, 20.0, 20.0).unwrap();
        let env = env.apply_nofly(&NoFlyLayer::new(Grid2D::filled(2, 2, true))).unwrap();
        assert_eq!(env.free_cell_count(), 0);
    }

    #[test]
    fn layer_shape_mismatch_is_rejected() {
        let env = EnvironmentBox::new(40.0, 40.0, 20.0, 20.0).unwrap();
        let err = env.clone().apply_nofly(&NoFlyLayer::none(3, 2)).unwrap_err();
        assert_eq!(
            err,
            GridError::ShapeMismatch { got_n: 3, got_m: 2, want_n: 2, want_m: 2 }
        );
        assert!(env.apply_obstacles(&ObstacleLayer::none(2, 3)).is_err());
    }

    #[test]
    fn interior_cell_has_26_neighbors() {
        let env = EnvironmentBox::new(60.0, 60.0, 60.0, 20.0).unwrap();
        let adj = env.adjacent(Cell::new(2, 2, 2)).unwrap();
        assert_eq!(adj.len(), 26);
    }

    #[test]
    fn corner_cell_has_7_neighbors() {
        let env = EnvironmentBox::new(60.0, 60.0, 60.0, 20.0).unwrap();
        let adj = env.adjacent(Cell::new(1, 1, 1)).unwrap();
        assert_eq!(adj.len(), 7);
    }

    #[test]
    fn surrounded_cell_has_no_neighbors() {
        let env = EnvironmentBox::new(60.0, 60.0, 20.0, 20.0).unwrap();
        // block everything except the center of the 3x3 ground plane
        let mut heights = Grid2D::filled(3, 3, 20.0);
        heights.set(2, 2, 0.0);
        let env = env.apply_obstacles(&ObstacleLayer::new(heights).unwrap()).unwrap();
        assert_eq!(env.adjacent(Cell::new(2, 2, 1)).unwrap(), vec![]);
    }

    #[test]
    fn adjacent_rejects_bad_cells() {
        let env = EnvironmentBox::new(40.0, 40.0, 20.0, 20.0).unwrap();
        assert!(matches!(
            env.adjacent(Cell::new(3, 1, 1)),
            Err(GridError::OutOfBounds { .. })
        ));
        let mut mask = Grid2D::filled(2, 2, false);
        mask.set(1, 1, true);
        let env = env.apply_nofly(&NoFlyLayer::new(mask)).unwrap();
        assert_eq!(
            env.adjacent(Cell::new(1, 1, 1)).unwrap_err(),
            GridError::NotFree { cell: Cell::new(1, 1, 1) }
        );
    }

    #[test]
    fn cell_parses_from_comma_triple() {
        assert_eq!("3,4,1".parse::<Cell>().unwrap(), Cell::new(3, 4, 1));
        assert_eq!(" 3 , 4 , 1 ".parse::<Cell>().unwrap(), Cell::new(3, 4, 1));
        assert!("3,4".parse::<Cell>().is_err());
        assert!("0,4,1".parse::<Cell>().is_err());
        assert!("a,4,1".parse::<Cell>().is_err());
    }

    /// Random small environment with obstacle and no-fly layers applied.
    fn arb_env() -> impl Strategy<Value = EnvironmentBox> {
        (2usize..=4, 2usize..=4, 1usize..=3, proptest::collection::vec(0.0f64..60.0, 16), any::<u32>())
            .prop_map(|(n, m, h, raw, noflyseed)| {
                let side = 20.0;
                let env = EnvironmentBox::new(
                    n as f64 * side,
                    m as f64 * side,
                    h as f64 * side,
                    side,
                )
                .unwrap();
                let mut heights = Grid2D::filled(n, m, 0.0);
                let mut mask = Grid2D::filled(n, m, false);
                let mut k = 0;
                for x in 1..=n {
                    for y in 1..=m {
                        heights.set(x, y, raw[k % raw.len()]);
                        mask.set(x, y, (noflyseed >> (k % 32)) & 1 == 1 && k % 5 == 0);
                        k += 1;
                    }
                }
                env.apply_obstacles(&ObstacleLayer::new(heights).unwrap())
                    .unwrap()
                    .apply_nofly(&NoFlyLayer::new(mask))
                    .unwrap()
            })
    }

    proptest! {
        #[test]
        fn adjacency_is_symmetric_bounded_and_free(env in arb_env()) {
            let free: Vec<Cell> = env.free_cells().collect();
            prop_assert!(free.len() <= env.n() * env.m() * env.h());
            for &c in &free {
                let adj = env.adjacent(c).unwrap();
                prop_assert!(adj.len() <= 26);
                for &c2 in &adj {
                    prop_assert!(c2 != c);
                    prop_assert!(env.is_free(c2));
                    prop_assert!(env.adjacent(c2).unwrap().contains(&c));
                }
            }
        }

        #[test]
        fn layer_application_is_idempotent_and_commutes(
            n in 2usize..=4, m in 2usize..=4, h in 1usize..=2,
            hs in proptest::collection::vec(0.0f64..50.0, 16),
            bits in any::<u16>(),
        ) {
            let side = 20.0;
            let fresh = || EnvironmentBox::new(n as f64 * side, m as f64 * side, h as f64 * side, side).unwrap();
            let mut heights = Grid2D::filled(n, m, 0.0);
            let mut mask = Grid2D::filled(n, m, false);
            let mut k = 0;
            for x in 1..=n {
                for y in 1..=m {
                    heights.set(x, y, hs[k % hs.len()]);
                    mask.set(x, y, (bits >> (k % 16)) & 1 == 1);
                    k += 1;
                }
            }
            let obstacles = ObstacleLayer::new(heights).unwrap();
            let nofly = NoFlyLayer::new(mask);

            let once = fresh().apply_obstacles(&obstacles).unwrap().apply_nofly(&nofly).unwrap();
            let twice = once
                .clone()
                .apply_obstacles(&obstacles).unwrap()
                .apply_nofly(&nofly).unwrap();
            let swapped = fresh().apply_nofly(&nofly).unwrap().apply_obstacles(&obstacles).unwrap();
            prop_assert_eq!(&once, &twice);
            prop_assert_eq!(&once, &swapped);
        }
    }
}
