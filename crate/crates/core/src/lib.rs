//! Mission planning for cellular-connected drones flying beyond visual line
//! of sight.
//!
//! The library models a bounded 3D airspace as a lattice of cubic cells,
//! layers obstacles, no-fly zones, cellular towers, and ground risk on top of
//! it, and compiles everything into a weighted directed graph whose edge
//! weights are probabilities: link reliability and ground safeness for
//! movements, handover success for tower changes. The dependability of a
//! mission is the product of the edge weights along its path, and the best
//! mission is found by minimizing the sum of |log weight| with Dijkstra.
//!
//! Modules:
//! - [`grid`]: the environment box, cells, obstacle and no-fly layers
//! - [`radio`]: received power, line-of-sight probability, link reliability,
//!   tower visibility
//! - [`risk`]: ground-risk maps and ground safeness
//! - [`graph`]: construction of the dependability graph
//! - [`solver`]: the max-dependability path solver and its mode overrides
//! - [`oracle`]: brute-force reference solver for small graphs
//! - [`scenario`]: scenario file parsing, validation, and serialization
//! - [`generate`]: seeded synthetic scenario generation
//! - [`report`]: planning driver, reports, and plot-data export

pub mod generate;
pub mod graph;
pub mod grid;
pub mod oracle;
pub mod radio;
pub mod report;
pub mod risk;
pub mod scenario;
pub mod solver;

pub use graph::{build_graph, DependabilityGraph, Edge, EdgeKind, EdgeWeight, VertexId};
pub use grid::{Cell, EnvironmentBox, Grid2D, GridError, NoFlyLayer, ObstacleLayer};
pub use oracle::{exhaustive_best, OracleError, OracleResult, DEFAULT_VERTEX_BUDGET};
pub use radio::{visible_towers, RadioModel, RadioParams, Tower};
pub use risk::{GroundRisk, RiskFactorLayers};
pub use scenario::{load_scenario, save_scenario, Scenario};
pub use solver::{solve, MissionPath, PlanMode, SolveError, SolveMode};
