//! Maximum-dependability path solver.
//!
//! Maximizing the product of edge probabilities is equivalent to minimizing
//! the sum of |log weight|, which is non-negative for weights in (0, 1], so
//! Dijkstra applies. Ties are broken by fewer edges, then by the
//! lexicographically smallest vertex sequence; the fewer-edges rule also
//! keeps returned paths simple in the presence of weight-1 edges.
//!
//! A solve mode can force any of the three probability factors to 1, which
//! degenerates the objective into minimum ground risk, maximum
//! connectivity, or minimum handover count.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{DependabilityGraph, EdgeWeight, VertexId};
use crate::grid::Cell;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolveError {
    #[error("at most two mode overrides may be active; overriding all three makes every path weight 1")]
    AllOverrides,
    #[error("edge weight {0} is outside (0, 1]")]
    InvalidWeight(f64),
    #[error("{which} cell {cell} is not a free cell of the environment")]
    UnknownEndpoint { which: &'static str, cell: Cell },
    #[error("path step {from:?} -> {to:?} has no stored edge")]
    MissingEdge { from: VertexId, to: VertexId },
}

/// Per-factor overrides applied on top of the stored edge weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveMode {
    /// Treat every ground-safeness factor as 1.
    pub override_gs: bool,
    /// Treat every link-reliability factor as 1.
    pub override_lr: bool,
    /// Treat the 1/2 handover edges as 1.
    pub override_hsr: bool,
}

impl SolveMode {
    pub fn full() -> Self {
        SolveMode::default()
    }

    pub fn validate(self) -> Result<(), SolveError> {
        if self.override_gs && self.override_lr && self.override_hsr {
            return Err(SolveError::AllOverrides);
        }
        Ok(())
    }
}

/// Named objectives exposed by the CLI, mapped onto factor overrides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlanMode {
    /// All three factors active.
    #[default]
    Full,
    /// Link reliability and handover rate forced to 1: minimum ground risk.
    MinRisk,
    /// Ground safeness forced to 1: best connectivity, handovers still paid.
    MaxConnectivity,
    /// Ground safeness and link reliability forced to 1: fewest handovers.
    MinHandover,
}

impl PlanMode {
    pub const ALL: [PlanMode; 4] = [
        PlanMode::Full,
        PlanMode::MinRisk,
        PlanMode::MaxConnectivity,
        PlanMode::MinHandover,
    ];

    pub fn mode(self) -> SolveMode {
        match self {
            PlanMode::Full => SolveMode::default(),
            PlanMode::MinRisk => SolveMode { override_lr: true, override_hsr: true, ..Default::default() },
            PlanMode::MaxConnectivity => SolveMode { override_gs: true, ..Default::default() },
            PlanMode::MinHandover => SolveMode { override_gs: true, override_lr: true, ..Default::default() },
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PlanMode::Full => "full",
            PlanMode::MinRisk => "min-risk",
            PlanMode::MaxConnectivity => "max-connectivity",
            PlanMode::MinHandover => "min-handover",
        }
    }
}

impl fmt::Display for PlanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlanMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(PlanMode::Full),
            "min-risk" => Ok(PlanMode::MinRisk),
            "max-connectivity" => Ok(PlanMode::MaxConnectivity),
            "min-handover" => Ok(PlanMode::MinHandover),
            other => Err(format!(
                "unknown mode {other:?}; expected full, min-risk, max-connectivity, or min-handover"
            )),
        }
    }
}

/// |log weight|, the Dijkstra edge cost. Zero exactly for weight 1.
pub fn log_cost(weight: f64) -> Result<f64, SolveError> {
    if !(weight > 0.0 && weight <= 1.0) {
        return Err(SolveError::InvalidWeight(weight));
    }
    Ok(weight.ln().abs())
}

/// The stored edge weight with the mode's factor overrides applied.
pub fn adjusted_weight(weight: EdgeWeight, mode: SolveMode) -> f64 {
    match weight {
        EdgeWeight::Handover { p_hsr } => {
            if mode.override_hsr {
                1.0
            } else {
                p_hsr
            }
        }
        EdgeWeight::Movement { p_lr, p_gs } => {
            let lr = if mode.override_lr { 1.0 } else { p_lr };
            let gs = if mode.override_gs { 1.0 } else { p_gs };
            lr * gs
        }
    }
}

/// A solved mission: the vertex sequence from the start cell vertex to the
/// goal cell vertex with the (mode-adjusted) weight of each traversed edge.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionPath {
    pub vertices: Vec<VertexId>,
    pub edge_weights: Vec<f64>,
    /// Product of the edge weights; 1 for the empty path.
    pub dependability: f64,
    /// Sum of |log weight| over the edges.
    pub log_cost: f64,
}

impl MissionPath {
    pub fn from_parts(vertices: Vec<VertexId>, edge_weights: Vec<f64>) -> Self {
        debug_assert_eq!(vertices.len(), edge_weights.len() + 1);
        let dependability: f64 = edge_weights.iter().product();
        let log_cost: f64 = edge_weights.iter().map(|w| w.ln().abs()).sum();
        debug_assert!(
            (dependability.ln().abs() - log_cost).abs() <= 1e-9 * log_cost.max(1.0),
            "log of the product drifted from the summed costs"
        );
        MissionPath { vertices, edge_weights, dependability, log_cost }
    }

    pub fn edge_count(&self) -> usize {
        self.edge_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_weights.is_empty()
    }

    /// Number of handovers: transitions from a cell vertex into a tower
    /// vertex, each priced 1/2 in the unmodified weights.
    pub fn handover_count(&self) -> usize {
        self.vertices
            .windows(2)
            .filter(|w| w[0].tower().is_none() && w[1].tower().is_some())
            .count()
    }

    /// The cell trajectory: consecutive duplicate cells collapsed.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out: Vec<Cell> = Vec::new();
        for v in &self.vertices {
            if out.last() != Some(&v.cell()) {
                out.push(v.cell());
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct HeapEntry {
    cost: f64,
    hops: u32,
    vertex: u32,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    // reversed: BinaryHeap is a max-heap, we want the smallest cost first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .partial_cmp(&self.cost)
            .expect("edge costs are finite")
            .then_with(|| other.hops.cmp(&self.hops))
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// Finds the maximum-dependability path from `start` to `goal` over the
/// mode-adjusted weights, or `None` when the goal is unreachable.
///
/// `start == goal` yields the empty path with dependability 1. Ties are
/// broken by fewer edges, then by the lexicographically smallest vertex
/// sequence, so repeated solves return the identical path.
pub fn solve(
    graph: &DependabilityGraph,
    start: Cell,
    goal: Cell,
    mode: SolveMode,
) -> Result<Option<MissionPath>, SolveError> {
    mode.validate()?;
    let s = graph
        .cell_vertex(start)
        .ok_or(SolveError::UnknownEndpoint { which: "start", cell: start })?;
    let g = graph
        .cell_vertex(goal)
        .ok_or(SolveError::UnknownEndpoint { which: "goal", cell: goal })?;
    if s == g {
        return Ok(Some(MissionPath::from_parts(vec![VertexId::Cell(start)], Vec::new())));
    }

    let n = graph.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut hops = vec![u32::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[s as usize] = 0.0;
    hops[s as usize] = 0;
    heap.push(HeapEntry { cost: 0.0, hops: 0, vertex: s });

    while let Some(HeapEntry { cost, hops: k, vertex }) = heap.pop() {
        let v = vertex as usize;
        if cost > dist[v] || (cost == dist[v] && k > hops[v]) {
            continue; // stale entry
        }
        for e in graph.edges_of(vertex) {
            let w = adjusted_weight(e.weight, mode);
            let step = log_cost(w)?;
            let t = e.target as usize;
            let nd = cost + step;
            let nk = k + 1;
            if nd < dist[t] || (nd == dist[t] && nk < hops[t]) {
                dist[t] = nd;
                hops[t] = nk;
                heap.push(HeapEntry { cost: nd, hops: nk, vertex: e.target });
            }
        }
    }

    if !dist[g as usize].is_finite() {
        return Ok(None);
    }

    // Tight edges preserve both the optimal cost and the optimal hop count,
    // so every s -> g walk over them is an optimal path and all optimal
    // paths lie inside this DAG. Walking it greedily by smallest target
    // yields the lexicographically smallest optimal vertex sequence.
    let mut reverse_tight: Vec<Vec<u32>> = vec![Vec::new(); n];
    for u in 0..n {
        if !dist[u].is_finite() {
            continue;
        }
        for e in graph.edges_of(u as u32) {
            let w = adjusted_weight(e.weight, mode);
            let step = log_cost(w)?;
            let t = e.target as usize;
            if dist[u] + step == dist[t] && hops[u] + 1 == hops[t] {
                reverse_tight[t].push(u as u32);
            }
        }
    }
    let mut reaches_goal = vec![false; n];
    let mut stack = vec![g];
    reaches_goal[g as usize] = true;
    while let Some(v) = stack.pop() {
        for &u in &reverse_tight[v as usize] {
            if !reaches_goal[u as usize] {
                reaches_goal[u as usize] = true;
                stack.push(u);
            }
        }
    }

    let mut vertices = vec![graph.vertex_id(s)];
    let mut weights = Vec::new();
    let mut cur = s as usize;
    while cur != g as usize {
        let mut chosen = None;
        for e in graph.edges_of(cur as u32) {
            let w = adjusted_weight(e.weight, mode);
            let step = log_cost(w)?;
            let t = e.target as usize;
            if reaches_goal[t] && dist[cur] + step == dist[t] && hops[cur] + 1 == hops[t] {
                chosen = Some((t, w));
                break; // adjacency is sorted by target, first hit is smallest
            }
        }
        let (t, w) = chosen.expect("a tight edge towards the goal exists");
        vertices.push(graph.vertex_id(t as u32));
        weights.push(w);
        cur = t;
    }
    Ok(Some(MissionPath::from_parts(vertices, weights)))
}

/// Recomputes a path's dependability from the stored graph edges under the
/// given mode, verifying that every step uses an existing edge.
pub fn path_dependability(
    graph: &DependabilityGraph,
    path: &MissionPath,
    mode: SolveMode,
) -> Result<f64, SolveError> {
    let mut product = 1.0;
    for pair in path.vertices.windows(2) {
        let (from, to) = (pair[0], pair[1]);
        let missing = SolveError::MissingEdge { from, to };
        let src = graph.vertex_index(from).ok_or_else(|| missing.clone())?;
        let dst = graph.vertex_index(to).ok_or_else(|| missing.clone())?;
        let edge = graph.edge_between(src, dst).ok_or(missing)?;
        product *= adjusted_weight(edge.weight, mode);
    }
    Ok(product)
}
