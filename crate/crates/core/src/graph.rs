//! Construction of the dependability graph.
//!
//! Every free cell `c` contributes a cell vertex `v_c`; every tower `t`
//! visible from `c` contributes a tower vertex `v_c^t`. Intra-edges connect
//! `v_c` and `v_c^t` within one cell and price the handover (1/2 into the
//! tower vertex, 1 back). Inter-edges connect same-tower vertices of
//! adjacent cells and price the movement with the link reliability and
//! ground safeness of the destination cell. Tower changes always detour
//! through the cell vertex, so a handover is paid exactly once.

use std::collections::HashMap;
use std::io::{self, Write};

use thiserror::Error;

use crate::grid::{Cell, EnvironmentBox};
use crate::radio::{is_visible, visible_towers, RadioModel, RadioParams, Tower};
use crate::risk::GroundRisk;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GraphError {
    #[error("vertex {0:?} is not in the graph")]
    UnknownVertex(VertexId),
}

/// Identity of a graph vertex. Cell vertices sort before tower vertices and
/// both sort by cell in row-major `(x, y, z)` order; tower vertices then by
/// tower index. Vertex indices follow this order, which makes solver
/// tie-breaking reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexId {
    /// The drone occupies `cell` without an active tower association.
    Cell(Cell),
    /// The drone occupies `cell` connected to the tower with this index.
    Tower(Cell, usize),
}

impl VertexId {
    pub fn cell(&self) -> Cell {
        match *self {
            VertexId::Cell(c) => c,
            VertexId::Tower(c, _) => c,
        }
    }

    pub fn tower(&self) -> Option<usize> {
        match *self {
            VertexId::Cell(_) => None,
            VertexId::Tower(_, t) => Some(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Intra,
    Inter,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Intra => "intra",
            EdgeKind::Inter => "inter",
        }
    }
}

/// Edge weight with its probability factors kept separate, so that solve
/// modes can override individual factors without re-deriving them from the
/// layers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeWeight {
    /// Intra-edge: handover success rate, 1/2 into a tower vertex and 1 back
    /// to the cell vertex.
    Handover { p_hsr: f64 },
    /// Inter-edge: link reliability and ground safeness of the destination
    /// cell.
    Movement { p_lr: f64, p_gs: f64 },
}

impl EdgeWeight {
    pub fn kind(&self) -> EdgeKind {
        match self {
            EdgeWeight::Handover { .. } => EdgeKind::Intra,
            EdgeWeight::Movement { .. } => EdgeKind::Inter,
        }
    }

    /// The unmodified edge probability.
    pub fn value(&self) -> f64 {
        match *self {
            EdgeWeight::Handover { p_hsr } => p_hsr,
            EdgeWeight::Movement { p_lr, p_gs } => p_lr * p_gs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub target: u32,
    pub weight: EdgeWeight,
}

/// Size bounds implied by the construction, used as hard build invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphBounds {
    pub vertex_bound: usize,
    pub edge_bound: usize,
}

impl GraphBounds {
    /// At level `i` a cell can see at most `(1 + 2i)^2` towers; vertices are
    /// bounded by `nmh` cells plus that many tower vertices per level, edges
    /// by two intra-edges per tower vertex plus 26 inter-edges per tower
    /// vertex, doubled for direction.
    pub fn for_dims(n: usize, m: usize, h: usize) -> Self {
        let tower_sum: usize = (1..=h).map(|i| (1 + 2 * i) * (1 + 2 * i)).sum();
        let vertex_bound = n * m * h + tower_sum * n * m;
        let edge_bound = 2 * tower_sum * n * m + 2 * 26 * tower_sum * n * m;
        GraphBounds { vertex_bound, edge_bound }
    }
}

/// The weighted directed graph over cell and tower vertices.
///
/// Immutable once built; adjacency lists are sorted by target index so that
/// iteration order, and everything derived from it, is deterministic.
#[derive(Debug, Clone)]
pub struct DependabilityGraph {
    vertices: Vec<VertexId>,
    index: HashMap<VertexId, u32>,
    adjacency: Vec<Vec<Edge>>,
    edge_count: usize,
    tower_ids: Vec<String>,
    dims: (usize, usize, usize),
    bounds: GraphBounds,
}

impl DependabilityGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn vertex_id(&self, ix: u32) -> VertexId {
        self.vertices[ix as usize]
    }

    pub fn vertex_index(&self, id: VertexId) -> Option<u32> {
        self.index.get(&id).copied()
    }

    /// Index of the cell vertex for `c`, present iff `c` is free.
    pub fn cell_vertex(&self, c: Cell) -> Option<u32> {
        self.vertex_index(VertexId::Cell(c))
    }

    /// Outgoing edges of a vertex, sorted by target index.
    pub fn out_edges(&self, v: VertexId) -> Result<&[Edge], GraphError> {
        let ix = self.vertex_index(v).ok_or(GraphError::UnknownVertex(v))?;
        Ok(self.edges_of(ix))
    }

    /// Outgoing edges by vertex index. Panics on an out-of-range index.
    pub fn edges_of(&self, ix: u32) -> &[Edge] {
        &self.adjacency[ix as usize]
    }

    /// The edge from `src` to `dst`, if present.
    pub fn edge_between(&self, src: u32, dst: u32) -> Option<&Edge> {
        let list = self.edges_of(src);
        list.binary_search_by_key(&dst, |e| e.target)
            .ok()
            .map(|i| &list[i])
    }

    pub fn tower_count(&self) -> usize {
        self.tower_ids.len()
    }

    pub fn tower_id(&self, ix: usize) -> &str {
        &self.tower_ids[ix]
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn bounds(&self) -> GraphBounds {
        self.bounds
    }

    /// Writes the line-oriented text dump: one `vertex` line per vertex in
    /// index order, then one `edge` line per directed edge, weights at full
    /// round-trip precision.
    pub fn dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (ix, v) in self.vertices.iter().enumerate() {
            let c = v.cell();
            match v.tower() {
                None => writeln!(out, "vertex {ix} cell {} {} {}", c.x, c.y, c.z)?,
                Some(t) => writeln!(
                    out,
                    "vertex {ix} tower {} {} {} {}",
                    c.x,
                    c.y,
                    c.z,
                    self.tower_ids[t]
                )?,
            }
        }
        for (src, edges) in self.adjacency.iter().enumerate() {
            for e in edges {
                writeln!(
                    out,
                    "edge {src} {} {} {}",
                    e.target,
                    e.weight.value(),
                    e.weight.kind().as_str()
                )?;
            }
        }
        Ok(())
    }

    /// Test-only hook: shuffles every adjacency list. Breaks the sorted-
    /// target invariant, so only order-insensitive consumers (the oracle)
    /// may be used afterwards.
    #[cfg(test)]
    pub(crate) fn scramble_adjacency_for_tests(&mut self, rng: &mut impl rand::Rng) {
        use rand::seq::SliceRandom;
        for list in &mut self.adjacency {
            list.shuffle(rng);
        }
    }
}

/// Builds the dependability graph from the validated environment, towers,
/// radio parameters, and ground-risk layer.
///
/// Preconditions (enforced by scenario validation): towers sit on distinct
/// free ground cells inside the footprint, and the risk layer matches the
/// footprint. Edges whose probability is zero are omitted; they can never
/// lie on a maximum-dependability path and would break the log transform.
pub fn build_graph(
    env: &EnvironmentBox,
    towers: &[Tower],
    params: &RadioParams,
    risk: &GroundRisk,
) -> DependabilityGraph {
    let (n, m, h) = env.dims();
    debug_assert_eq!(risk.shape(), (n, m));
    debug_assert!(towers.iter().all(|t| env.is_free(t.cell())));
    debug_assert!({
        let mut cells: Vec<(usize, usize)> = towers.iter().map(|t| (t.x, t.y)).collect();
        cells.sort_unstable();
        cells.windows(2).all(|w| w[0] != w[1])
    });

    let radio = RadioModel::new(*params, env.cell_side_m());
    let free: Vec<Cell> = env.free_cells().collect();
    let visible: Vec<Vec<usize>> = free.iter().map(|&c| visible_towers(c, towers)).collect();

    let mut vertices: Vec<VertexId> = free.iter().map(|&c| VertexId::Cell(c)).collect();
    for (ci, &c) in free.iter().enumerate() {
        vertices.extend(visible[ci].iter().map(|&t| VertexId::Tower(c, t)));
    }
    debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
    let index: HashMap<VertexId, u32> = vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as u32))
        .collect();

    let mut adjacency: Vec<Vec<Edge>> = vec![Vec::new(); vertices.len()];
    let mut edge_count = 0usize;

    // intra-edges: cell vertex <-> tower vertex, per visible tower
    for (ci, &c) in free.iter().enumerate() {
        let vc = index[&VertexId::Cell(c)];
        for &t in &visible[ci] {
            let vct = index[&VertexId::Tower(c, t)];
            adjacency[vc as usize].push(Edge {
                target: vct,
                weight: EdgeWeight::Handover { p_hsr: 0.5 },
            });
            adjacency[vct as usize].push(Edge {
                target: vc,
                weight: EdgeWeight::Handover { p_hsr: 1.0 },
            });
            edge_count += 2;
        }
    }

    // inter-edges: same tower, adjacent cells, weighted by the destination
    // cell. Each ordered cell pair is visited exactly once, so each directed
    // edge is inserted exactly once.
    for (ci, &c) in free.iter().enumerate() {
        let neighbors = env.adjacent(c).expect("free cell");
        for c2 in neighbors {
            for &t in &visible[ci] {
                if !is_visible(c2, &towers[t]) {
                    continue;
                }
                let p_lr = radio.link_reliability(c2, &towers[t]);
                let p_gs = risk.ground_safeness(c2);
                if p_lr * p_gs > 0.0 {
                    let src = index[&VertexId::Tower(c, t)];
                    let dst = index[&VertexId::Tower(c2, t)];
                    adjacency[src as usize].push(Edge {
                        target: dst,
                        weight: EdgeWeight::Movement { p_lr, p_gs },
                    });
                    edge_count += 1;
                }
            }
        }
    }

    debug_assert!(adjacency
        .iter()
        .all(|list| list.windows(2).all(|w| w[0].target < w[1].target)));

    let bounds = GraphBounds::for_dims(n, m, h);
    assert!(
        vertices.len() <= bounds.vertex_bound,
        "vertex count {} exceeds the structural bound {}",
        vertices.len(),
        bounds.vertex_bound
    );
    assert!(
        edge_count <= bounds.edge_bound,
        "edge count {edge_count} exceeds the structural bound {}",
        bounds.edge_bound
    );

    DependabilityGraph {
        vertices,
        index,
        adjacency,
        edge_count,
        tower_ids: towers.iter().map(|t| t.id.clone()).collect(),
        dims: (n, m, h),
        bounds,
    }
}
