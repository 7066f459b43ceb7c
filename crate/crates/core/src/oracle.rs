//! Brute-force reference solver.
//!
//! Enumerates simple paths between two cell vertices depth-first and keeps
//! the maximum product of (mode-adjusted) edge weights. Because all weights
//! are at most 1, extending a path never increases its product, so the
//! optimum is attained on a simple path and prefixes that cannot strictly
//! beat the best found so far can be cut. Pruning additionally uses a
//! per-vertex upper bound on the product achievable towards the goal
//! (exact over unconstrained walks, hence admissible for visited-avoiding
//! completions), and branches whose greedy completion provably attains
//! their bound are closed after recording that completion as a real path.
//! The search shares the graph data with the solver but none of its
//! shortest-path logic: bounds come from product-semiring label-setting,
//! not from the log-cost Dijkstra.
//!
//! Values it reports are exact up to bound-table rounding (a few hundred
//! multiplications, far below the 1e-9 equivalence tolerance used by the
//! verification suites).

use thiserror::Error;

use crate::graph::{DependabilityGraph, VertexId};
use crate::grid::Cell;
use crate::solver::{adjusted_weight, SolveError, SolveMode};

/// Default cap on the graph size accepted for exhaustive enumeration.
pub const DEFAULT_VERTEX_BUDGET: usize = 500;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OracleError {
    #[error(
        "graph has {vertices} vertices, more than the oracle budget of {budget}; refusing to enumerate"
    )]
    BudgetExceeded { vertices: usize, budget: usize },
    #[error("{which} cell {cell} is not a free cell of the environment")]
    UnknownEndpoint { which: &'static str, cell: Cell },
    #[error(transparent)]
    Mode(#[from] SolveError),
}

/// Outcome of an exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// The maximum product over all simple paths.
    pub best_dependability: f64,
    /// One path attaining the maximum (which one may depend on adjacency
    /// order; the value never does).
    pub best_path: Vec<VertexId>,
    /// Complete start-to-goal paths visited by the pruned search.
    pub paths_explored: u64,
}

/// Guidance tables for the search, all computed from the goal backwards
/// and independent of adjacency-list order.
struct Guidance {
    /// Maximum product achievable from each vertex towards the goal over
    /// unconstrained walks, which equals the simple-path maximum because
    /// removing a cycle divides by a factor of at most 1. Computed by
    /// label-setting on the product semiring (largest label settles first;
    /// valid since weights never exceed 1). Exactly 0 for vertices with no
    /// walk to the goal.
    bound: Vec<f64>,
    /// BFS hop distance to the goal (`u32::MAX` when unreachable).
    hops: Vec<u32>,
    /// The edge realizing each vertex's bound: target and adjusted weight,
    /// ties broken towards the smallest target.
    greedy: Vec<Option<(u32, f64)>>,
}

fn build_guidance(graph: &DependabilityGraph, mode: SolveMode, goal: u32) -> Guidance {
    let n = graph.vertex_count();
    let mut incoming: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for v in 0..n {
        for e in graph.edges_of(v as u32) {
            incoming[e.target as usize].push((v as u32, adjusted_weight(e.weight, mode)));
        }
    }

    let mut hops = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::from([goal]);
    hops[goal as usize] = 0;
    while let Some(v) = queue.pop_front() {
        for &(u, _) in &incoming[v as usize] {
            if hops[u as usize] == u32::MAX {
                hops[u as usize] = hops[v as usize] + 1;
                queue.push_back(u);
            }
        }
    }

    // backward label-setting: selection-based, no heap needed at this size
    let mut bound = vec![0.0f64; n];
    let mut settled = vec![false; n];
    bound[goal as usize] = 1.0;
    loop {
        let mut pick: Option<usize> = None;
        for v in 0..n {
            if !settled[v] && bound[v] > 0.0 && pick.is_none_or(|p| bound[v] > bound[p]) {
                pick = Some(v);
            }
        }
        let Some(v) = pick else { break };
        settled[v] = true;
        for &(u, w) in &incoming[v] {
            let candidate = w * bound[v];
            if !settled[u as usize] && candidate > bound[u as usize] {
                bound[u as usize] = candidate;
            }
        }
    }

    let mut greedy = vec![None; n];
    for v in 0..n {
        if v == goal as usize || bound[v] == 0.0 {
            continue;
        }
        let mut best: Option<(f64, u32, f64)> = None;
        for e in graph.edges_of(v as u32) {
            let w = adjusted_weight(e.weight, mode);
            let key = w * bound[e.target as usize];
            let better = match best {
                None => true,
                Some((k, t, _)) => key > k || (key == k && e.target < t),
            };
            if better {
                best = Some((key, e.target, w));
            }
        }
        greedy[v] = best.map(|(_, t, w)| (t, w));
    }

    Guidance { bound, hops, greedy }
}

/// Tolerance for accepting a realized greedy chain as attaining the bound;
/// covers the different multiplication orders of the chain walk and the
/// label table (well under this for budget-sized paths).
const CERTIFICATE_SLACK: f64 = 1.0 + 1e-12;

struct Search<'g> {
    graph: &'g DependabilityGraph,
    mode: SolveMode,
    goal: u32,
    guide: Guidance,
    visited: Vec<bool>,
    trail: Vec<u32>,
    best: f64,
    best_trail: Vec<u32>,
    paths: u64,
}

impl Search<'_> {
    /// Follows each vertex's bound-realizing edge from `v`. When the chain
    /// reaches the goal without touching the current path, its product is
    /// actually attained: the caller records it as a real path and, if it
    /// certifies `bound[v]`, closes the branch (nothing below `v` exceeds
    /// `product * bound[v]`). Returns the chain and its product, or `None`
    /// on a collision.
    fn realize_bound(&mut self, v: u32) -> Option<(Vec<u32>, f64)> {
        let mut chain = Vec::new();
        let mut product = 1.0f64;
        let mut cur = v;
        let outcome = loop {
            match self.guide.greedy[cur as usize] {
                None => break cur == self.goal,
                Some((target, w)) => {
                    if self.visited[target as usize] {
                        break false;
                    }
                    self.visited[target as usize] = true;
                    chain.push(target);
                    product *= w;
                    cur = target;
                    if cur == self.goal {
                        break true;
                    }
                    // plateaus of weight-1 edges can make the greedy table
                    // cycle; the visited marks above turn that into a
                    // collision, so the walk always terminates
                }
            }
        };
        for &u in &chain {
            self.visited[u as usize] = false;
        }
        outcome.then_some((chain, product))
    }

    fn dfs(&mut self, v: u32, product: f64) {
        if v == self.goal {
            self.paths += 1;
            if product > self.best {
                self.best = product;
                self.best_trail = self.trail.clone();
            }
            return;
        }
        // When the greedy completion is collision-free it is a real path;
        // record it, and when its product certifies the branch's upper
        // bound, stop expanding here: nothing below can strictly beat it.
        if let Some((chain, chain_product)) = self.realize_bound(v) {
            let total = product * chain_product;
            self.paths += 1;
            if total > self.best {
                self.best = total;
                self.best_trail = self.trail.iter().copied().chain(chain).collect();
            }
            if self.guide.bound[v as usize] <= chain_product * CERTIFICATE_SLACK {
                return;
            }
        }
        let graph = self.graph;
        // Most promising extension first, so the incumbent tightens early;
        // on weight plateaus the BFS hop distance breaks the tie towards
        // the goal, which keeps the first descent from wandering.
        let mut extensions: Vec<(f64, u32)> = graph
            .edges_of(v)
            .iter()
            .filter(|e| !self.visited[e.target as usize])
            .map(|e| (adjusted_weight(e.weight, self.mode), e.target))
            .collect();
        extensions.sort_by(|a, b| {
            let key_a = a.0 * self.guide.bound[a.1 as usize];
            let key_b = b.0 * self.guide.bound[b.1 as usize];
            key_b
                .partial_cmp(&key_a)
                .unwrap()
                .then(self.guide.hops[a.1 as usize].cmp(&self.guide.hops[b.1 as usize]))
                .then(a.1.cmp(&b.1))
        });
        for (w, target) in extensions {
            let t = target as usize;
            if self.visited[t] {
                continue;
            }
            // bound 0 is exact: no walk from there reaches the goal
            if self.guide.bound[t] == 0.0 {
                continue;
            }
            let next = product * w;
            // The bound over-approximates the achievable remainder up to
            // floating-point rounding (a few hundred multiplications, so
            // well under 1e-12 relative), and whenever this cut fires on an
            // optimal prefix the incumbent is already within that rounding
            // of the optimum. Equal-product ties prune here, which keeps
            // weight-1 plateaus from exploding the enumeration.
            if next * self.guide.bound[t] <= self.best {
                continue;
            }
            self.visited[t] = true;
            self.trail.push(target);
            self.dfs(target, next);
            self.trail.pop();
            self.visited[t] = false;
        }
    }
}

/// Enumerates all simple paths from `start` to `goal` and returns the
/// maximum dependability, or `None` when no path exists. Refuses graphs
/// larger than `vertex_budget` instead of silently truncating.
pub fn exhaustive_best(
    graph: &DependabilityGraph,
    start: Cell,
    goal: Cell,
    mode: SolveMode,
    vertex_budget: usize,
) -> Result<Option<OracleResult>, OracleError> {
    mode.validate()?;
    let vertices = graph.vertex_count();
    if vertices > vertex_budget {
        return Err(OracleError::BudgetExceeded { vertices, budget: vertex_budget });
    }
    let s = graph
        .cell_vertex(start)
        .ok_or(OracleError::UnknownEndpoint { which: "start", cell: start })?;
    let g = graph
        .cell_vertex(goal)
        .ok_or(OracleError::UnknownEndpoint { which: "goal", cell: goal })?;
    if s == g {
        return Ok(Some(OracleResult {
            best_dependability: 1.0,
            best_path: vec![VertexId::Cell(start)],
            paths_explored: 1,
        }));
    }

    let guide = build_guidance(graph, mode, g);
    if guide.bound[s as usize] == 0.0 {
        return Ok(None); // the goal is not reachable at all
    }
    let mut search = Search {
        graph,
        mode,
        goal: g,
        guide,
        visited: vec![false; vertices],
        trail: vec![s],
        best: -1.0,
        best_trail: Vec::new(),
        paths: 0,
    };
    search.visited[s as usize] = true;
    search.dfs(s, 1.0);

    if search.best < 0.0 {
        return Ok(None);
    }
    Ok(Some(OracleResult {
        best_dependability: search.best,
        best_path: search.best_trail.iter().map(|&ix| graph.vertex_id(ix)).collect(),
        paths_explored: search.paths,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::grid::{EnvironmentBox, Grid2D};
    use crate::radio::{RadioModel, RadioParams, Tower};
    use crate::risk::GroundRisk;
    use crate::solver::{solve, SolveMode};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn open_box(n: usize, m: usize, h: usize) -> EnvironmentBox {
        let side = 20.0;
        EnvironmentBox::new(n as f64 * side, m as f64 * side, h as f64 * side, side).unwrap()
    }

    fn tower(id: &str, x: usize, y: usize) -> Tower {
        Tower::new(id, x, y, 1.0, 1.0, 0.125).unwrap()
    }

    #[test]
    fn start_equals_goal_is_the_empty_product() {
        let env = open_box(2, 2, 1);
        let g = build_graph(&env, &[], &RadioParams::default(), &GroundRisk::zero(2, 2));
        let r = exhaustive_best(&g, Cell::new(2, 2, 1), Cell::new(2, 2, 1), SolveMode::default(), 500)
            .unwrap()
            .unwrap();
        assert_eq!(r.best_dependability, 1.0);
        assert_eq!(r.paths_explored, 1);
        assert!(r.best_path.len() == 1);
    }

    #[test]
    fn two_cell_corridor_matches_the_hand_enumeration() {
        let env = open_box(2, 1, 1);
        let towers = [tower("t", 1, 1)];
        let params = RadioParams::default();
        let risk = GroundRisk::precomputed(Grid2D::filled(2, 1, 0.15)).unwrap();
        let graph = build_graph(&env, &towers, &params, &risk);
        let goal = Cell::new(2, 1, 1);
        let r = exhaustive_best(&graph, Cell::new(1, 1, 1), goal, SolveMode::default(), 500)
            .unwrap()
            .unwrap();
        let radio = RadioModel::new(params, env.cell_side_m());
        let expected = 0.5 * radio.link_reliability(goal, &towers[0]) * risk.ground_safeness(goal);
        assert!((r.best_dependability - expected).abs() <= 1e-12 * expected);
        assert!(r.paths_explored >= 1);
    }

    #[test]
    fn budget_is_enforced_not_truncated() {
        let env = open_box(3, 3, 1);
        let g = build_graph(&env, &[tower("t", 2, 2)], &RadioParams::default(), &GroundRisk::zero(3, 3));
        let err = exhaustive_best(&g, Cell::new(1, 1, 1), Cell::new(3, 3, 1), SolveMode::default(), 1)
            .unwrap_err();
        assert_eq!(err, OracleError::BudgetExceeded { vertices: 18, budget: 1 });
    }

    #[test]
    fn no_path_is_reported_as_none() {
        let env = open_box(3, 1, 1);
        let g = build_graph(&env, &[tower("t", 3, 1)], &RadioParams::default(), &GroundRisk::zero(3, 1));
        let r = exhaustive_best(&g, Cell::new(1, 1, 1), Cell::new(3, 1, 1), SolveMode::default(), 500)
            .unwrap();
        assert!(r.is_none());
    }

    #[test]
    fn oracle_agrees_with_the_solver_on_small_random_scenarios() {
        for seed in 0..40u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let env = open_box(3, 3, 1);
            let mut grid = Grid2D::filled(3, 3, 0.0);
            for x in 1..=3 {
                for y in 1..=3 {
                    grid.set(x, y, rng.random_range(0.0..0.9));
                }
            }
            let risk = GroundRisk::precomputed(grid).unwrap();
            let mut towers = Vec::new();
            for (i, _) in (0..rng.random_range(1..=2)).enumerate() {
                loop {
                    let (x, y) = (rng.random_range(1..=3), rng.random_range(1..=3));
                    if !towers.iter().any(|t: &Tower| t.x == x && t.y == y) {
                        towers.push(tower(&format!("t{i}"), x, y));
                        break;
                    }
                }
            }
            let graph = build_graph(&env, &towers, &RadioParams::default(), &risk);
            let s = Cell::new(rng.random_range(1..=3), rng.random_range(1..=3), 1);
            let g = Cell::new(rng.random_range(1..=3), rng.random_range(1..=3), 1);
            let solved = solve(&graph, s, g, SolveMode::default()).unwrap();
            let brute = exhaustive_best(&graph, s, g, SolveMode::default(), 500).unwrap();
            match (solved, brute) {
                (None, None) => {}
                (Some(p), Some(o)) => {
                    let diff = (p.dependability - o.best_dependability).abs();
                    assert!(
                        diff <= 1e-9 * o.best_dependability.max(1e-300),
                        "seed {seed}: solver {} vs oracle {}",
                        p.dependability,
                        o.best_dependability
                    );
                }
                (a, b) => panic!("seed {seed}: verdicts disagree: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn best_value_is_invariant_under_adjacency_order() {
        let env = open_box(3, 2, 1);
        let towers = [tower("a", 1, 1), tower("b", 3, 2)];
        let risk = GroundRisk::precomputed(Grid2D::filled(3, 2, 0.25)).unwrap();
        let graph = build_graph(&env, &towers, &RadioParams::default(), &risk);
        let s = Cell::new(1, 2, 1);
        let g = Cell::new(3, 1, 1);
        let reference = exhaustive_best(&graph, s, g, SolveMode::default(), 500)
            .unwrap()
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let mut scrambled = graph.clone();
            scrambled.scramble_adjacency_for_tests(&mut rng);
            let r = exhaustive_best(&scrambled, s, g, SolveMode::default(), 500)
                .unwrap()
                .unwrap();
            assert_eq!(r.best_dependability, reference.best_dependability);
        }
    }
}
