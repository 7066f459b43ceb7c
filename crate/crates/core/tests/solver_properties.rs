//! Cross-module solver properties on seeded random scenarios: optimality
//! is preserved under graph growth, every mode agrees with the oracle, and
//! returned paths alternate legally between cell and tower vertices.

use skylink_core::generate::{generate_validation_scenario, generate_scenario, GenParams};
use skylink_core::graph::build_graph;
use skylink_core::grid::Cell;
use skylink_core::oracle::exhaustive_best;
use skylink_core::radio::Tower;
use skylink_core::solver::{path_dependability, solve, PlanMode, SolveMode};

fn relative_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Adding a tower only adds vertices and edges, so the optimal
/// dependability never decreases.
#[test]
fn adding_a_tower_never_hurts() {
    let mut compared = 0usize;
    for seed in 0..40u64 {
        let scenario = generate_validation_scenario(seed);
        let env = scenario.build_environment().unwrap();
        let risk = scenario.ground_risk();
        let graph = build_graph(&env, &scenario.towers, &scenario.radio, &risk);
        let req = scenario.request.unwrap();
        let before = solve(&graph, req.from, req.to, SolveMode::default()).unwrap();

        let Some(spot) = env
            .free_ground_cells()
            .find(|c| !scenario.towers.iter().any(|t| t.x == c.x && t.y == c.y))
        else {
            continue;
        };
        let mut towers = scenario.towers.clone();
        towers.push(Tower::new("zz-extra", spot.x, spot.y, 10.0, 1.0, 0.125).unwrap());
        let grown = build_graph(&env, &towers, &scenario.radio, &risk);
        let after = solve(&grown, req.from, req.to, SolveMode::default()).unwrap();

        match (before, after) {
            (None, _) => {}
            (Some(b), Some(a)) => {
                assert!(
                    a.dependability >= b.dependability * (1.0 - 1e-12),
                    "seed {seed}: {} dropped to {}",
                    b.dependability,
                    a.dependability
                );
                compared += 1;
            }
            (Some(b), None) => panic!("seed {seed}: path {} vanished", b.dependability),
        }
    }
    assert!(compared >= 10, "only {compared} pairs compared");
}

/// Every named objective agrees with the oracle on the mode-adjusted
/// weights, as does the unnamed gs+hsr degeneration that maximizes the
/// link-reliability product alone.
#[test]
fn all_modes_agree_with_the_oracle() {
    let modes: Vec<(&str, SolveMode)> = vec![
        ("full", PlanMode::Full.mode()),
        ("min-risk", PlanMode::MinRisk.mode()),
        ("max-connectivity", PlanMode::MaxConnectivity.mode()),
        ("min-handover", PlanMode::MinHandover.mode()),
        (
            "lr-only",
            SolveMode { override_gs: true, override_hsr: true, ..Default::default() },
        ),
    ];
    for seed in 100..130u64 {
        let scenario = generate_validation_scenario(seed);
        let (_, graph) = scenario.compile().unwrap();
        let req = scenario.request.unwrap();
        for (name, mode) in &modes {
            let solved = solve(&graph, req.from, req.to, *mode).unwrap();
            let brute = exhaustive_best(&graph, req.from, req.to, *mode, 500).unwrap();
            match (solved, brute) {
                (None, None) => {}
                (Some(p), Some(o)) => assert!(
                    relative_close(p.dependability, o.best_dependability, 1e-9),
                    "seed {seed} mode {name}: solver {} vs oracle {}",
                    p.dependability,
                    o.best_dependability
                ),
                (s, o) => panic!(
                    "seed {seed} mode {name}: verdicts disagree ({:?} vs {:?})",
                    s.map(|p| p.dependability),
                    o.map(|r| r.best_dependability)
                ),
            }
        }
    }
}

/// Paths start and end on cell vertices, never repeat a vertex, pay 1/2
/// exactly once per tower change, and recompute bit-for-bit from the graph.
#[test]
fn returned_paths_alternate_legally() {
    let mut checked = 0usize;
    for seed in 200..260u64 {
        let scenario = generate_validation_scenario(seed);
        let (_, graph) = scenario.compile().unwrap();
        let req = scenario.request.unwrap();
        let Some(path) = solve(&graph, req.from, req.to, SolveMode::default()).unwrap() else {
            continue;
        };
        assert_eq!(path.vertices.first().unwrap().cell(), req.from);
        assert_eq!(path.vertices.last().unwrap().cell(), req.to);
        assert!(path.vertices.first().unwrap().tower().is_none());
        assert!(path.vertices.last().unwrap().tower().is_none());

        let mut seen = std::collections::HashSet::new();
        for v in &path.vertices {
            assert!(seen.insert(*v), "seed {seed}: vertex repeated");
        }

        // tower changes pass through a cell vertex and pay 1/2 exactly once
        let mut handovers = 0usize;
        for (i, pair) in path.vertices.windows(2).enumerate() {
            match (pair[0].tower(), pair[1].tower()) {
                (Some(a), Some(b)) => assert_eq!(a, b, "seed {seed}: direct tower change"),
                (None, Some(_)) => {
                    assert_eq!(path.edge_weights[i], 0.5);
                    handovers += 1;
                }
                (Some(_), None) => assert_eq!(path.edge_weights[i], 1.0),
                (None, None) => panic!("seed {seed}: cell-to-cell edge"),
            }
        }
        assert_eq!(handovers, path.handover_count());

        let recomputed = path_dependability(&graph, &path, SolveMode::default()).unwrap();
        assert_eq!(recomputed, path.dependability, "seed {seed}");
        checked += 1;
    }
    assert!(checked >= 20, "only {checked} paths checked");
}

/// The empty-path contract and endpoint validation compose with modes.
#[test]
fn trivial_and_invalid_queries() {
    let scenario = generate_scenario(&GenParams { seed: 9, ..GenParams::default() }).unwrap();
    let (env, graph) = scenario.compile().unwrap();
    let some_free = env.free_cells().next().unwrap();
    for mode in PlanMode::ALL {
        let path = solve(&graph, some_free, some_free, mode.mode()).unwrap().unwrap();
        assert_eq!(path.dependability, 1.0);
        assert!(path.is_empty());
    }
    let outside = Cell::new(99, 99, 99);
    assert!(solve(&graph, some_free, outside, SolveMode::default()).is_err());
    assert!(exhaustive_best(&graph, outside, some_free, SolveMode::default(), 500).is_err());
}
