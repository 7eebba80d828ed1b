use proptest::prelude::*;

use transitmap::geometry::{Point, Polyline, SweepParams};
use transitmap::graph::{load_line_graph, save_line_graph, LineGraph, NodeKind};
use transitmap::gtfs::{RawEdge, RawNetwork, Station};
use transitmap::line_graph::{construct, construct_line_graph, remaining_shared, BuildParams, MergeOrder};
use transitmap::synth::{self, line, raw_from_graph, random_graph, RandomSpec};

fn station(id: &str, x: f64, y: f64) -> Station {
    Station {
        id: id.into(),
        name: id.into(),
        pos: Point::new(x, y),
    }
}

fn poly(pts: &[(f64, f64)]) -> Polyline {
    Polyline::new(pts.iter().map(|&(x, y)| Point::new(x, y))).unwrap()
}

/// Two lines running along a common middle corridor between distinct
/// termini.
fn middle_corridor() -> RawNetwork {
    RawNetwork {
        stations: vec![
            station("a1", 0.0, 500.0),
            station("a2", 3000.0, 500.0),
            station("b1", 0.0, -500.0),
            station("b2", 3000.0, -500.0),
        ],
        lines: vec![line(0, "A"), line(1, "B")],
        edges: vec![
            RawEdge {
                a: 0,
                b: 1,
                line: 0,
                path: poly(&[(0.0, 500.0), (1000.0, 0.0), (2000.0, 0.0), (3000.0, 500.0)]),
            },
            RawEdge {
                a: 2,
                b: 3,
                line: 1,
                path: poly(&[(0.0, -500.0), (1000.0, 0.0), (2000.0, 0.0), (3000.0, -500.0)]),
            },
        ],
    }
}

fn lines_per_edge(g: &LineGraph) -> Vec<usize> {
    let mut v: Vec<usize> = g.edges.iter().map(|e| e.lines.len()).collect();
    v.sort_unstable();
    v
}

#[test]
fn identical_paths_become_one_edge() {
    let raw = RawNetwork {
        stations: vec![station("s", 0.0, 0.0), station("t", 1500.0, 200.0)],
        lines: vec![line(0, "A"), line(1, "B")],
        edges: vec![
            RawEdge {
                a: 0,
                b: 1,
                line: 0,
                path: poly(&[(0.0, 0.0), (700.0, 50.0), (1500.0, 200.0)]),
            },
            RawEdge {
                a: 1,
                b: 0,
                line: 1,
                path: poly(&[(1500.0, 200.0), (700.0, 55.0), (0.0, 0.0)]),
            },
        ],
    };
    let g = construct_line_graph(&raw, &BuildParams::default()).unwrap();
    assert_eq!(g.edges.len(), 1);
    assert_eq!(g.edges[0].lines, vec![0, 1]);
    assert!(g.nodes.iter().all(|n| n.is_station()));
}

#[test]
fn middle_overlap_creates_two_junctions() {
    let c = construct(&middle_corridor(), &BuildParams::default()).unwrap();
    let g = &c.graph;
    assert_eq!(c.merges, 1);
    assert_eq!(g.edges.len(), 5);
    let adj = g.adjacency();
    let aux: Vec<usize> = (0..g.nodes.len()).filter(|&v| !g.nodes[v].is_station()).collect();
    assert_eq!(aux.len(), 2);
    for &v in &aux {
        assert_eq!(adj[v].len(), 3);
    }
    assert_eq!(lines_per_edge(g), vec![1, 1, 1, 1, 2]);
    let shared = g.edges.iter().find(|e| e.lines.len() == 2).unwrap();
    assert!((shared.path.length() - 1000.0).abs() < 60.0, "{}", shared.path.length());
}

/// Three lines over a 3x3 station grid, each copy resampled with jitter.
fn noisy_grid() -> RawNetwork {
    let mut nodes = Vec::new();
    for r in 0..3 {
        for c in 0..3 {
            nodes.push(synth::station(&format!("s{r}{c}"), c as f64 * 800.0, r as f64 * 800.0));
        }
    }
    let g = synth::build(
        nodes,
        &[
            (0, 1, &[0, 1]),
            (1, 2, &[0]),
            (1, 4, &[1, 2]),
            (3, 4, &[2]),
            (4, 5, &[2]),
            (4, 7, &[1]),
            (7, 8, &[1]),
            (2, 5, &[0]),
            (5, 8, &[0, 2]),
        ],
        &["A", "B", "C"],
    );
    raw_from_graph(&g, 4.0, 3)
}

/// The corridor fixture with a third line that joins at the first junction
/// and leaves halfway along the shared stretch.
fn three_line_corridor() -> RawNetwork {
    let mut raw = middle_corridor();
    raw.stations.push(station("c1", 0.0, 0.0));
    raw.stations.push(station("c2", 1500.0, 900.0));
    raw.lines.push(line(2, "C"));
    raw.edges.push(RawEdge {
        a: 4,
        b: 5,
        line: 2,
        path: poly(&[(0.0, 0.0), (1000.0, 0.0), (1500.0, 0.0), (1500.0, 900.0)]),
    });
    raw
}

#[test]
fn merge_order_does_not_change_dimensions() {
    for raw in [noisy_grid(), middle_corridor(), three_line_corridor()] {
        let base = construct_line_graph(&raw, &BuildParams::default()).unwrap();
        for seed in 0..5 {
            let params = BuildParams {
                order: MergeOrder::Shuffled(seed),
                ..BuildParams::default()
            };
            let other = construct_line_graph(&raw, &params).unwrap();
            assert_eq!(other.nodes.len(), base.nodes.len(), "seed {seed}");
            assert_eq!(other.edges.len(), base.edges.len(), "seed {seed}");
            assert_eq!(lines_per_edge(&other), lines_per_edge(&base), "seed {seed}");
        }
    }
}

#[test]
fn noisy_copies_of_one_network_fold_back() {
    let g = construct_line_graph(&noisy_grid(), &BuildParams::default()).unwrap();
    assert_eq!(g.edges.len(), 9);
    assert!(g.nodes.iter().all(|n| n.is_station()));
    assert_eq!(lines_per_edge(&g), vec![1, 1, 1, 1, 1, 1, 2, 2, 2]);
}

#[test]
fn round_trip_is_byte_stable() {
    let g = construct_line_graph(&middle_corridor(), &BuildParams::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("g1.json");
    let p2 = dir.path().join("g2.json");
    save_line_graph(&g, &p1).unwrap();
    let back = load_line_graph(&p1).unwrap();
    assert_eq!(back, g);
    save_line_graph(&back, &p2).unwrap();
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    assert_eq!(back.nodes.iter().filter(|n| n.kind == NodeKind::Auxiliary).count(), 2);
}

#[test]
fn empty_graph_is_not_saved() {
    let dir = tempfile::tempdir().unwrap();
    assert!(save_line_graph(&LineGraph::default(), dir.path().join("g.json")).is_err());
}

/// Edges carrying `l` form one connected piece.
fn line_is_connected(g: &LineGraph, l: usize) -> bool {
    let es: Vec<usize> = (0..g.edges.len()).filter(|&e| g.edges[e].has_line(l)).collect();
    if es.is_empty() {
        return true;
    }
    let mut seen = vec![false; es.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        let (a, b) = (g.edges[es[i]].a, g.edges[es[i]].b);
        for (j, &f) in es.iter().enumerate() {
            let ef = &g.edges[f];
            if !seen[j] && [ef.a, ef.b].iter().any(|&x| x == a || x == b) {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.iter().all(|&s| s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn construction_reaches_a_fixed_point(seed in 0u64..100_000, noise in 0.0f64..6.0) {
        let spec = RandomSpec { nodes: 8, max_edges: 10, lines: 4, max_line_len: 5, branch_prob: 0.0, station_prob: 0.7 };
        let g = random_graph(seed, &spec);
        let raw = raw_from_graph(&g, noise, seed);
        let c = construct(&raw, &BuildParams::default()).unwrap();
        let sweep = SweepParams::default();
        if c.rejected == 0 {
            prop_assert!(remaining_shared(&c.graph, &sweep).is_empty());
        }
        prop_assert!(c.graph.max_lines_per_edge() >= g.max_lines_per_edge());
        for l in 0..c.graph.lines.len() {
            if line_is_connected(&g, l) {
                prop_assert!(line_is_connected(&c.graph, l), "line {} split apart", l);
            }
        }
    }
}
