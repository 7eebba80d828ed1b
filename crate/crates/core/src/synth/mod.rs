//! Seeded generators for line graphs and the fixtures used in tests,
//! benchmarks and the demo.

mod city;

pub use city::{city, write_gtfs, City, CitySpec, FREIBURG, NEW_YORK, STUTTGART};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Point, Polyline};
use crate::graph::{Edge, LineGraph, Node, NodeKind, Ordering, Rgb, TransitLine};
use crate::gtfs::{RawEdge, RawNetwork, Station};

const PALETTE: [Rgb; 12] = [
    Rgb(0xe4, 0x1a, 0x1c),
    Rgb(0x37, 0x7e, 0xb8),
    Rgb(0x4d, 0xaf, 0x4a),
    Rgb(0x98, 0x4e, 0xa3),
    Rgb(0xff, 0x7f, 0x00),
    Rgb(0xa6, 0x56, 0x28),
    Rgb(0xf7, 0x81, 0xbf),
    Rgb(0x1b, 0x9e, 0x77),
    Rgb(0x66, 0x66, 0x66),
    Rgb(0xd9, 0x5f, 0x02),
    Rgb(0x75, 0x70, 0xb3),
    Rgb(0xe6, 0xab, 0x02),
];

pub fn palette(i: usize) -> Rgb {
    PALETTE[i % PALETTE.len()]
}

pub fn line(i: usize, id: &str) -> TransitLine {
    TransitLine {
        id: id.to_string(),
        label: id.to_string(),
        color: palette(i),
    }
}

pub fn station(id: &str, x: f64, y: f64) -> Node {
    Node {
        id: id.to_string(),
        kind: NodeKind::Station {
            station_id: id.to_string(),
            name: id.to_string(),
        },
        pos: Point::new(x, y),
    }
}

pub fn junction(id: &str, x: f64, y: f64) -> Node {
    Node {
        id: id.to_string(),
        kind: NodeKind::Auxiliary,
        pos: Point::new(x, y),
    }
}

/// Assembles a graph with straight edges from node and edge lists. Edges
/// are `(from, to, line indices)`; line ids are `lines[i]`.
pub fn build(nodes: Vec<Node>, edges: &[(usize, usize, &[usize])], lines: &[&str]) -> LineGraph {
    let edges = edges
        .iter()
        .enumerate()
        .map(|(i, &(a, b, ls))| {
            let mut ls = ls.to_vec();
            ls.sort_unstable();
            ls.dedup();
            Edge {
                id: format!("e{i}"),
                a,
                b,
                lines: ls,
                path: Polyline::new([nodes[a].pos, nodes[b].pos]).expect("distinct endpoints"),
            }
        })
        .collect();
    LineGraph {
        nodes,
        edges,
        lines: lines.iter().enumerate().map(|(i, id)| line(i, id)).collect(),
    }
}

/// Parameters of [`random_graph`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    pub nodes: usize,
    pub max_edges: usize,
    pub lines: usize,
    /// Maximum number of edges one line path spans.
    pub max_line_len: usize,
    /// Probability that a line gets a second branch from one of its nodes.
    pub branch_prob: f64,
    pub station_prob: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            nodes: 5,
            max_edges: 6,
            lines: 3,
            max_line_len: 4,
            branch_prob: 0.0,
            station_prob: 0.6,
        }
    }
}

fn walk(rng: &mut ChaCha8Rng, adj: &[Vec<(usize, usize)>], start: usize, len: usize, visited: &mut Vec<usize>) -> Vec<usize> {
    let mut cur = start;
    let mut out = Vec::new();
    for _ in 0..len {
        let options: Vec<(usize, usize)> = adj[cur].iter().copied().filter(|(_, to)| !visited.contains(to)).collect();
        let Some(&(e, to)) = options.choose(rng) else {
            break;
        };
        out.push(e);
        visited.push(to);
        cur = to;
    }
    out
}

/// A small connected graph whose lines follow simple paths (optionally with
/// one branch each). Edges no line uses are dropped. Positions lie on a
/// jittered grid so that all edges have distinct directions.
pub fn random_graph(seed: u64, spec: &RandomSpec) -> LineGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.nodes.max(2);
    let cols = (n as f64).sqrt().ceil() as usize;
    let nodes: Vec<Node> = (0..n)
        .map(|i| {
            let x = (i % cols) as f64 * 300.0 + rng.gen_range(-60.0..60.0);
            let y = (i / cols) as f64 * 300.0 + rng.gen_range(-60.0..60.0);
            let id = format!("n{i}");
            if rng.gen_bool(spec.station_prob) {
                station(&id, x, y)
            } else {
                junction(&id, x, y)
            }
        })
        .collect();
    // random spanning tree plus extra edges
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    for i in 1..n {
        let j = rng.gen_range(0..i);
        pairs.push((order[j].min(order[i]), order[j].max(order[i])));
    }
    let mut tries = 0;
    while pairs.len() < spec.max_edges && tries < 50 {
        tries += 1;
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && !pairs.contains(&(a.min(b), a.max(b))) {
            pairs.push((a.min(b), a.max(b)));
        }
    }
    pairs.truncate(spec.max_edges.max(1));
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, &(a, b)) in pairs.iter().enumerate() {
        adj[a].push((e, b));
        adj[b].push((e, a));
    }
    // lines share a trunk path and leave it at random points, so that
    // corridors overlap and diverge
    let trunk_start = rng.gen_range(0..n);
    let mut trunk_nodes = vec![trunk_start];
    let trunk = walk(&mut rng, &adj, trunk_start, spec.max_line_len.max(1), &mut trunk_nodes);
    let mut on_edge: Vec<Vec<usize>> = vec![Vec::new(); pairs.len()];
    for l in 0..spec.lines {
        let mut used: Vec<usize> = Vec::new();
        let (i, j) = if trunk.is_empty() {
            (0, 0)
        } else {
            let i = rng.gen_range(0..trunk.len());
            (i, rng.gen_range(i..trunk.len()) + 1)
        };
        used.extend(&trunk[i..j]);
        let mut visited: Vec<usize> = trunk_nodes[i..=j].to_vec();
        for end in [trunk_nodes[i], trunk_nodes[j]] {
            let len = rng.gen_range(0..=2);
            used.extend(walk(&mut rng, &adj, end, len, &mut visited));
        }
        if !used.is_empty() && rng.gen_bool(spec.branch_prob) {
            let from = visited[rng.gen_range(0..visited.len())];
            let mut seen = vec![from];
            let len = 1 + rng.gen_range(0..2);
            used.extend(walk(&mut rng, &adj, from, len, &mut seen));
        }
        used.sort_unstable();
        used.dedup();
        for e in used {
            on_edge[e].push(l);
        }
    }
    let mut edges = Vec::new();
    for (e, &(a, b)) in pairs.iter().enumerate() {
        if on_edge[e].is_empty() {
            continue;
        }
        let (a, b) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
        edges.push(Edge {
            id: format!("e{e}"),
            a,
            b,
            lines: on_edge[e].clone(),
            path: Polyline::new([nodes[a].pos, nodes[b].pos]).expect("distinct grid points"),
        });
    }
    let mut g = LineGraph {
        nodes,
        edges,
        lines: (0..spec.lines).map(|i| line(i, &format!("L{i}"))).collect(),
    };
    g.remove_isolated_nodes();
    g
}

/// The raw network a GTFS feed for `g` would produce: every node becomes a
/// station and every line of an edge gets its own copy of the edge path,
/// with interior points displaced by up to `noise` meters.
pub fn raw_from_graph(g: &LineGraph, noise: f64, seed: u64) -> RawNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stations = g
        .nodes
        .iter()
        .map(|n| Station {
            id: n.id.clone(),
            name: n.id.clone(),
            pos: n.pos,
        })
        .collect();
    let mut edges = Vec::new();
    for e in &g.edges {
        for &l in &e.lines {
            let pts = e.path.points();
            let mut out = vec![pts[0]];
            let n = (e.path.length() / 100.0).ceil().max(2.0) as usize;
            for i in 1..n {
                let p = e.path.point_at_dist(e.path.length() * i as f64 / n as f64);
                let j = Point::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)).scale(noise);
                out.push(p.add(j));
            }
            out.push(*pts.last().unwrap());
            edges.push(RawEdge {
                a: e.a,
                b: e.b,
                line: l,
                path: Polyline::new(out).expect("perturbed path"),
            });
        }
    }
    RawNetwork {
        stations,
        lines: g.lines.clone(),
        edges,
    }
}

/// A station with `arms` straight edges at roughly even angles. With three
/// arms every line uses two of them; with four arms every line uses arm 0
/// and one other, so that any two lines share an arm at the center.
pub fn star(seed: u64, arms: usize, lines: usize) -> LineGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arms = arms.clamp(2, 4);
    let lines = lines.max(arms - 1);
    let mut nodes = vec![station("c", 0.0, 0.0)];
    for k in 0..arms {
        let a = std::f64::consts::TAU * k as f64 / arms as f64 + rng.gen_range(-0.25..0.25);
        let r = rng.gen_range(600.0..1000.0);
        nodes.push(station(&format!("s{k}"), r * a.cos(), r * a.sin()));
    }
    let mut on_arm: Vec<Vec<usize>> = vec![Vec::new(); arms];
    for l in 0..lines {
        let (x, y) = if arms == 4 {
            // every other arm gets at least one line
            (0, if l < 3 { l + 1 } else { rng.gen_range(1..4) })
        } else if l < arms {
            (l, (l + 1) % arms)
        } else {
            let x = rng.gen_range(0..arms);
            (x, (x + rng.gen_range(1..arms)) % arms)
        };
        on_arm[x].push(l);
        on_arm[y].push(l);
    }
    let edges: Vec<(usize, usize, Vec<usize>)> = (0..arms)
        .map(|k| {
            // mix canonical directions
            if rng.gen_bool(0.5) {
                (0, k + 1, on_arm[k].clone())
            } else {
                (k + 1, 0, on_arm[k].clone())
            }
        })
        .collect();
    let refs: Vec<(usize, usize, &[usize])> = edges.iter().map(|(a, b, l)| (*a, *b, l.as_slice())).collect();
    let ids: Vec<String> = (0..lines).map(|l| format!("L{l}")).collect();
    let names: Vec<&str> = ids.iter().map(String::as_str).collect();
    build(nodes, &refs, &names)
}

/// A uniformly random ordering of every edge.
pub fn random_ordering(g: &LineGraph, seed: u64) -> Ordering {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ordering {
        edges: g
            .edges
            .iter()
            .map(|e| {
                let mut o = e.lines.clone();
                o.shuffle(&mut rng);
                o
            })
            .collect(),
    }
}

/// Seven lines where `A` and `B` always run together, three degree-2
/// stations sit between equal line sets and two single-line edges separate
/// two junction clusters.
pub fn seven_lines() -> LineGraph {
    let nodes = vec![
        station("a1", -2000.0, 0.0),
        station("m1", -1000.0, 0.0),
        station("j1", 0.0, 0.0),
        station("m2", 700.0, 700.0),
        station("a2", 1400.0, 1400.0),
        station("m3", 700.0, -700.0),
        station("a3", 1400.0, -1400.0),
        station("b1", 3000.0, -1400.0),
        station("j2", 4000.0, -1400.0),
        station("b2", 4700.0, -700.0),
        station("b3", 4700.0, -2100.0),
        station("t", 5400.0, -2800.0),
    ];
    let (a, b, c, d, e, f, g) = (0, 1, 2, 3, 4, 5, 6);
    build(
        nodes,
        &[
            (0, 1, &[a, b, c]),
            (1, 2, &[a, b, c]),
            (2, 3, &[a, b, d]),
            (3, 4, &[a, b, d]),
            (2, 5, &[c, d]),
            (5, 6, &[c, d]),
            (6, 7, &[d]),
            (7, 8, &[e, f]),
            (8, 9, &[e, g]),
            (8, 10, &[f, g]),
            (10, 11, &[g]),
        ],
        &["A", "B", "C", "D", "E", "F", "G"],
    )
}

/// Six junctions where every crossing-minimal ordering separates a line
/// pair, while every optimum with separations priced has none and more
/// crossings.
pub fn separation_trade() -> LineGraph {
    build(
        vec![
            junction("n0", -5.6, 41.3),
            junction("n1", 248.4, -25.6),
            junction("n2", 582.4, -50.0),
            junction("n3", 13.3, 302.1),
            junction("n4", 254.1, 283.9),
            junction("n5", 593.9, 288.8),
        ],
        &[
            (5, 2, &[0, 1, 2, 3]),
            (3, 5, &[1, 2, 3]),
            (2, 0, &[0]),
            (0, 4, &[0, 3]),
            (4, 1, &[2, 3]),
            (4, 2, &[0, 1, 2, 3]),
        ],
        &["L0", "L1", "L2", "L3"],
    )
}
