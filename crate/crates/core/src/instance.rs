//! An optimization instance: a line graph together with per-node event
//! weights and per-line multiplicities, plus the precomputed list of every
//! ordering-dependent event (same-continuation crossings, split crossings,
//! separations) that the evaluator, the ILP builders and the solvers share.
//!
//! Orientation convention. Position 1 on an edge is its leftmost line when
//! walking the path from `a` to `b`. Around a node, fronts are visited in
//! counter-clockwise order of the edges' outgoing directions, and inside a
//! front the ports are visited left to right as seen when arriving at the
//! node. Two inner connections cross exactly when their four ports
//! interleave in this cyclic order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point;
use crate::graph::LineGraph;

/// Distance along an edge used to probe its direction out of a node.
pub const ANGLE_PROBE_M: f64 = 25.0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error("weight of {what} at node {node} is not positive")]
    NonPositive { node: String, what: &'static str },
    #[error("degree-2 station {station} is cheaper than non-station node {node} for {what}")]
    StationCheaper {
        station: String,
        node: String,
        what: &'static str,
    },
}

/// Event weights of one node, before line multiplicities are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeWeights {
    /// Crossing of two lines continuing into the same edge.
    pub same: i64,
    /// Crossing of two lines splitting into different edges.
    pub split: i64,
    /// Separation of two lines adjacent on one edge but not on the next.
    pub sep: i64,
}

/// Degree-scaled weights; each value is multiplied by the node degree,
/// except for degree-2 stations which use the maximum degree of the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DegreeWeights {
    pub same: i64,
    pub split: i64,
    pub sep: i64,
    pub station_same: i64,
    pub station_split: i64,
    pub station_sep: i64,
    pub deg2_station_crossing: i64,
    pub deg2_station_sep: i64,
}

impl Default for DegreeWeights {
    fn default() -> Self {
        DegreeWeights {
            same: 4,
            split: 1,
            sep: 3,
            station_same: 12,
            station_split: 3,
            station_sep: 3,
            deg2_station_crossing: 4,
            deg2_station_sep: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightPolicy {
    Degree(DegreeWeights),
    Uniform { same: i64, split: i64, sep: i64 },
}

impl Default for WeightPolicy {
    fn default() -> Self {
        WeightPolicy::Degree(DegreeWeights::default())
    }
}

impl WeightPolicy {
    pub fn uniform() -> Self {
        WeightPolicy::Uniform {
            same: 1,
            split: 1,
            sep: 1,
        }
    }

    pub fn node_weights(&self, g: &LineGraph) -> Vec<NodeWeights> {
        let adj = g.adjacency();
        let max_deg = adj.iter().map(Vec::len).max().unwrap_or(0) as i64;
        g.nodes
            .iter()
            .zip(&adj)
            .map(|(n, inc)| {
                let deg = inc.len() as i64;
                match *self {
                    WeightPolicy::Uniform { same, split, sep } => NodeWeights { same, split, sep },
                    WeightPolicy::Degree(d) if n.is_station() && deg == 2 => NodeWeights {
                        same: d.deg2_station_crossing * max_deg,
                        split: d.deg2_station_crossing * max_deg,
                        sep: d.deg2_station_sep * max_deg,
                    },
                    WeightPolicy::Degree(d) if n.is_station() => NodeWeights {
                        same: d.station_same * deg,
                        split: d.station_split * deg,
                        sep: d.station_sep * deg,
                    },
                    WeightPolicy::Degree(d) => NodeWeights {
                        same: d.same * deg,
                        split: d.split * deg,
                        sep: d.sep * deg,
                    },
                }
            })
            .collect()
    }

    /// Checks positivity and that no degree-2 station is cheaper than any
    /// non-station node, for crossings and for separations.
    pub fn validate(&self, g: &LineGraph) -> Result<(), WeightError> {
        let w = self.node_weights(g);
        let adj = g.adjacency();
        for (n, nw) in g.nodes.iter().zip(&w) {
            for (v, what) in [(nw.same, "same-edge crossings"), (nw.split, "split crossings"), (nw.sep, "separations")] {
                if v <= 0 {
                    return Err(WeightError::NonPositive {
                        node: n.id.clone(),
                        what,
                    });
                }
            }
        }
        let others: Vec<usize> = (0..g.nodes.len()).filter(|&i| !g.nodes[i].is_station()).collect();
        let max_cross = others.iter().map(|&i| (w[i].same.max(w[i].split), i)).max();
        let max_sep = others.iter().map(|&i| (w[i].sep, i)).max();
        for (s, n) in g.nodes.iter().enumerate() {
            if !n.is_station() || adj[s].len() != 2 {
                continue;
            }
            if let Some((c, i)) = max_cross {
                if w[s].same.min(w[s].split) < c {
                    return Err(WeightError::StationCheaper {
                        station: n.id.clone(),
                        node: g.nodes[i].id.clone(),
                        what: "crossings",
                    });
                }
            }
            if let Some((c, i)) = max_sep {
                if w[s].sep < c {
                    return Err(WeightError::StationCheaper {
                        station: n.id.clone(),
                        node: g.nodes[i].id.clone(),
                        what: "separations",
                    });
                }
            }
        }
        Ok(())
    }
}

/// Two lines continuing from edge `e` into edge `f` (`e < f`, `a < b`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SameEvent {
    pub node: usize,
    pub e: usize,
    pub f: usize,
    pub a: usize,
    pub b: usize,
    /// The pair crosses iff `(a before b on e) xor (a before b on f) == rho`.
    pub rho: bool,
    pub cross_w: i64,
    pub sep_w: i64,
    pub mult: i64,
}

/// Line `a` continues from `e` into `f`, line `b` from `e` into `g` (`a < b`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitEvent {
    pub node: usize,
    pub e: usize,
    pub f: usize,
    pub g: usize,
    pub a: usize,
    pub b: usize,
    /// The pair crosses iff `(a before b on e) == target`.
    pub target: bool,
    pub w: i64,
    pub mult: i64,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: LineGraph,
    pub weights: Vec<NodeWeights>,
    /// Number of original lines each line stands for (1 unless collapsed).
    pub line_mult: Vec<u32>,
    pub price_separations: bool,
    pub same: Vec<SameEvent>,
    pub split: Vec<SplitEvent>,
}

impl Instance {
    pub fn new(graph: LineGraph, policy: &WeightPolicy) -> Instance {
        let weights = policy.node_weights(&graph);
        let mult = vec![1; graph.lines.len()];
        Instance::from_parts(graph, weights, mult, false)
    }

    pub fn from_parts(graph: LineGraph, weights: Vec<NodeWeights>, line_mult: Vec<u32>, price_separations: bool) -> Instance {
        assert_eq!(weights.len(), graph.nodes.len());
        assert_eq!(line_mult.len(), graph.lines.len());
        let (same, split) = enumerate_events(&graph, &weights, &line_mult);
        Instance {
            graph,
            weights,
            line_mult,
            price_separations,
            same,
            split,
        }
    }

    /// An instance whose events were derived elsewhere, e.g. carried over
    /// from a larger graph by a reduction.
    pub fn from_events(
        graph: LineGraph,
        weights: Vec<NodeWeights>,
        line_mult: Vec<u32>,
        price_separations: bool,
        same: Vec<SameEvent>,
        split: Vec<SplitEvent>,
    ) -> Instance {
        assert_eq!(weights.len(), graph.nodes.len());
        assert_eq!(line_mult.len(), graph.lines.len());
        Instance {
            graph,
            weights,
            line_mult,
            price_separations,
            same,
            split,
        }
    }

    pub fn with_separations(mut self, on: bool) -> Instance {
        self.price_separations = on;
        self
    }

    /// True when no ordering can change the objective.
    pub fn is_trivial(&self) -> bool {
        self.split.is_empty() && self.same.is_empty()
    }
}

/// Direction of edge `e` leaving node `v`, probed a short way along its path.
pub fn direction_at(g: &LineGraph, e: usize, v: usize) -> Point {
    let edge = &g.edges[e];
    let len = edge.path.length();
    let probe = (len / 2.0).min(ANGLE_PROBE_M);
    if edge.a == v {
        edge.path.point_at_dist(probe).sub(edge.path.first())
    } else {
        edge.path.point_at_dist(len - probe).sub(edge.path.last())
    }
}

/// Incident edges of `v` in counter-clockwise order of their outgoing
/// direction, starting from angle -pi; ties are broken by edge index.
pub fn ccw_order(g: &LineGraph, adj: &[Vec<usize>], v: usize) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = adj[v]
        .iter()
        .map(|&e| {
            let d = direction_at(g, e, v);
            (d.y.atan2(d.x), e)
        })
        .collect();
    keyed.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    keyed.into_iter().map(|(_, e)| e).collect()
}

/// Whether the edge's canonical direction points away from `v`, in which
/// case arrival order at `v` is the reverse of the stored ordering.
pub fn reversed_at(g: &LineGraph, e: usize, v: usize) -> bool {
    g.edges[e].a == v
}

fn enumerate_events(g: &LineGraph, w: &[NodeWeights], mult: &[u32]) -> (Vec<SameEvent>, Vec<SplitEvent>) {
    let adj = g.adjacency();
    let mut same = Vec::new();
    let mut split = Vec::new();
    for v in 0..g.nodes.len() {
        if adj[v].len() < 2 {
            continue;
        }
        let ccw = ccw_order(g, &adj, v);
        let rank = |e: usize| ccw.iter().position(|&x| x == e).unwrap();
        let deg = ccw.len();
        // chords of every line at v: unordered pairs of incident edges carrying it
        let mut lines: Vec<usize> = adj[v].iter().flat_map(|&e| g.edges[e].lines.iter().copied()).collect();
        lines.sort_unstable();
        lines.dedup();
        let chords: Vec<(usize, Vec<(usize, usize)>)> = lines
            .into_iter()
            .filter_map(|l| {
                let es = g.line_edges_at(&adj, v, l);
                let mut cs = Vec::new();
                for i in 0..es.len() {
                    for j in i + 1..es.len() {
                        cs.push((es[i].min(es[j]), es[i].max(es[j])));
                    }
                }
                (!cs.is_empty()).then_some((l, cs))
            })
            .collect();
        for i in 0..chords.len() {
            for j in i + 1..chords.len() {
                let (a, ca) = &chords[i];
                let (b, cb) = &chords[j];
                let m = mult[*a] as i64 * mult[*b] as i64;
                for &(x1, y1) in ca {
                    for &(x2, y2) in cb {
                        if (x1, y1) == (x2, y2) {
                            let rho = reversed_at(g, x1, v) ^ reversed_at(g, y1, v);
                            same.push(SameEvent {
                                node: v,
                                e: x1,
                                f: y1,
                                a: *a,
                                b: *b,
                                rho,
                                cross_w: w[v].same * m,
                                sep_w: w[v].sep * m,
                                mult: m,
                            });
                            continue;
                        }
                        let shared = if x1 == x2 || x1 == y2 {
                            x1
                        } else if y1 == x2 || y1 == y2 {
                            y1
                        } else {
                            continue;
                        };
                        let fa = if x1 == shared { y1 } else { x1 };
                        let gb = if x2 == shared { y2 } else { x2 };
                        let rs = rank(shared);
                        let rel = |e: usize| (rank(e) + deg - rs) % deg;
                        let f_first = rel(fa) < rel(gb);
                        split.push(SplitEvent {
                            node: v,
                            e: shared,
                            f: fa,
                            g: gb,
                            a: *a,
                            b: *b,
                            target: f_first ^ reversed_at(g, shared, v),
                            w: w[v].split * m,
                            mult: m,
                        });
                    }
                }
            }
        }
    }
    (same, split)
}
