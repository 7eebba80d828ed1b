//! The line graph `G = (V, E, L)`: nodes (stations or auxiliary), undirected
//! edges carrying a set of transit lines and a geometric path, and per-edge
//! line orderings. Also the JSON interchange format between pipeline stages.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point, Polyline};

/// Path endpoints farther than this from their node are a schema violation.
pub const ENDPOINT_TOL: f64 = 1.0;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn schema(msg: impl Into<String>) -> GraphError {
    GraphError::SchemaViolation(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

impl FromStr for Rgb {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let h = s.trim().trim_start_matches('#');
        if h.len() != 6 || !h.is_ascii() {
            return Err(format!("bad color {s:?}"));
        }
        let c = |i: usize| u8::from_str_radix(&h[i..i + 2], 16).map_err(|e| e.to_string());
        Ok(Rgb(c(0)?, c(2)?, c(4)?))
    }
}

impl Serialize for Rgb {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rgb {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitLine {
    pub id: String,
    pub label: String,
    pub color: Rgb,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Station { station_id: String, name: String },
    Auxiliary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub pos: Point,
}

impl Node {
    pub fn is_station(&self) -> bool {
        matches!(self.kind, NodeKind::Station { .. })
    }
}

/// An undirected edge; `path` runs from node `a` to node `b`, which fixes the
/// canonical direction used to read orderings.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub a: usize,
    pub b: usize,
    /// Indices into [`LineGraph::lines`], sorted ascending.
    pub lines: Vec<usize>,
    pub path: Polyline,
}

impl Edge {
    pub fn other(&self, v: usize) -> usize {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }

    pub fn has_line(&self, l: usize) -> bool {
        self.lines.binary_search(&l).is_ok()
    }

    /// Whether walking towards `v` runs against the canonical direction.
    pub fn leaves(&self, v: usize) -> bool {
        self.a == v
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LineGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub lines: Vec<TransitLine>,
}

/// Size summary of a graph, displayed as `S | V | E | L | M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphDims {
    pub stations: usize,
    pub nodes: usize,
    pub edges: usize,
    pub lines: usize,
    pub max_lines_per_edge: usize,
}

impl fmt::Display for GraphDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} | {} | {} | {} | {}",
            self.stations, self.nodes, self.edges, self.lines, self.max_lines_per_edge
        )
    }
}

impl LineGraph {
    /// Incident edge indices per node, in edge order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.a].push(i);
            if e.b != e.a {
                adj[e.b].push(i);
            }
        }
        adj
    }

    /// `M`, the maximum number of lines on any edge.
    pub fn max_lines_per_edge(&self) -> usize {
        self.edges.iter().map(|e| e.lines.len()).max().unwrap_or(0)
    }

    /// Lines that occur on at least one edge.
    pub fn used_lines(&self) -> usize {
        let used: HashSet<usize> = self.edges.iter().flat_map(|e| e.lines.iter().copied()).collect();
        used.len()
    }

    pub fn dims(&self) -> GraphDims {
        GraphDims {
            stations: self.nodes.iter().filter(|n| n.is_station()).count(),
            nodes: self.nodes.len(),
            edges: self.edges.len(),
            lines: self.used_lines(),
            max_lines_per_edge: self.max_lines_per_edge(),
        }
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn line_index(&self, id: &str) -> Option<usize> {
        self.lines.iter().position(|l| l.id == id)
    }

    /// Edges of `v` that carry line `l`.
    pub fn line_edges_at(&self, adj: &[Vec<usize>], v: usize, l: usize) -> Vec<usize> {
        adj[v].iter().copied().filter(|&e| self.edges[e].has_line(l)).collect()
    }

    /// Drops nodes without incident edges, renumbering edge endpoints.
    pub fn remove_isolated_nodes(&mut self) {
        let adj = self.adjacency();
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut kept = Vec::with_capacity(self.nodes.len());
        for (i, n) in std::mem::take(&mut self.nodes).into_iter().enumerate() {
            if !adj[i].is_empty() {
                remap[i] = kept.len();
                kept.push(n);
            }
        }
        self.nodes = kept;
        for e in &mut self.edges {
            e.a = remap[e.a];
            e.b = remap[e.b];
        }
    }

    /// Checks the structural invariants of a line graph.
    pub fn validate(&self) -> Result<(), GraphError> {
        let mut ids = HashSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id.as_str()) {
                return Err(schema(format!("duplicate node id {}", n.id)));
            }
            if !n.pos.is_finite() {
                return Err(schema(format!("node {} has a non-finite location", n.id)));
            }
        }
        let mut eids = HashSet::new();
        for e in &self.edges {
            if !eids.insert(e.id.as_str()) {
                return Err(schema(format!("duplicate edge id {}", e.id)));
            }
            if e.a >= self.nodes.len() || e.b >= self.nodes.len() {
                return Err(schema(format!("edge {} references a missing node", e.id)));
            }
            if e.a == e.b {
                return Err(schema(format!("edge {} is a self-loop", e.id)));
            }
            if e.lines.is_empty() {
                return Err(schema(format!("edge {} carries no lines", e.id)));
            }
            if e.lines.windows(2).any(|w| w[0] >= w[1]) || *e.lines.last().unwrap() >= self.lines.len() {
                return Err(schema(format!("edge {} has an invalid line set", e.id)));
            }
            let (pa, pb) = (self.nodes[e.a].pos, self.nodes[e.b].pos);
            if e.path.first().dist(pa) > ENDPOINT_TOL || e.path.last().dist(pb) > ENDPOINT_TOL {
                return Err(schema(format!("edge {} path does not meet its endpoints", e.id)));
            }
        }
        let mut lids = HashSet::new();
        for l in &self.lines {
            if !lids.insert(l.id.as_str()) {
                return Err(schema(format!("duplicate line id {}", l.id)));
            }
            if l.label.is_empty() {
                return Err(schema(format!("line {} has an empty label", l.id)));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, GraphError> {
        if self.edges.is_empty() {
            return Err(schema("line graph has no edges"));
        }
        self.validate()?;
        let doc = GraphDoc::from_graph(self);
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<LineGraph, GraphError> {
        let doc: GraphDoc = serde_json::from_str(s)?;
        let g = doc.into_graph()?;
        g.validate()?;
        Ok(g)
    }
}

pub fn save_line_graph(g: &LineGraph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    let s = g.to_json()?;
    std::fs::write(path.as_ref(), s).map_err(|source| GraphError::Io {
        path: path.as_ref().display().to_string(),
        source,
    })
}

pub fn load_line_graph(path: impl AsRef<Path>) -> Result<LineGraph, GraphError> {
    let s = std::fs::read_to_string(path.as_ref()).map_err(|source| GraphError::Io {
        path: path.as_ref().display().to_string(),
        source,
    })?;
    LineGraph::from_json(&s)
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphDoc {
    nodes: Vec<NodeDoc>,
    edges: Vec<EdgeDoc>,
    lines: Vec<TransitLine>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeDoc {
    id: String,
    kind: String,
    x: f64,
    y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    station_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDoc {
    id: String,
    a: String,
    b: String,
    lines: Vec<String>,
    path: Vec<Point>,
}

impl GraphDoc {
    fn from_graph(g: &LineGraph) -> GraphDoc {
        GraphDoc {
            nodes: g
                .nodes
                .iter()
                .map(|n| {
                    let (kind, station_id, name) = match &n.kind {
                        NodeKind::Station { station_id, name } => {
                            ("station", Some(station_id.clone()), Some(name.clone()))
                        }
                        NodeKind::Auxiliary => ("auxiliary", None, None),
                    };
                    NodeDoc {
                        id: n.id.clone(),
                        kind: kind.into(),
                        x: n.pos.x,
                        y: n.pos.y,
                        station_id,
                        name,
                    }
                })
                .collect(),
            edges: g
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id.clone(),
                    a: g.nodes[e.a].id.clone(),
                    b: g.nodes[e.b].id.clone(),
                    lines: e.lines.iter().map(|&l| g.lines[l].id.clone()).collect(),
                    path: e.path.points().to_vec(),
                })
                .collect(),
            lines: g.lines.clone(),
        }
    }

    fn into_graph(self) -> Result<LineGraph, GraphError> {
        let mut node_ix = HashMap::new();
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for n in self.nodes {
            let kind = match n.kind.as_str() {
                "station" => NodeKind::Station {
                    station_id: n.station_id.unwrap_or_else(|| n.id.clone()),
                    name: n.name.unwrap_or_default(),
                },
                "auxiliary" => NodeKind::Auxiliary,
                other => return Err(schema(format!("unknown node kind {other:?}"))),
            };
            node_ix.insert(n.id.clone(), nodes.len());
            nodes.push(Node {
                id: n.id,
                kind,
                pos: Point::new(n.x, n.y),
            });
        }
        let line_ix: HashMap<&str, usize> =
            self.lines.iter().enumerate().map(|(i, l)| (l.id.as_str(), i)).collect();
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in self.edges {
            let a = *node_ix
                .get(&e.a)
                .ok_or_else(|| schema(format!("edge {} references unknown node {}", e.id, e.a)))?;
            let b = *node_ix
                .get(&e.b)
                .ok_or_else(|| schema(format!("edge {} references unknown node {}", e.id, e.b)))?;
            let mut lines = e
                .lines
                .iter()
                .map(|l| {
                    line_ix
                        .get(l.as_str())
                        .copied()
                        .ok_or_else(|| schema(format!("edge {} references unknown line {l}", e.id)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            lines.sort_unstable();
            lines.dedup();
            let path = Polyline::new(e.path)
                .map_err(|err| schema(format!("edge {} path: {err}", e.id)))?;
            edges.push(Edge {
                id: e.id,
                a,
                b,
                lines,
                path,
            });
        }
        Ok(LineGraph {
            nodes,
            edges,
            lines: self.lines,
        })
    }
}

/// One ordering of `L(e)` per edge: `edges[e][p]` is the line at position
/// `p + 1`, positions counted from the left of the edge's canonical direction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Ordering {
    pub edges: Vec<Vec<usize>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrderingError {
    #[error("ordering covers {got} edges, graph has {expected}")]
    EdgeCount { expected: usize, got: usize },
    #[error("ordering of edge {0} is not a permutation of its lines")]
    NotAPermutation(String),
    #[error("ordering references unknown edge {0}")]
    UnknownEdge(String),
    #[error("ordering references unknown line {0}")]
    UnknownLine(String),
    #[error("ordering lacks edge {0}")]
    MissingEdge(String),
}

impl Ordering {
    /// Lines of every edge in ascending index order.
    pub fn identity(g: &LineGraph) -> Ordering {
        Ordering {
            edges: g.edges.iter().map(|e| e.lines.clone()).collect(),
        }
    }

    pub fn validate(&self, g: &LineGraph) -> Result<(), OrderingError> {
        if self.edges.len() != g.edges.len() {
            return Err(OrderingError::EdgeCount {
                expected: g.edges.len(),
                got: self.edges.len(),
            });
        }
        for (o, e) in self.edges.iter().zip(&g.edges) {
            let mut s = o.clone();
            s.sort_unstable();
            if s != e.lines {
                return Err(OrderingError::NotAPermutation(e.id.clone()));
            }
        }
        Ok(())
    }

    /// 1-based position of every line per edge, `u32::MAX` for absent lines.
    pub fn positions(&self, n_lines: usize) -> Vec<Vec<u32>> {
        self.edges
            .iter()
            .map(|o| {
                let mut pos = vec![u32::MAX; n_lines];
                for (p, &l) in o.iter().enumerate() {
                    pos[l] = p as u32 + 1;
                }
                pos
            })
            .collect()
    }

    pub fn to_doc(&self, g: &LineGraph) -> BTreeMap<String, Vec<String>> {
        g.edges
            .iter()
            .zip(&self.edges)
            .map(|(e, o)| (e.id.clone(), o.iter().map(|&l| g.lines[l].id.clone()).collect()))
            .collect()
    }

    pub fn from_doc(g: &LineGraph, doc: &BTreeMap<String, Vec<String>>) -> Result<Ordering, OrderingError> {
        let eix: HashMap<&str, usize> = g.edges.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
        let lix: HashMap<&str, usize> = g.lines.iter().enumerate().map(|(i, l)| (l.id.as_str(), i)).collect();
        let mut edges: Vec<Option<Vec<usize>>> = vec![None; g.edges.len()];
        for (eid, lines) in doc {
            let ei = *eix
                .get(eid.as_str())
                .ok_or_else(|| OrderingError::UnknownEdge(eid.clone()))?;
            let o = lines
                .iter()
                .map(|l| lix.get(l.as_str()).copied().ok_or_else(|| OrderingError::UnknownLine(l.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            edges[ei] = Some(o);
        }
        let edges = edges
            .into_iter()
            .enumerate()
            .map(|(i, o)| o.ok_or_else(|| OrderingError::MissingEdge(g.edges[i].id.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let ord = Ordering { edges };
        ord.validate(g)?;
        Ok(ord)
    }
}
