//! Line graph construction: edges of the raw network that run along a
//! shared corridor are merged pairwise until no shared segment remains.

use std::cmp::Ordering as CmpOrdering;
use std::collections::{BinaryHeap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{average_path, shared_segments, GeometryError, Point, Polyline, SharedSegment, SweepParams};
use crate::graph::{Edge, GraphError, LineGraph, Node, NodeKind};
use crate::gtfs::RawNetwork;

#[derive(Debug, Error)]
pub enum LineGraphError {
    #[error("merging did not converge after {merges} merges")]
    NonTermination { merges: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Order in which candidate merges are processed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MergeOrder {
    /// Longest shared extent first, ties by edge creation order.
    #[default]
    LongestFirst,
    /// Random priorities from the given seed.
    Shuffled(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BuildParams {
    pub sweep: SweepParams,
    pub order: MergeOrder,
}

/// A constructed graph together with merge statistics.
#[derive(Debug, Clone)]
pub struct Construction {
    pub graph: LineGraph,
    pub merges: usize,
    /// Candidate pairs whose merge would have produced a self-loop.
    pub rejected: usize,
}

struct WorkEdge {
    a: usize,
    b: usize,
    lines: Vec<usize>,
    path: Polyline,
    lo: Point,
    hi: Point,
    alive: bool,
}

struct Candidate {
    key: f64,
    i: usize,
    j: usize,
    seg: SharedSegment,
}

impl PartialEq for Candidate {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == CmpOrdering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, o: &Self) -> Option<CmpOrdering> {
        Some(self.cmp(o))
    }
}

impl Ord for Candidate {
    // max-heap: larger key first, then smaller indices first
    fn cmp(&self, o: &Self) -> CmpOrdering {
        self.key
            .total_cmp(&o.key)
            .then_with(|| o.i.cmp(&self.i))
            .then_with(|| o.j.cmp(&self.j))
    }
}

/// Replaces or extends the ends of `path` so that it runs from `pa` to `pb`.
fn fit(path: &Polyline, pa: Point, pb: Point) -> Polyline {
    let mut pts = path.points().to_vec();
    if pts[0].dist(pa) > 1.0 {
        pts.insert(0, pa);
    } else {
        pts[0] = pa;
    }
    let n = pts.len();
    if pts[n - 1].dist(pb) > 1.0 {
        pts.push(pb);
    } else {
        pts[n - 1] = pb;
    }
    Polyline::new(pts).unwrap_or_else(|_| Polyline::new([pa, pb]).expect("distinct endpoints"))
}

struct Stub {
    far: usize,
    len: f64,
    /// Edge index and parameter range, from the far node towards the merge.
    edge: usize,
    range: (f64, f64),
}

struct Builder {
    nodes: Vec<Node>,
    edges: Vec<WorkEdge>,
    sweep: SweepParams,
    aux: usize,
}

impl Builder {
    fn push_edge(&mut self, a: usize, b: usize, lines: Vec<usize>, path: Polyline) -> usize {
        let (lo, hi) = path.bbox();
        self.edges.push(WorkEdge {
            a,
            b,
            lines,
            path,
            lo,
            hi,
            alive: true,
        });
        self.edges.len() - 1
    }

    fn near(&self, i: usize, j: usize) -> bool {
        let (x, y) = (&self.edges[i], &self.edges[j]);
        let d = self.sweep.d_hat;
        x.lo.x - d <= y.hi.x && y.lo.x - d <= x.hi.x && x.lo.y - d <= y.hi.y && y.lo.y - d <= x.hi.y
    }

    /// Longest shared segment of edges `i < j`, oriented along `i`, with its
    /// extent.
    fn best_shared(&self, i: usize, j: usize) -> Option<(f64, SharedSegment)> {
        let (pa, pb) = (&self.edges[i].path, &self.edges[j].path);
        let forward = shared_segments(pa, pb, &self.sweep);
        let backward = shared_segments(pb, pa, &self.sweep).into_iter().map(|s| s.swapped());
        forward
            .into_iter()
            .chain(backward)
            .map(|s| (s.extent_a(pa).min(s.extent_b(pb)), s))
            .filter(|(x, _)| *x >= self.sweep.min_seg_len)
            .max_by(|x, y| x.0.total_cmp(&y.0))
    }

    /// Picks the node a merge side attaches to, contracting the shorter
    /// stub into its far node if it is below the minimum segment length.
    /// Returns the node (or `None` for a fresh auxiliary node) and the stubs
    /// to keep.
    fn resolve_side(&self, s1: Stub, s2: Stub) -> (Option<usize>, Vec<Stub>) {
        let min = self.sweep.min_seg_len;
        let (short1, short2) = (s1.len < min, s2.len < min);
        if short1 && short2 && s1.far == s2.far {
            return (Some(s1.far), vec![]);
        }
        match (short1, short2) {
            (true, true) if s2.len < s1.len => (Some(s2.far), vec![s1]),
            (true, _) => (Some(s1.far), vec![s2]),
            (false, true) => (Some(s2.far), vec![s1]),
            (false, false) => (None, vec![s1, s2]),
        }
    }

    fn aux_node(&mut self, pos: Point) -> usize {
        self.aux += 1;
        self.nodes.push(Node {
            id: format!("aux{}", self.aux),
            kind: NodeKind::Auxiliary,
            pos,
        });
        self.nodes.len() - 1
    }

    /// Merges the shared segment of edges `i` and `j`; returns the new edges,
    /// or `None` if the merge would create a self-loop.
    fn merge(&mut self, i: usize, j: usize, seg: SharedSegment) -> Result<Option<Vec<usize>>, LineGraphError> {
        let (e1, e2) = (&self.edges[i], &self.edges[j]);
        let (l1, l2) = (e1.path.length(), e2.path.length());
        let (ta0, ta1) = seg.range_a;
        let (tb0, tb1) = seg.range_b;
        let avg = match average_path(&e1.path, seg.range_a, &e2.path, seg.range_b, self.sweep.step_m) {
            Ok(p) => p,
            Err(GeometryError::DegenerateSegment) => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let u1 = Stub {
            far: e1.a,
            len: ta0 * l1,
            edge: i,
            range: (0.0, ta0),
        };
        let v1 = Stub {
            far: e1.b,
            len: (1.0 - ta1) * l1,
            edge: i,
            range: (1.0, ta1),
        };
        let (u2, v2) = if !seg.is_reversed() {
            (
                Stub {
                    far: e2.a,
                    len: tb0 * l2,
                    edge: j,
                    range: (0.0, tb0),
                },
                Stub {
                    far: e2.b,
                    len: (1.0 - tb1) * l2,
                    edge: j,
                    range: (1.0, tb1),
                },
            )
        } else {
            (
                Stub {
                    far: e2.b,
                    len: (1.0 - tb0) * l2,
                    edge: j,
                    range: (1.0, tb0),
                },
                Stub {
                    far: e2.a,
                    len: tb1 * l2,
                    edge: j,
                    range: (0.0, tb1),
                },
            )
        };
        let (un, ustubs) = self.resolve_side(u1, u2);
        let (vn, vstubs) = self.resolve_side(v1, v2);
        if un.is_some() && un == vn {
            return Ok(None);
        }
        let side_ok = |n: Option<usize>, stubs: &[Stub]| stubs.iter().all(|s| Some(s.far) != n);
        if !side_ok(un, &ustubs) || !side_ok(vn, &vstubs) {
            return Ok(None);
        }
        let mut lines: Vec<usize> = e1.lines.iter().chain(&e2.lines).copied().collect();
        lines.sort_unstable();
        lines.dedup();

        let u = match un {
            Some(n) => n,
            None => self.aux_node(avg.first()),
        };
        let v = match vn {
            Some(n) => n,
            None => self.aux_node(avg.last()),
        };
        let (pu, pv) = (self.nodes[u].pos, self.nodes[v].pos);
        if pu.dist(pv) < 1e-6 && avg.length() < self.sweep.min_seg_len {
            return Ok(None);
        }
        let mut stub_edges = Vec::new();
        for (node, stubs) in [(u, ustubs), (v, vstubs)] {
            for s in stubs {
                let src = &self.edges[s.edge];
                let far_pos = self.nodes[s.far].pos;
                let path = src
                    .path
                    .sub(s.range.0, s.range.1)
                    .map(|p| fit(&p, far_pos, self.nodes[node].pos))
                    .unwrap_or_else(|_| Polyline::new([far_pos, self.nodes[node].pos]).expect("distinct stub ends"));
                stub_edges.push((s.far, node, src.lines.clone(), path));
            }
        }
        self.edges[i].alive = false;
        self.edges[j].alive = false;
        let mut created = vec![self.push_edge(u, v, lines, fit(&avg, pu, pv))];
        for (a, b, ls, p) in stub_edges {
            created.push(self.push_edge(a, b, ls, p));
        }
        Ok(Some(created))
    }
}

impl Builder {
    fn alive(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| self.edges[e].alive)
    }

    /// Whether two edges with the same end nodes run within `d_hat` of each
    /// other everywhere (sampled at the sweep step).
    fn coincide(&self, i: usize, j: usize) -> bool {
        let (p, q) = (&self.edges[i].path, &self.edges[j].path);
        let within = |a: &Polyline, b: &Polyline| {
            let n = (a.length() / self.sweep.step_m).ceil().max(1.0) as usize;
            a.resample(n).into_iter().all(|x| b.nearest_linear(x).1 <= self.sweep.d_hat)
        };
        within(p, q) && within(q, p)
    }

    /// Fuses coinciding parallel edges and contracts edges shorter than
    /// `d_hat` that end in an auxiliary node. These are leftovers of merges
    /// whose stubs were too short to form shared segments on their own.
    /// Returns the edges created.
    fn cleanup(&mut self) -> Vec<usize> {
        let mut created = Vec::new();
        let edges: Vec<usize> = self.alive().collect();
        for (k, &i) in edges.iter().enumerate() {
            for &j in &edges[k + 1..] {
                if !self.edges[i].alive || !self.edges[j].alive {
                    continue;
                }
                let (x, y) = (&self.edges[i], &self.edges[j]);
                let same_ends = (x.a, x.b) == (y.a, y.b) || (x.a, x.b) == (y.b, y.a);
                if !same_ends || !self.coincide(i, j) {
                    continue;
                }
                let mut lines: Vec<usize> = x.lines.iter().chain(&y.lines).copied().collect();
                lines.sort_unstable();
                lines.dedup();
                let (a, b, path) = (x.a, x.b, x.path.clone());
                self.edges[i].alive = false;
                self.edges[j].alive = false;
                created.push(self.push_edge(a, b, lines, path));
            }
        }
        if !created.is_empty() {
            return created;
        }
        let short = self.alive().find(|&e| {
            let x = &self.edges[e];
            x.path.length() < self.sweep.d_hat && (!self.nodes[x.a].is_station() || !self.nodes[x.b].is_station())
        });
        let Some(e) = short else {
            return created;
        };
        let (a, b) = (self.edges[e].a, self.edges[e].b);
        let (keep, gone) = if self.nodes[b].is_station() { (b, a) } else { (a, b) };
        // another edge between the two nodes would become a loop
        let looped = self.alive().any(|f| {
            f != e && {
                let y = &self.edges[f];
                (y.a == keep && y.b == gone) || (y.a == gone && y.b == keep)
            }
        });
        if looped {
            return created;
        }
        self.edges[e].alive = false;
        let incident: Vec<usize> = self.alive().filter(|&f| self.edges[f].a == gone || self.edges[f].b == gone).collect();
        for f in incident {
            let y = &self.edges[f];
            let (na, nb) = (if y.a == gone { keep } else { y.a }, if y.b == gone { keep } else { y.b });
            let path = fit(&y.path, self.nodes[na].pos, self.nodes[nb].pos);
            let lines = y.lines.clone();
            self.edges[f].alive = false;
            created.push(self.push_edge(na, nb, lines, path));
        }
        created
    }
}

/// Merges shared segments of `raw` until none of at least
/// `min_seg_len` remains.
pub fn construct(raw: &RawNetwork, params: &BuildParams) -> Result<Construction, LineGraphError> {
    let mut b = Builder {
        nodes: raw
            .stations
            .iter()
            .map(|s| Node {
                id: s.id.clone(),
                kind: NodeKind::Station {
                    station_id: s.id.clone(),
                    name: s.name.clone(),
                },
                pos: s.pos,
            })
            .collect(),
        edges: Vec::new(),
        sweep: params.sweep,
        aux: 0,
    };
    for e in &raw.edges {
        let (pa, pb) = (raw.stations[e.a].pos, raw.stations[e.b].pos);
        b.push_edge(e.a, e.b, vec![e.line], fit(&e.path, pa, pb));
    }
    let mut rng = match params.order {
        MergeOrder::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        MergeOrder::LongestFirst => None,
    };
    let mut heap = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<Candidate>, rng: &mut Option<ChaCha8Rng>, i, j, (extent, seg)| {
        let key = match rng {
            Some(r) => r.gen::<f64>(),
            None => extent,
        };
        heap.push(Candidate { key, i, j, seg });
    };
    for i in 0..b.edges.len() {
        for j in i + 1..b.edges.len() {
            if b.near(i, j) {
                if let Some(c) = b.best_shared(i, j) {
                    push(&mut heap, &mut rng, i, j, c);
                }
            }
        }
    }
    let segments: usize = raw.edges.iter().map(|e| e.path.segment_count()).sum();
    let bound = 10 * (segments + raw.edges.len()) + 100;
    let mut merges = 0;
    let mut rejected = HashSet::new();
    let candidates_for = |b: &Builder, heap: &mut BinaryHeap<Candidate>, rng: &mut Option<ChaCha8Rng>, created: &[usize]| {
        for &n in created {
            for o in 0..b.edges.len() {
                if o == n || !b.edges[o].alive || (created.contains(&o) && o < n) {
                    continue;
                }
                if b.near(n, o) {
                    let (x, y) = (n.min(o), n.max(o));
                    if let Some(c) = b.best_shared(x, y) {
                        push(heap, rng, x, y, c);
                    }
                }
            }
        }
    };
    loop {
        while let Some(c) = heap.pop() {
            if !b.edges[c.i].alive || !b.edges[c.j].alive {
                continue;
            }
            let Some(created) = b.merge(c.i, c.j, c.seg)? else {
                rejected.insert((c.i, c.j));
                continue;
            };
            merges += 1;
            if merges > bound {
                return Err(LineGraphError::NonTermination { merges });
            }
            candidates_for(&b, &mut heap, &mut rng, &created);
        }
        let touched = b.cleanup();
        if touched.is_empty() {
            break;
        }
        candidates_for(&b, &mut heap, &mut rng, &touched);
    }
    let rejected = rejected
        .iter()
        .filter(|&&(i, j)| b.edges[i].alive && b.edges[j].alive)
        .count();
    let edges: Vec<Edge> = b
        .edges
        .into_iter()
        .filter(|e| e.alive)
        .enumerate()
        .map(|(k, e)| Edge {
            id: format!("e{k}"),
            a: e.a,
            b: e.b,
            lines: e.lines,
            path: e.path,
        })
        .collect();
    let mut graph = LineGraph {
        nodes: b.nodes,
        edges,
        lines: raw.lines.clone(),
    };
    graph.remove_isolated_nodes();
    graph.validate()?;
    Ok(Construction { graph, merges, rejected })
}

pub fn construct_line_graph(raw: &RawNetwork, params: &BuildParams) -> Result<LineGraph, LineGraphError> {
    construct(raw, params).map(|c| c.graph)
}

/// All pairs of edges of `g` that still share a segment under `sweep`.
pub fn remaining_shared(g: &LineGraph, sweep: &SweepParams) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..g.edges.len() {
        for j in i + 1..g.edges.len() {
            let (a, b) = (&g.edges[i].path, &g.edges[j].path);
            let hit = shared_segments(a, b, sweep)
                .into_iter()
                .chain(shared_segments(b, a, sweep).into_iter().map(|s| s.swapped()))
                .any(|s| s.extent_a(a).min(s.extent_b(b)) >= sweep.min_seg_len);
            if hit {
                out.push((i, j));
            }
        }
    }
    out
}
