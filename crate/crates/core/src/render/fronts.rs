use crate::geometry::{
    convex_hull, offset_polyline, project_on_segment, segment_intersection, OffsetOptions, Point, Polyline,
};
use crate::graph::{LineGraph, Ordering};
use crate::instance::direction_at;

use super::{RenderError, RenderStyle};

/// Trimmed bands shorter than this are drawn as ports only.
const MIN_BAND_LEN: f64 = 1e-6;
/// Opposite fronts this close to a straight angle need no room when their
/// common lines line up.
const STRAIGHT_COS: f64 = -0.996_194_698_091_745_5; // cos(175 deg)
const BUFFER_SAMPLES: usize = 16;

/// Offset of the line at 1-based position `p` among `n`, measured to the
/// left of the edge's canonical direction. The band of `n` lines of width
/// `w` is centered on the edge path.
pub fn lateral_offset(n: usize, p: usize, w: f64) -> f64 {
    w * n as f64 / 2.0 - w / 2.0 - w * (p as f64 - 1.0)
}

/// The drawn course of one line along one edge, in canonical direction.
#[derive(Debug, Clone, PartialEq)]
pub struct LineBand {
    pub edge: usize,
    pub line: usize,
    /// 1-based position in the edge's ordering.
    pub position: usize,
    pub points: Vec<Point>,
}

/// The side of a node's area facing one incident edge. `ports[i]` is where
/// the line `lines[i]` (at position `i + 1`) meets the node; `baseline`
/// runs from the position-1 side to the other side.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeFront {
    pub node: usize,
    pub edge: usize,
    pub lines: Vec<usize>,
    pub baseline: (Point, Point),
    pub ports: Vec<Point>,
    /// Unit vector pointing from the node into the edge.
    pub normal: Point,
    /// Arc length between the node and the front along the edge path.
    pub expansion: f64,
}

impl NodeFront {
    pub fn port_of(&self, line: usize) -> Option<Point> {
        self.lines.iter().position(|&l| l == line).map(|i| self.ports[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeShape {
    pub node: usize,
    /// One front per incident edge, by ascending edge index.
    pub fronts: Vec<NodeFront>,
    /// Buffered hull of the fronts, counter-clockwise.
    pub polygon: Vec<Point>,
    /// False when the expansion limit stopped the fronts before every pair
    /// of bands had room.
    pub resolved: bool,
}

/// Every line of every edge offset along the full edge path.
pub fn offset_lines(g: &LineGraph, o: &Ordering, style: &RenderStyle) -> Result<Vec<LineBand>, RenderError> {
    o.validate(g)?;
    let w = style.line_width;
    let mut out = Vec::new();
    for (e, ord) in o.edges.iter().enumerate() {
        for (i, &l) in ord.iter().enumerate() {
            let path = offset_polyline(&g.edges[e].path, lateral_offset(ord.len(), i + 1, w), &OffsetOptions::default())?;
            out.push(LineBand {
                edge: e,
                line: l,
                position: i + 1,
                points: path.points().to_vec(),
            });
        }
    }
    Ok(out)
}

fn seg_dist(a0: Point, a1: Point, b0: Point, b1: Point) -> f64 {
    if segment_intersection(a0, a1, b0, b1).is_some() {
        return 0.0;
    }
    let pd = |p: Point, s0: Point, s1: Point| s0.lerp(s1, project_on_segment(s0, s1, p)).dist(p);
    pd(a0, b0, b1).min(pd(a1, b0, b1)).min(pd(b0, a0, a1)).min(pd(b1, a0, a1))
}

fn chain_dist(a: &[Point], b: &[Point]) -> f64 {
    let segs = |c: &[Point]| -> Vec<(Point, Point)> {
        if c.len() == 1 {
            vec![(c[0], c[0])]
        } else {
            c.windows(2).map(|w| (w[0], w[1])).collect()
        }
    };
    let (sa, sb) = (segs(a), segs(b));
    let mut best = f64::INFINITY;
    for &(a0, a1) in &sa {
        for &(b0, b1) in &sb {
            best = best.min(seg_dist(a0, a1, b0, b1));
        }
    }
    best
}

/// Converts arc length measured from `v` into arc length along the path.
fn from_node(g: &LineGraph, e: usize, v: usize, s: f64) -> f64 {
    let edge = &g.edges[e];
    if edge.a == v {
        s
    } else {
        edge.path.length() - s
    }
}

/// Centerline points between `t` and `t + window` from `v`, not past the
/// middle of the edge.
fn window(g: &LineGraph, e: usize, v: usize, t: f64, window: f64) -> Vec<Point> {
    let path = &g.edges[e].path;
    let s1 = (t + window).min(path.length() / 2.0).max(t);
    let (a, b) = (from_node(g, e, v, t), from_node(g, e, v, s1));
    match path.sub_dist(a, b) {
        Ok(p) if (s1 - t) > MIN_BAND_LEN => p.points().to_vec(),
        _ => vec![path.point_at_dist(a)],
    }
}

/// Offset to the left of the direction leaving `v` for every line of `e`.
fn outward_offsets(g: &LineGraph, o: &Ordering, e: usize, v: usize, w: f64) -> Vec<(usize, f64)> {
    let ord = &o.edges[e];
    let sign = if g.edges[e].a == v { 1.0 } else { -1.0 };
    ord.iter()
        .enumerate()
        .map(|(i, &l)| (l, sign * lateral_offset(ord.len(), i + 1, w)))
        .collect()
}

fn straight_through(g: &LineGraph, o: &Ordering, v: usize, e: usize, f: usize, w: f64) -> bool {
    let (de, df) = (direction_at(g, e, v).unit(), direction_at(g, f, v).unit());
    if de.dot(df) > STRAIGHT_COS {
        return false;
    }
    let (oe, of) = (outward_offsets(g, o, e, v, w), outward_offsets(g, o, f, v, w));
    oe.iter().all(|&(l, se)| {
        of.iter()
            .find(|&&(m, _)| m == l)
            .is_none_or(|&(_, sf)| (se + sf).abs() <= 1e-9 * w.max(1.0))
    })
}

/// Expansion of each incident edge's front at `v`, by adjacency order.
fn expand_at(g: &LineGraph, o: &Ordering, adj: &[usize], v: usize, style: &RenderStyle, max_exp: f64) -> (Vec<f64>, bool) {
    let w = style.line_width;
    let mut t = vec![0.0; adj.len()];
    if adj.len() < 2 {
        return (t, true);
    }
    let cap: Vec<f64> = adj.iter().map(|&e| max_exp.min(g.edges[e].path.length() / 2.0)).collect();
    let half: Vec<f64> = adj.iter().map(|&e| g.edges[e].lines.len() as f64 * w / 2.0).collect();
    let reach = max_exp + w * g.max_lines_per_edge() as f64;
    let mut pairs = Vec::new();
    for i in 0..adj.len() {
        for j in i + 1..adj.len() {
            if !straight_through(g, o, v, adj[i], adj[j], w) {
                pairs.push((i, j));
            }
        }
    }
    loop {
        let mut violated = false;
        let mut grew = false;
        let mut next = t.clone();
        for &(i, j) in &pairs {
            let a = window(g, adj[i], v, t[i], reach);
            let b = window(g, adj[j], v, t[j], reach);
            if chain_dist(&a, &b) - half[i] - half[j] >= w - 1e-9 {
                continue;
            }
            violated = true;
            for k in [i, j] {
                if t[k] < cap[k] {
                    next[k] = (t[k] + w / 2.0).min(cap[k]);
                    grew = true;
                }
            }
        }
        t = next;
        if !violated {
            return (t, true);
        }
        if !grew {
            return (t, false);
        }
    }
}

/// The edge path between its two fronts, or a single point and direction
/// when the fronts meet.
enum Trimmed {
    Path(Polyline),
    Point(Point, Point),
}

fn trim(g: &LineGraph, e: usize, ta: f64, tb: f64) -> Trimmed {
    let path = &g.edges[e].path;
    let len = path.length();
    if len - ta - tb > MIN_BAND_LEN {
        if let Ok(p) = path.sub_dist(ta, len - tb) {
            return Trimmed::Path(p);
        }
    }
    let mid = ta + (len - ta - tb).max(0.0) / 2.0;
    Trimmed::Point(path.point_at_dist(mid), path.tangent_at_dist(mid))
}

/// Point and unit canonical tangent of the trimmed path at the `a` or `b` end.
fn end_frame(tr: &Trimmed, at_a: bool) -> (Point, Point) {
    match tr {
        Trimmed::Point(p, d) => (*p, *d),
        Trimmed::Path(pl) => {
            let pts = pl.points();
            if at_a {
                (pts[0], pts[1].sub(pts[0]).unit())
            } else {
                let n = pts.len();
                (pts[n - 1], pts[n - 1].sub(pts[n - 2]).unit())
            }
        }
    }
}

fn buffered_hull(points: &[Point], r: f64) -> Vec<Point> {
    let hull = convex_hull(points);
    let mut ring = Vec::with_capacity(hull.len() * BUFFER_SAMPLES);
    for p in &hull {
        for k in 0..BUFFER_SAMPLES {
            let a = std::f64::consts::TAU * k as f64 / BUFFER_SAMPLES as f64;
            ring.push(Point::new(p.x + r * a.cos(), p.y + r * a.sin()));
        }
    }
    convex_hull(&ring)
}

/// Pushes the fronts of every node back along its edges until the bands of
/// distinct edges keep at least one line width apart near the node (or the
/// expansion limit is hit), then places ports and builds node polygons.
pub fn expand_node_fronts(g: &LineGraph, o: &Ordering, style: &RenderStyle) -> Vec<NodeShape> {
    let adj = g.adjacency();
    let w = style.line_width;
    let max_exp = style.max_expansion_for(g);
    let expansions: Vec<(Vec<f64>, bool)> = (0..g.nodes.len())
        .map(|v| expand_at(g, o, &adj[v], v, style, max_exp))
        .collect();
    let trim_at = |e: usize, v: usize| {
        let k = adj[v].iter().position(|&x| x == e).unwrap();
        expansions[v].0[k]
    };
    let trimmed: Vec<Trimmed> = (0..g.edges.len())
        .map(|e| trim(g, e, trim_at(e, g.edges[e].a), trim_at(e, g.edges[e].b)))
        .collect();
    (0..g.nodes.len())
        .map(|v| {
            let mut incident = adj[v].clone();
            incident.sort_unstable();
            incident.dedup();
            let fronts: Vec<NodeFront> = incident
                .iter()
                .map(|&e| {
                    let at_a = g.edges[e].a == v;
                    let (c, tan) = end_frame(&trimmed[e], at_a);
                    let left = tan.perp();
                    let ord = &o.edges[e];
                    let n = ord.len();
                    let ports = (0..n).map(|i| c.add(left.scale(lateral_offset(n, i + 1, w)))).collect();
                    let hw = n as f64 * w / 2.0;
                    NodeFront {
                        node: v,
                        edge: e,
                        lines: ord.clone(),
                        baseline: (c.add(left.scale(hw)), c.sub(left.scale(hw))),
                        ports,
                        normal: if at_a { tan } else { tan.scale(-1.0) },
                        expansion: trim_at(e, v),
                    }
                })
                .collect();
            let mut pts: Vec<Point> = fronts.iter().flat_map(|f| [f.baseline.0, f.baseline.1]).collect();
            if pts.is_empty() {
                pts.push(g.nodes[v].pos);
            }
            NodeShape {
                node: v,
                polygon: buffered_hull(&pts, style.station_buffer),
                fronts,
                resolved: expansions[v].1,
            }
        })
        .collect()
}

/// Line bands between the fronts; the end points are the ports.
pub(super) fn trimmed_bands(g: &LineGraph, o: &Ordering, nodes: &[NodeShape], style: &RenderStyle) -> Result<Vec<LineBand>, RenderError> {
    let w = style.line_width;
    let front = |v: usize, e: usize| nodes[v].fronts.iter().find(|f| f.edge == e).expect("front per incident edge");
    let mut out = Vec::new();
    for (e, ord) in o.edges.iter().enumerate() {
        let edge = &g.edges[e];
        let (fa, fb) = (front(edge.a, e), front(edge.b, e));
        let ta = fa.expansion;
        let tb = fb.expansion;
        let tr = trim(g, e, ta, tb);
        for (i, &l) in ord.iter().enumerate() {
            let mut points = match &tr {
                Trimmed::Path(p) => offset_polyline(p, lateral_offset(ord.len(), i + 1, w), &OffsetOptions::default())?
                    .points()
                    .to_vec(),
                Trimmed::Point(..) => vec![fa.ports[i], fb.ports[i]],
            };
            points[0] = fa.ports[i];
            *points.last_mut().unwrap() = fb.ports[i];
            out.push(LineBand {
                edge: e,
                line: l,
                position: i + 1,
                points,
            });
        }
    }
    Ok(out)
}
