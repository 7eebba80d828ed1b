use crate::geometry::Point;
use crate::graph::LineGraph;

use super::{CurveKind, NodeShape, RenderStyle};

/// A line continuing across a node, drawn as a cubic Bézier curve from its
/// port on the front of `edges.0` to its port on the front of `edges.1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    pub node: usize,
    pub line: usize,
    pub edges: (usize, usize),
    pub ctrl: [Point; 4],
}

impl Connection {
    pub fn point_at(&self, t: f64) -> Point {
        let [p0, p1, p2, p3] = self.ctrl;
        let u = 1.0 - t;
        p0.scale(u * u * u)
            .add(p1.scale(3.0 * u * u * t))
            .add(p2.scale(3.0 * u * t * t))
            .add(p3.scale(t * t * t))
    }

    /// `n + 1` points at equal parameter spacing.
    pub fn sample(&self, n: usize) -> Vec<Point> {
        let n = n.max(1);
        (0..=n).map(|i| self.point_at(i as f64 / n as f64)).collect()
    }
}

fn ray_meet(p: Point, d: Point, q: Point, e: Point) -> Option<Point> {
    let den = d.cross(e);
    if den.abs() < 1e-12 {
        return None;
    }
    let qp = q.sub(p);
    let s = qp.cross(e) / den;
    let u = qp.cross(d) / den;
    (s > 0.0 && u > 0.0).then(|| p.add(d.scale(s)))
}

/// Control points for a curve leaving `p0` against `n0` and entering `p3`
/// along `n3`, where both normals point away from the node.
pub(super) fn control_points(kind: CurveKind, p0: Point, n0: Point, p3: Point, n3: Point) -> [Point; 4] {
    let d = p3.sub(p0);
    let (in0, in3) = (n0.scale(-1.0), n3.scale(-1.0));
    let cubic = || {
        let k = d.norm() / 3.0;
        [p0, p0.add(in0.scale(k)), p3.add(in3.scale(k)), p3]
    };
    match kind {
        CurveKind::Straight => [p0, p0.add(d.scale(1.0 / 3.0)), p0.add(d.scale(2.0 / 3.0)), p3],
        CurveKind::Cubic => cubic(),
        CurveKind::Arc => match ray_meet(p0, in0, p3, in3) {
            Some(q) => [p0, p0.lerp(q, 2.0 / 3.0), p3.lerp(q, 2.0 / 3.0), p3],
            None => cubic(),
        },
    }
}

/// One curve for every line and every pair of incident edges carrying it.
pub fn inner_connections(g: &LineGraph, nodes: &[NodeShape], style: &RenderStyle) -> Vec<Connection> {
    let mut out = Vec::new();
    for shape in nodes {
        for (i, fi) in shape.fronts.iter().enumerate() {
            for fj in &shape.fronts[i + 1..] {
                for &l in &g.edges[fi.edge].lines {
                    let (Some(p0), Some(p3)) = (fi.port_of(l), fj.port_of(l)) else {
                        continue;
                    };
                    out.push(Connection {
                        node: shape.node,
                        line: l,
                        edges: (fi.edge, fj.edge),
                        ctrl: control_points(style.curve, p0, fi.normal, p3, fj.normal),
                    });
                }
            }
        }
    }
    out
}
