use std::io::Write;

use crate::geometry::Point;
use crate::graph::{LineGraph, NodeKind};
use crate::instance::direction_at;

use super::{MapLayout, NodeShape, RenderError, RenderStyle};

fn num(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Maps graph coordinates to SVG coordinates (y down).
struct Frame {
    lo: Point,
    hi: Point,
    margin: f64,
}

impl Frame {
    fn xy(&self, p: Point) -> String {
        format!("{} {}", num(p.x - self.lo.x + self.margin), num(self.hi.y - p.y + self.margin))
    }

    fn size(&self) -> (f64, f64) {
        (self.hi.x - self.lo.x + 2.0 * self.margin, self.hi.y - self.lo.y + 2.0 * self.margin)
    }
}

fn centroid(poly: &[Point]) -> Point {
    let n = poly.len();
    let mut area = 0.0;
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let c = p.cross(q);
        area += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    if area.abs() < 1e-12 {
        let s = poly.iter().fold(Point::default(), |a, &p| a.add(p));
        return s.scale(1.0 / n.max(1) as f64);
    }
    Point::new(cx / (3.0 * area), cy / (3.0 * area))
}

/// Label anchor and direction: the compass direction farthest in angle from
/// every incident edge, just outside the polygon.
fn label_anchor(g: &LineGraph, shape: &NodeShape, style: &RenderStyle) -> (Point, Point) {
    let c = centroid(&shape.polygon);
    let dirs: Vec<Point> = shape.fronts.iter().map(|f| direction_at(g, f.edge, shape.node).unit()).collect();
    let mut best = (f64::NEG_INFINITY, Point::new(1.0, 0.0));
    for k in 0..8 {
        let a = std::f64::consts::FRAC_PI_4 * k as f64;
        let d = Point::new(a.cos(), a.sin());
        let gap = dirs.iter().map(|e| e.dot(d).clamp(-1.0, 1.0).acos()).fold(std::f64::consts::PI, f64::min);
        if gap > best.0 + 1e-9 {
            best = (gap, d);
        }
    }
    let d = best.1;
    let reach = shape.polygon.iter().map(|p| p.sub(c).dot(d)).fold(0.0, f64::max);
    (c.add(d.scale(reach + style.line_width / 2.0)), d)
}

pub fn write_svg(g: &LineGraph, lay: &MapLayout, style: &RenderStyle, out: &mut impl Write) -> Result<(), RenderError> {
    let (lo, hi) = lay.bbox().unwrap_or_default();
    let frame = Frame {
        lo,
        hi,
        margin: style.margin,
    };
    let (w, h) = frame.size();
    let stroke = num(style.line_width * style.stroke_ratio);
    let color = |l: usize| {
        let line = &g.lines[l];
        style.colors.get(&line.id).copied().unwrap_or(line.color).to_string()
    };
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = num(w),
        h = num(h)
    )?;
    writeln!(out, r#"<g id="edges" fill="none" stroke-width="{stroke}">"#)?;
    for b in &lay.bands {
        let d: Vec<String> = b.points.iter().map(|&p| frame.xy(p)).collect();
        writeln!(
            out,
            r#"<path id="band-{}-{}" data-edge="{}" data-line="{}" stroke="{}" d="M {}"/>"#,
            b.edge,
            b.position,
            escape(&g.edges[b.edge].id),
            escape(&g.lines[b.line].id),
            color(b.line),
            d.join(" L ")
        )?;
    }
    writeln!(out, "</g>")?;
    writeln!(out, r#"<g id="connections" fill="none" stroke-width="{stroke}">"#)?;
    for (k, c) in lay.connections.iter().enumerate() {
        let [p0, p1, p2, p3] = c.ctrl;
        writeln!(
            out,
            r#"<path id="conn-{k}" data-node="{}" data-line="{}" stroke="{}" d="M {} C {} {} {}"/>"#,
            escape(&g.nodes[c.node].id),
            escape(&g.lines[c.line].id),
            color(c.line),
            frame.xy(p0),
            frame.xy(p1),
            frame.xy(p2),
            frame.xy(p3)
        )?;
    }
    writeln!(out, "</g>")?;
    writeln!(
        out,
        r##"<g id="stations" fill="#ffffff" stroke="#000000" stroke-width="{}">"##,
        num(style.line_width / 4.0)
    )?;
    for shape in &lay.nodes {
        if !g.nodes[shape.node].is_station() {
            continue;
        }
        let pts: Vec<String> = shape.polygon.iter().map(|&p| frame.xy(p).replace(' ', ",")).collect();
        writeln!(
            out,
            r#"<polygon id="station-{}" data-node="{}" points="{}"/>"#,
            shape.node,
            escape(&g.nodes[shape.node].id),
            pts.join(" ")
        )?;
    }
    writeln!(out, "</g>")?;
    writeln!(
        out,
        r#"<g id="labels" font-family="sans-serif" font-size="{}">"#,
        num(style.font_size)
    )?;
    if style.labels {
        for shape in &lay.nodes {
            let NodeKind::Station { name, .. } = &g.nodes[shape.node].kind else {
                continue;
            };
            let (p, d) = label_anchor(g, shape, style);
            let anchor = if d.x > 0.3 {
                "start"
            } else if d.x < -0.3 {
                "end"
            } else {
                "middle"
            };
            let xy = frame.xy(p);
            let (x, y) = xy.split_once(' ').unwrap();
            writeln!(out, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{}</text>"#, escape(name))?;
        }
    }
    writeln!(out, "</g>")?;
    writeln!(out, "</svg>")?;
    Ok(())
}
