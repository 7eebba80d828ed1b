//! SVG rendering of an ordered line graph: offset line bands, node fronts
//! pushed back until connections fit, Bézier connections between ports and
//! buffered station polygons.

mod curves;
mod fronts;
mod svg;

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, Point};
use crate::graph::{LineGraph, Ordering, OrderingError, Rgb};

pub use curves::{inner_connections, Connection};
pub use fronts::{expand_node_fronts, lateral_offset, offset_lines, LineBand, NodeFront, NodeShape};
pub use svg::write_svg;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid render style: {0}")]
    Style(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    #[default]
    Cubic,
    Arc,
    Straight,
}

impl std::str::FromStr for CurveKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cubic" | "bezier" => Ok(CurveKind::Cubic),
            "arc" => Ok(CurveKind::Arc),
            "straight" => Ok(CurveKind::Straight),
            _ => Err(format!("unknown curve type {s:?} (expected cubic, arc or straight)")),
        }
    }
}

/// Drawing parameters. Lengths are in map units (meters).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderStyle {
    pub line_width: f64,
    /// Maximum distance a node front may move from the node; `None` means
    /// `4 * line_width * M`.
    pub max_expansion: Option<f64>,
    pub station_buffer: f64,
    pub curve: CurveKind,
    /// Stroke width of a line relative to `line_width`.
    pub stroke_ratio: f64,
    pub margin: f64,
    pub font_size: f64,
    /// Line colors by line id, overriding the graph's colors.
    pub colors: BTreeMap<String, Rgb>,
    pub labels: bool,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            line_width: 10.0,
            max_expansion: None,
            station_buffer: 8.0,
            curve: CurveKind::Cubic,
            stroke_ratio: 0.85,
            margin: 100.0,
            font_size: 40.0,
            colors: BTreeMap::new(),
            labels: true,
        }
    }
}

impl RenderStyle {
    pub fn validate(&self) -> Result<(), RenderError> {
        let positive = [
            ("line_width", self.line_width),
            ("station_buffer", self.station_buffer),
            ("stroke_ratio", self.stroke_ratio),
            ("font_size", self.font_size),
            ("max_expansion", self.max_expansion.unwrap_or(1.0)),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(RenderError::Style(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.margin.is_finite() && self.margin >= 0.0) {
            return Err(RenderError::Style(format!("margin must be non-negative, got {}", self.margin)));
        }
        Ok(())
    }

    pub fn max_expansion_for(&self, g: &LineGraph) -> f64 {
        self.max_expansion
            .unwrap_or(4.0 * self.line_width * g.max_lines_per_edge().max(1) as f64)
    }
}

/// Everything drawn on a map, in drawing order.
#[derive(Debug, Clone, PartialEq)]
pub struct MapLayout {
    pub bands: Vec<LineBand>,
    pub nodes: Vec<NodeShape>,
    pub connections: Vec<Connection>,
}

impl MapLayout {
    pub fn bbox(&self) -> Option<(Point, Point)> {
        let pts = self
            .bands
            .iter()
            .flat_map(|b| b.points.iter())
            .chain(self.nodes.iter().flat_map(|n| n.polygon.iter()))
            .chain(self.connections.iter().flat_map(|c| c.ctrl.iter()));
        let mut it = pts.peekable();
        it.peek()?;
        let (mut lo, mut hi) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in it {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        Some((lo, hi))
    }
}

pub fn layout(g: &LineGraph, o: &Ordering, style: &RenderStyle) -> Result<MapLayout, RenderError> {
    style.validate()?;
    o.validate(g)?;
    let nodes = expand_node_fronts(g, o, style);
    let bands = fronts::trimmed_bands(g, o, &nodes, style)?;
    let connections = inner_connections(g, &nodes, style);
    Ok(MapLayout { bands, nodes, connections })
}

/// Lays out and writes the map as an SVG document.
pub fn render_map(g: &LineGraph, o: &Ordering, style: &RenderStyle, out: &mut impl Write) -> Result<MapLayout, RenderError> {
    let lay = layout(g, o, style)?;
    write_svg(g, &lay, style, out)?;
    Ok(lay)
}

pub fn render_svg_string(g: &LineGraph, o: &Ordering, style: &RenderStyle) -> Result<String, RenderError> {
    let mut buf = Vec::new();
    render_map(g, o, style, &mut buf)?;
    Ok(String::from_utf8(buf).expect("svg output is utf-8"))
}
