//! Planar geometry in projected meters: polylines with arc-length
//! parametrization, nearest-point queries, shared-segment detection,
//! path averaging and perpendicular offsetting.

mod index;
mod offset;
mod shared;

pub use index::SegmentIndex;
pub use offset::{offset_polyline, OffsetOptions, DEFAULT_MITER_LIMIT};
pub use shared::{average_path, shared_segments, SharedSegment, SweepParams};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Points closer than this are treated as identical when building polylines.
pub const POINT_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("parameter {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("polyline needs at least two distinct finite points")]
    TooFewPoints,
    #[error("non-finite coordinate in polyline")]
    NonFinite,
    #[error("sub-polyline collapses to a point")]
    DegenerateSegment,
    #[error("offset of {delta} m leaves unresolved self-intersections")]
    SelfIntersectionUnresolved { delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, o: Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }

    pub fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    pub fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Unit vector, or zero for a zero vector.
    pub fn unit(self) -> Point {
        let n = self.norm();
        if n > 0.0 {
            self.scale(1.0 / n)
        } else {
            Point::default()
        }
    }

    /// Rotated by +90 degrees (to the left of a travel direction).
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        Point::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Parameter of the point on segment `a`-`b` nearest to `q`, clamped to `[0, 1]`.
pub fn project_on_segment(a: Point, b: Point, q: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return 0.0;
    }
    (q.sub(a).dot(ab) / len2).clamp(0.0, 1.0)
}

/// Proper or touching intersection of two segments; returns the parameters on both.
pub fn segment_intersection(a0: Point, a1: Point, b0: Point, b1: Point) -> Option<(f64, f64)> {
    let r = a1.sub(a0);
    let s = b1.sub(b0);
    let denom = r.cross(s);
    if denom.abs() < 1e-15 {
        return None;
    }
    let qp = b0.sub(a0);
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some((t, u))
    } else {
        None
    }
}

/// An ordered sequence of at least two points with a cumulative arc-length table.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<Point>,
    cum: Vec<f64>,
}

impl Serialize for Polyline {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.points.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polyline {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pts = Vec::<Point>::deserialize(d)?;
        Polyline::new(pts).map_err(serde::de::Error::custom)
    }
}

impl Polyline {
    /// Builds a polyline, dropping consecutive duplicate points.
    pub fn new(points: impl IntoIterator<Item = Point>) -> Result<Self, GeometryError> {
        let mut pts: Vec<Point> = Vec::new();
        for p in points {
            if !p.is_finite() {
                return Err(GeometryError::NonFinite);
            }
            if pts.last().is_some_and(|l: &Point| l.dist(p) <= POINT_EPS) {
                continue;
            }
            pts.push(p);
        }
        if pts.len() < 2 {
            return Err(GeometryError::TooFewPoints);
        }
        let mut cum = Vec::with_capacity(pts.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for w in pts.windows(2) {
            acc += w[0].dist(w[1]);
            cum.push(acc);
        }
        Ok(Polyline { points: pts, cum })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn first(&self) -> Point {
        self.points[0]
    }

    pub fn last(&self) -> Point {
        *self.points.last().unwrap()
    }

    pub fn length(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn segment_count(&self) -> usize {
        self.points.len() - 1
    }

    /// Cumulative arc length at vertex `i`.
    pub fn arc_at_vertex(&self, i: usize) -> f64 {
        self.cum[i]
    }

    /// Point at arc-length fraction `t`.
    pub fn param_point(&self, t: f64) -> Result<Point, GeometryError> {
        if !(0.0..=1.0).contains(&t) {
            return Err(GeometryError::OutOfRange(t));
        }
        Ok(self.point_at_dist(t * self.length()))
    }

    /// Point at arc length `s`, clamped to the polyline.
    pub fn point_at_dist(&self, s: f64) -> Point {
        let (i, f) = self.locate(s);
        self.points[i].lerp(self.points[i + 1], f)
    }

    /// Unit tangent at arc length `s`.
    pub fn tangent_at_dist(&self, s: f64) -> Point {
        let (i, _) = self.locate(s);
        self.points[i + 1].sub(self.points[i]).unit()
    }

    /// Segment index and in-segment fraction for arc length `s`.
    fn locate(&self, s: f64) -> (usize, f64) {
        let s = s.clamp(0.0, self.length());
        let idx = match self.cum.binary_search_by(|c| c.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(self.points.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.points.len() - 2),
        };
        let seg = self.cum[idx + 1] - self.cum[idx];
        let f = if seg > 0.0 { (s - self.cum[idx]) / seg } else { 0.0 };
        (idx, f.clamp(0.0, 1.0))
    }

    /// Parameter in `[0,1]` of the point at parameter `f` along segment `seg`.
    pub fn segment_param(&self, seg: usize, f: f64) -> f64 {
        let s = self.cum[seg] + f * (self.cum[seg + 1] - self.cum[seg]);
        if self.length() > 0.0 {
            (s / self.length()).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    /// Nearest point by scanning every segment: `(t, distance)`.
    pub fn nearest_linear(&self, q: Point) -> (f64, f64) {
        let mut best = (0.0, f64::INFINITY);
        for (i, w) in self.points.windows(2).enumerate() {
            let f = project_on_segment(w[0], w[1], q);
            let d = w[0].lerp(w[1], f).dist(q);
            if d < best.1 {
                best = (self.segment_param(i, f), d);
            }
        }
        best
    }

    /// Sub-polyline between arc lengths `s0` and `s1`; reversed when `s0 > s1`.
    pub fn sub_dist(&self, s0: f64, s1: f64) -> Result<Polyline, GeometryError> {
        let (lo, hi, rev) = if s0 <= s1 { (s0, s1, false) } else { (s1, s0, true) };
        let lo = lo.clamp(0.0, self.length());
        let hi = hi.clamp(0.0, self.length());
        let mut pts = vec![self.point_at_dist(lo)];
        for (i, &c) in self.cum.iter().enumerate() {
            if c > lo && c < hi {
                pts.push(self.points[i]);
            }
        }
        pts.push(self.point_at_dist(hi));
        if rev {
            pts.reverse();
        }
        Polyline::new(pts).map_err(|_| GeometryError::DegenerateSegment)
    }

    /// Sub-polyline between parameters `t0` and `t1`; reversed when `t0 > t1`.
    pub fn sub(&self, t0: f64, t1: f64) -> Result<Polyline, GeometryError> {
        for t in [t0, t1] {
            if !(0.0..=1.0).contains(&t) {
                return Err(GeometryError::OutOfRange(t));
            }
        }
        self.sub_dist(t0 * self.length(), t1 * self.length())
    }

    pub fn reversed(&self) -> Polyline {
        Polyline::new(self.points.iter().rev().copied()).expect("reversal keeps validity")
    }

    /// `n + 1` points at equal arc-length spacing.
    pub fn resample(&self, n: usize) -> Vec<Point> {
        let n = n.max(1);
        (0..=n)
            .map(|i| self.point_at_dist(self.length() * i as f64 / n as f64))
            .collect()
    }

    /// Replaces the first and last points.
    pub fn with_endpoints(&self, start: Point, end: Point) -> Result<Polyline, GeometryError> {
        let mut pts = self.points.clone();
        pts[0] = start;
        *pts.last_mut().unwrap() = end;
        Polyline::new(pts)
    }

    /// Concatenates two polylines sharing an end/start point.
    pub fn concat(&self, other: &Polyline) -> Result<Polyline, GeometryError> {
        Polyline::new(self.points.iter().chain(other.points.iter()).copied())
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bbox(&self) -> (Point, Point) {
        bbox_of(&self.points)
    }
}

pub fn bbox_of(points: &[Point]) -> (Point, Point) {
    let mut min = Point::new(f64::INFINITY, f64::INFINITY);
    let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        min.x = min.x.min(p.x);
        min.y = min.y.min(p.y);
        max.x = max.x.max(p.x);
        max.y = max.y.max(p.y);
    }
    (min, max)
}

/// Nearest point on `p` to `q` using a segment index: `(t, distance)`.
pub fn nearest_point_param(p: &Polyline, q: Point) -> (f64, f64) {
    SegmentIndex::new(p).nearest(q)
}

/// Convex hull (counter-clockwise, no repeated first point).
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.iter().copied().filter(|p| p.is_finite()).collect();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| a.dist(*b) <= POINT_EPS);
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 {
            let n = lower.len();
            if lower[n - 1].sub(lower[n - 2]).cross(p.sub(lower[n - 2])) <= 0.0 {
                lower.pop();
            } else {
                break;
            }
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 {
            let n = upper.len();
            if upper[n - 1].sub(upper[n - 2]).cross(p.sub(upper[n - 2])) <= 0.0 {
                upper.pop();
            } else {
                break;
            }
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
