use super::{segment_intersection, GeometryError, Point, Polyline, POINT_EPS};

pub const DEFAULT_MITER_LIMIT: f64 = 2.0;

/// Window (in segments) searched for local loops after offsetting.
const LOOP_WINDOW: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetOptions {
    /// Joins whose miter length exceeds `miter_limit * |delta|` are beveled.
    pub miter_limit: f64,
}

impl Default for OffsetOptions {
    fn default() -> Self {
        OffsetOptions {
            miter_limit: DEFAULT_MITER_LIMIT,
        }
    }
}

/// Offsets `p` by `delta` meters to the left of its travel direction
/// (negative values offset to the right).
pub fn offset_polyline(
    p: &Polyline,
    delta: f64,
    opts: &OffsetOptions,
) -> Result<Polyline, GeometryError> {
    if delta == 0.0 {
        return Ok(p.clone());
    }
    let pts = p.points();
    let dirs: Vec<Point> = pts.windows(2).map(|w| w[1].sub(w[0]).unit()).collect();
    let normals: Vec<Point> = dirs.iter().map(|d| d.perp()).collect();

    let mut out = Vec::with_capacity(pts.len() + 4);
    out.push(pts[0].add(normals[0].scale(delta)));
    for i in 1..pts.len() - 1 {
        let (n0, n1) = (normals[i - 1], normals[i]);
        let sum = n0.add(n1);
        let half_cos = sum.norm() / 2.0;
        if half_cos > 1.0 - 1e-12 {
            out.push(pts[i].add(n1.scale(delta)));
            continue;
        }
        let factor = if half_cos > 1e-9 { 1.0 / half_cos } else { f64::INFINITY };
        if factor <= opts.miter_limit {
            out.push(pts[i].add(sum.unit().scale(delta * factor)));
        } else {
            out.push(pts[i].add(n0.scale(delta)));
            out.push(pts[i].add(n1.scale(delta)));
        }
    }
    out.push(pts[pts.len() - 1].add(normals[normals.len() - 1].scale(delta)));

    let cleaned = remove_local_loops(out);
    if has_local_loop(&cleaned) {
        return Err(GeometryError::SelfIntersectionUnresolved { delta });
    }
    Polyline::new(cleaned).map_err(|_| GeometryError::SelfIntersectionUnresolved { delta })
}

/// Cuts small loops: when segment `i` crosses a later segment `j` within the
/// window, everything between is replaced by the crossing point.
fn remove_local_loops(mut pts: Vec<Point>) -> Vec<Point> {
    let mut i = 0;
    while i + 2 < pts.len() {
        let mut cut = None;
        let end = (i + 2 + LOOP_WINDOW).min(pts.len() - 1);
        for j in (i + 2..end).rev() {
            if let Some((t, _)) = segment_intersection(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                cut = Some((j, pts[i].lerp(pts[i + 1], t)));
                break;
            }
        }
        if let Some((j, x)) = cut {
            pts.splice(i + 1..=j, [x]);
        } else {
            i += 1;
        }
    }
    pts.dedup_by(|a, b| a.dist(*b) <= POINT_EPS);
    pts
}

fn has_local_loop(pts: &[Point]) -> bool {
    for i in 0..pts.len().saturating_sub(1) {
        let end = (i + 2 + LOOP_WINDOW).min(pts.len() - 1);
        for j in i + 2..end {
            if let Some((t, u)) = segment_intersection(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                let interior = t > 1e-9 && t < 1.0 - 1e-9 && u > 1e-9 && u < 1.0 - 1e-9;
                if interior {
                    return true;
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pl(pts: &[(f64, f64)]) -> Polyline {
        Polyline::new(pts.iter().map(|&(x, y)| Point::new(x, y))).unwrap()
    }

    #[test]
    fn straight_offset_left() {
        let p = pl(&[(0.0, 0.0), (10.0, 0.0)]);
        let o = offset_polyline(&p, 2.0, &OffsetOptions::default()).unwrap();
        assert_eq!(o.points(), &[Point::new(0.0, 2.0), Point::new(10.0, 2.0)]);
        let r = offset_polyline(&p, -2.0, &OffsetOptions::default()).unwrap();
        assert_eq!(r.first(), Point::new(0.0, -2.0));
    }

    #[test]
    fn zero_offset_is_identity() {
        let p = pl(&[(0.0, 0.0), (10.0, 0.0), (12.0, 7.0)]);
        assert_eq!(offset_polyline(&p, 0.0, &OffsetOptions::default()).unwrap(), p);
    }

    #[test]
    fn l_shape_miter_corner() {
        let p = pl(&[(0.0, 0.0), (10.0, 0.0), (10.0, 10.0)]);
        for delta in [1.0, -1.0] {
            let o = offset_polyline(&p, delta, &OffsetOptions::default()).unwrap();
            assert_eq!(o.points().len(), 3);
            assert!((o.points()[1].dist(Point::new(10.0, 0.0)) - 2f64.sqrt()).abs() < 1e-12);
            // sampled distance oracle: exact on the inner side, the outer
            // miter tip pulls away up to sqrt(2)
            for i in 0..=400 {
                let q = o.param_point(i as f64 / 400.0).unwrap();
                let d = p.nearest_linear(q).1;
                if delta > 0.0 {
                    assert!((d - 1.0).abs() < 1e-9);
                } else {
                    assert!(d > 1.0 - 1e-9 && d < 2f64.sqrt() + 1e-9);
                }
            }
        }
    }

    #[test]
    fn sharp_outer_turn_is_beveled() {
        let p = pl(&[(0.0, 0.0), (10.0, 0.0), (0.0, 1.0)]);
        let o = offset_polyline(&p, -1.0, &OffsetOptions::default()).unwrap();
        assert_eq!(o.points().len(), 4);
    }

    #[test]
    fn inner_loop_of_short_segment_is_removed() {
        // a 1 m jog offset by 5 m produces a loop on the inner side
        let p = pl(&[(0.0, 0.0), (20.0, 0.0), (20.0, 1.0), (40.0, 1.0)]);
        let o = offset_polyline(&p, -5.0, &OffsetOptions::default()).unwrap();
        assert!(!has_local_loop(o.points()));
    }

    #[test]
    fn round_trip_on_straight_input() {
        let p = pl(&[(0.0, 0.0), (10.0, 5.0), (30.0, 15.0)]);
        let o = offset_polyline(&p, 3.0, &OffsetOptions::default()).unwrap();
        let back = offset_polyline(&o, -3.0, &OffsetOptions::default()).unwrap();
        for (a, b) in back.points().iter().zip(p.points()) {
            assert!(a.dist(*b) < 1e-9);
        }
    }
}
