use serde::{Deserialize, Serialize};

use super::{GeometryError, Polyline, SegmentIndex};

/// Sweep parameters for shared-segment detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepParams {
    /// Distance threshold between the two paths, meters.
    pub d_hat: f64,
    /// Arc length of one sweep step, meters.
    pub step_m: f64,
    /// Number of consecutive steps allowed above `d_hat` before a segment closes.
    pub k: usize,
    /// Shorter segments (on either path) are discarded, meters.
    pub min_seg_len: f64,
}

impl Default for SweepParams {
    fn default() -> Self {
        SweepParams {
            d_hat: 25.0,
            step_m: 5.0,
            k: 2,
            min_seg_len: 50.0,
        }
    }
}

impl SweepParams {
    /// Number of sweep steps and the resulting `dt` for a path of `len` meters.
    pub fn steps_for(&self, len: f64) -> (usize, f64) {
        let n = (len / self.step_m).ceil().max(1.0) as usize;
        (n, 1.0 / n as f64)
    }
}

/// A pair of parameter ranges on two paths that run within `d_hat` of each other.
///
/// `range_a` is increasing; `range_b` is decreasing when the paths overlap
/// anti-parallel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharedSegment {
    pub range_a: (f64, f64),
    pub range_b: (f64, f64),
}

impl SharedSegment {
    pub fn is_reversed(&self) -> bool {
        self.range_b.0 > self.range_b.1
    }

    pub fn extent_a(&self, a: &Polyline) -> f64 {
        (self.range_a.1 - self.range_a.0) * a.length()
    }

    pub fn extent_b(&self, b: &Polyline) -> f64 {
        (self.range_b.1 - self.range_b.0).abs() * b.length()
    }

    pub fn swapped(&self) -> SharedSegment {
        let (b0, b1) = self.range_b;
        if b0 <= b1 {
            SharedSegment {
                range_a: (b0, b1),
                range_b: self.range_a,
            }
        } else {
            SharedSegment {
                range_a: (b1, b0),
                range_b: (self.range_a.1, self.range_a.0),
            }
        }
    }
}

struct OpenRun {
    first: usize,
    last: usize,
    tb_first: f64,
    tb_last: f64,
}

/// Sweeps `a` in steps of roughly `params.step_m` and reports the maximal
/// runs of sweep points within `d_hat` of `b`, tolerating up to `k`
/// consecutive outliers inside a run.
pub fn shared_segments(a: &Polyline, b: &Polyline, params: &SweepParams) -> Vec<SharedSegment> {
    let index = SegmentIndex::new(b);
    let (n, dt) = params.steps_for(a.length());
    let mut out = Vec::new();
    let mut open: Option<OpenRun> = None;
    let mut misses = 0usize;

    let close = |run: OpenRun, out: &mut Vec<SharedSegment>| {
        let seg = SharedSegment {
            range_a: (run.first as f64 * dt, (run.last as f64 * dt).min(1.0)),
            range_b: (run.tb_first, run.tb_last),
        };
        if seg.extent_a(a) >= params.min_seg_len && seg.extent_b(b) >= params.min_seg_len {
            out.push(seg);
        }
    };

    for i in 0..=n {
        let t = (i as f64 * dt).min(1.0);
        let p = a.point_at_dist(t * a.length());
        let (tb, d) = index.nearest(p);
        if d <= params.d_hat {
            misses = 0;
            match open.as_mut() {
                Some(run) => {
                    run.last = i;
                    run.tb_last = tb;
                }
                None => {
                    open = Some(OpenRun {
                        first: i,
                        last: i,
                        tb_first: tb,
                        tb_last: tb,
                    })
                }
            }
        } else if open.is_some() {
            misses += 1;
            if misses > params.k {
                close(open.take().unwrap(), &mut out);
                misses = 0;
            }
        }
    }
    if let Some(run) = open {
        close(run, &mut out);
    }
    out
}

/// Pointwise midpoint of `a` over `range_a` and `b` over `range_b`.
///
/// Both sub-paths are sampled at a common set of arc-length fractions that
/// contains a regular grid of roughly `step_m` spacing plus every vertex of
/// both inputs.
pub fn average_path(
    a: &Polyline,
    range_a: (f64, f64),
    b: &Polyline,
    range_b: (f64, f64),
    step_m: f64,
) -> Result<Polyline, GeometryError> {
    let sa = a
        .sub(range_a.0, range_a.1)
        .map_err(|_| GeometryError::DegenerateSegment)?;
    let sb = b
        .sub(range_b.0, range_b.1)
        .map_err(|_| GeometryError::DegenerateSegment)?;
    let n = (sa.length().max(sb.length()) / step_m).ceil().max(1.0) as usize;
    let mut fracs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    for s in [&sa, &sb] {
        for i in 1..s.points().len() - 1 {
            fracs.push(s.arc_at_vertex(i) / s.length());
        }
    }
    fracs.sort_by(f64::total_cmp);
    fracs.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    let mids = fracs.iter().map(|&f| {
        let pa = sa.point_at_dist(f * sa.length());
        let pb = sb.point_at_dist(f * sb.length());
        pa.lerp(pb, 0.5)
    });
    Polyline::new(mids).map_err(|_| GeometryError::DegenerateSegment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn dist_to(line: &Polyline, q: Point) -> f64 {
        line.nearest_linear(q).1
    }

    fn pl(pts: &[(f64, f64)]) -> Polyline {
        Polyline::new(pts.iter().map(|&(x, y)| Point::new(x, y))).unwrap()
    }

    fn params(d_hat: f64) -> SweepParams {
        SweepParams {
            d_hat,
            ..SweepParams::default()
        }
    }

    #[test]
    fn identical_paths_share_everything() {
        let a = pl(&[(0.0, 0.0), (1000.0, 0.0)]);
        let segs = shared_segments(&a, &a, &params(20.0));
        assert_eq!(segs.len(), 1);
        let s = segs[0];
        assert!(s.range_a.0 < 1e-9 && (s.range_a.1 - 1.0).abs() < 1e-9);
        assert!(s.range_b.0 < 1e-9 && (s.range_b.1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn parallel_lines_beyond_threshold() {
        let a = pl(&[(0.0, 0.0), (1000.0, 0.0)]);
        let b = pl(&[(0.0, 50.0), (1000.0, 50.0)]);
        assert!(shared_segments(&a, &b, &params(20.0)).is_empty());
    }

    #[test]
    fn antiparallel_overlap_has_decreasing_b_range() {
        let a = pl(&[(0.0, 0.0), (1000.0, 0.0)]);
        let b = a.reversed();
        let segs = shared_segments(&a, &b, &params(20.0));
        assert_eq!(segs.len(), 1);
        assert!(segs[0].is_reversed());
        assert!((segs[0].range_b.0 - 1.0).abs() < 1e-9 && segs[0].range_b.1 < 1e-9);
    }

    #[test]
    fn outliers_within_k_steps_do_not_split() {
        // a short spike away from b that lasts less than k+1 sweep steps
        let a = pl(&[
            (0.0, 0.0),
            (500.0, 0.0),
            (502.0, 30.0),
            (504.0, 0.0),
            (1000.0, 0.0),
        ]);
        let b = pl(&[(0.0, 0.0), (1000.0, 0.0)]);
        let p = SweepParams {
            d_hat: 20.0,
            step_m: 5.0,
            k: 10,
            min_seg_len: 50.0,
        };
        assert_eq!(shared_segments(&a, &b, &p).len(), 1);
        let strict = SweepParams { k: 0, ..p };
        assert_eq!(shared_segments(&a, &b, &strict).len(), 2);
    }

    #[test]
    fn average_of_identical_is_identity() {
        let a = pl(&[(0.0, 0.0), (100.0, 0.0), (150.0, 80.0), (300.0, 90.0)]);
        let avg = average_path(&a, (0.0, 1.0), &a, (0.0, 1.0), 5.0).unwrap();
        for p in avg.points() {
            assert!(dist_to(&a, *p) < 1e-6);
        }
        for p in a.points() {
            assert!(dist_to(&avg, *p) < 1e-6);
        }
    }

    #[test]
    fn average_of_parallel_lines_is_centerline() {
        let a = pl(&[(0.0, 0.0), (100.0, 0.0)]);
        let b = pl(&[(0.0, 10.0), (100.0, 10.0)]);
        let avg = average_path(&a, (0.0, 1.0), &b, (0.0, 1.0), 5.0).unwrap();
        for p in avg.points() {
            assert!((p.y - 5.0).abs() < 1e-12);
        }
        assert!((avg.length() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn average_of_arcs_stays_between_inputs() {
        let arc = |r: f64| {
            pl(&(0..=60)
                .map(|i| {
                    let th = std::f64::consts::PI * i as f64 / 60.0;
                    (r * th.cos(), r * th.sin())
                })
                .collect::<Vec<_>>())
        };
        let (a, b) = (arc(100.0), arc(120.0));
        let avg = average_path(&a, (0.0, 1.0), &b, (0.0, 1.0), 2.0).unwrap();
        // sampled midpoint oracle
        for i in 0..=200 {
            let f = i as f64 / 200.0;
            let pa = a.param_point(f).unwrap();
            let pb = b.param_point(f).unwrap();
            let m = avg.param_point(f).unwrap();
            let half = pa.dist(pb) / 2.0;
            assert!(m.dist(pa) <= half + 0.5, "{} vs {}", m.dist(pa), half);
            assert!(m.dist(pb) <= half + 0.5);
        }
        assert!(avg.length() >= a.length() - 1e-6 && avg.length() <= b.length() + 1e-6);
    }

    #[test]
    fn average_rejects_degenerate_range() {
        let a = pl(&[(0.0, 0.0), (100.0, 0.0)]);
        assert_eq!(
            average_path(&a, (0.5, 0.5), &a, (0.0, 1.0), 5.0),
            Err(GeometryError::DegenerateSegment)
        );
    }
}
