use rstar::primitives::{GeomWithData, Line};
use rstar::RTree;

use super::{project_on_segment, Point, Polyline};

type Seg = GeomWithData<Line<[f64; 2]>, usize>;

/// R-tree over the linear segments of one polyline.
pub struct SegmentIndex<'a> {
    line: &'a Polyline,
    tree: RTree<Seg>,
}

impl<'a> SegmentIndex<'a> {
    pub fn new(line: &'a Polyline) -> Self {
        let segs = line
            .points()
            .windows(2)
            .enumerate()
            .map(|(i, w)| GeomWithData::new(Line::new(w[0].into(), w[1].into()), i))
            .collect();
        SegmentIndex {
            line,
            tree: RTree::bulk_load(segs),
        }
    }

    pub fn polyline(&self) -> &Polyline {
        self.line
    }

    /// Parameter of the globally nearest point and its distance.
    pub fn nearest(&self, q: Point) -> (f64, f64) {
        let seg = self
            .tree
            .nearest_neighbor([q.x, q.y])
            .expect("polyline has at least one segment");
        let i = seg.data;
        let pts = self.line.points();
        let f = project_on_segment(pts[i], pts[i + 1], q);
        let d = pts[i].lerp(pts[i + 1], f).dist(q);
        (self.line.segment_param(i, f), d)
    }
}
