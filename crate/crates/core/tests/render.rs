use proptest::prelude::*;

use transitmap::geometry::{segment_intersection, Point};
use transitmap::graph::{LineGraph, Ordering};
use transitmap::instance::{Instance, WeightPolicy};
use transitmap::optimize::evaluate;
use transitmap::render::{
    expand_node_fronts, inner_connections, lateral_offset, layout, offset_lines, render_svg_string, Connection, CurveKind,
    RenderStyle,
};
use transitmap::synth::{build, random_ordering, star, station};

fn style(w: f64) -> RenderStyle {
    RenderStyle {
        line_width: w,
        ..RenderStyle::default()
    }
}

fn straight(n: usize) -> LineGraph {
    let lines: Vec<usize> = (0..n).collect();
    let ids: Vec<String> = (0..n).map(|i| format!("L{i}")).collect();
    let names: Vec<&str> = ids.iter().map(String::as_str).collect();
    build(
        vec![station("a", 0.0, 0.0), station("b", 1000.0, 300.0)],
        &[(0, 1, &lines)],
        &names,
    )
}

/// Signed distance of `p` to the left of the line through `a` towards `b`.
fn left_of(a: Point, b: Point, p: Point) -> f64 {
    b.sub(a).unit().cross(p.sub(a))
}

#[test]
fn offsets_follow_the_centered_formula() {
    assert_eq!(lateral_offset(1, 1, 4.0), 0.0);
    assert_eq!([lateral_offset(2, 1, 4.0), lateral_offset(2, 2, 4.0)], [2.0, -2.0]);
    let three: Vec<f64> = (1..=3).map(|p| lateral_offset(3, p, 4.0)).collect();
    assert_eq!(three, vec![4.0, 0.0, -4.0]);
}

#[test]
fn adjacent_lines_are_one_width_apart() {
    for n in 1..=5 {
        let g = straight(n);
        let o = Ordering::identity(&g);
        let w = 4.0;
        let bands = offset_lines(&g, &o, &style(w)).unwrap();
        let (a, b) = (g.nodes[0].pos, g.nodes[1].pos);
        for band in &bands {
            let expect = lateral_offset(n, band.position, w);
            for k in 0..=20 {
                let p = band.points[0].lerp(*band.points.last().unwrap(), k as f64 / 20.0);
                assert!((left_of(a, b, p) - expect).abs() < 1e-6);
            }
        }
        for pair in bands.windows(2) {
            let d = left_of(a, b, pair[0].points[0]) - left_of(a, b, pair[1].points[0]);
            assert!((d - w).abs() < 1e-6, "{d}");
        }
        if n == 1 {
            assert!(left_of(a, b, bands[0].points[0]).abs() < 1e-9);
        }
    }
}

#[test]
fn terminus_fronts_stay_at_the_station() {
    let g = straight(3);
    let shapes = expand_node_fronts(&g, &Ordering::identity(&g), &style(5.0));
    for s in &shapes {
        assert_eq!(s.fronts.len(), 1);
        assert_eq!(s.fronts[0].expansion, 0.0);
        let mid = s.fronts[0].baseline.0.lerp(s.fronts[0].baseline.1, 0.5);
        assert!(mid.dist(g.nodes[s.node].pos) < 1e-9);
        assert!(s.resolved);
    }
}

#[test]
fn straight_through_node_needs_no_room() {
    let g = build(
        vec![station("a", 0.0, 0.0), station("b", 800.0, 0.0), station("c", 1600.0, 0.0)],
        &[(0, 1, &[0, 1]), (1, 2, &[0, 1])],
        &["A", "B"],
    );
    let shapes = expand_node_fronts(&g, &Ordering::identity(&g), &style(5.0));
    assert!(shapes[1].fronts.iter().all(|f| f.expansion == 0.0));
    // with the order flipped on one side the lines must cross inside the node
    let flipped = Ordering {
        edges: vec![vec![0, 1], vec![1, 0]],
    };
    let shapes = expand_node_fronts(&g, &flipped, &style(5.0));
    assert!(shapes[1].fronts.iter().all(|f| f.expansion > 0.0));
}

fn band_clearance(g: &LineGraph, f1: &transitmap::render::NodeFront, f2: &transitmap::render::NodeFront, w: f64) -> f64 {
    let samples = |f: &transitmap::render::NodeFront| -> Vec<Point> {
        let e = &g.edges[f.edge];
        let len = e.path.length();
        (0..=50)
            .map(|k| {
                let s = f.expansion + (len / 2.0 - f.expansion) * k as f64 / 50.0;
                e.path.point_at_dist(if e.a == f.node { s } else { len - s })
            })
            .collect()
    };
    let (a, b) = (samples(f1), samples(f2));
    let hw = |f: &transitmap::render::NodeFront| f.lines.len() as f64 * w / 2.0;
    let mut best = f64::INFINITY;
    for p in &a {
        for q in &b {
            best = best.min(p.dist(*q));
        }
    }
    best - hw(f1) - hw(f2)
}

#[test]
fn fronts_make_room_at_a_three_way_node() {
    let (r, w) = (900.0, 4.0);
    let arm = |k: f64| {
        let a = std::f64::consts::TAU * k / 3.0;
        (r * a.cos(), r * a.sin())
    };
    let nodes = vec![
        station("c", 0.0, 0.0),
        station("x", arm(0.0).0, arm(0.0).1),
        station("y", arm(1.0).0, arm(1.0).1),
        station("z", arm(2.0).0, arm(2.0).1),
    ];
    let g = build(nodes, &[(0, 1, &[0, 1]), (2, 0, &[1, 2]), (0, 3, &[2, 0])], &["A", "B", "C"]);
    let shapes = expand_node_fronts(&g, &Ordering::identity(&g), &style(w));
    let c = &shapes[0];
    assert!(c.resolved);
    for i in 0..3 {
        assert!(c.fronts[i].expansion > 0.0);
        for j in i + 1..3 {
            let cl = band_clearance(&g, &c.fronts[i], &c.fronts[j], w);
            assert!(cl >= w - 1e-6, "clearance {cl}");
        }
    }
}

#[test]
fn ports_follow_the_ordering() {
    for seed in 0..20 {
        let g = star(seed, 3, 5);
        let o = random_ordering(&g, seed);
        for s in expand_node_fronts(&g, &o, &style(6.0)) {
            for f in &s.fronts {
                let e = &g.edges[f.edge];
                assert_eq!(f.lines, o.edges[f.edge]);
                assert_eq!(f.ports.len(), e.lines.len());
                // canonical direction at the front
                let dir = if e.a == s.node { f.normal } else { f.normal.scale(-1.0) };
                let left: Vec<f64> = f.ports.iter().map(|p| dir.cross(p.sub(f.ports[0]))).collect();
                for k in 1..left.len() {
                    assert!((left[k - 1] - left[k] - 6.0).abs() < 1e-6);
                }
            }
        }
    }
}

#[test]
fn bands_end_at_the_ports() {
    let g = star(3, 4, 6);
    let o = random_ordering(&g, 3);
    let lay = layout(&g, &o, &style(6.0)).unwrap();
    for b in &lay.bands {
        let e = &g.edges[b.edge];
        for (v, p) in [(e.a, b.points[0]), (e.b, *b.points.last().unwrap())] {
            let f = lay.nodes[v].fronts.iter().find(|f| f.edge == b.edge).unwrap();
            assert_eq!(f.port_of(b.line), Some(p));
        }
    }
}

#[test]
fn terminating_lines_get_no_connection() {
    let g = build(
        vec![station("a", 0.0, 0.0), station("b", 800.0, 0.0), station("c", 1600.0, 100.0)],
        &[(0, 1, &[0, 1]), (1, 2, &[0])],
        &["A", "B"],
    );
    let lay = layout(&g, &Ordering::identity(&g), &style(5.0)).unwrap();
    assert_eq!(lay.connections.len(), 1);
    assert_eq!(lay.connections[0].line, 0);
}

fn count_intersections(a: &Connection, b: &Connection) -> usize {
    let (pa, pb) = (a.sample(400), b.sample(400));
    let mut n = 0;
    for s in pa.windows(2) {
        for t in pb.windows(2) {
            if segment_intersection(s[0], s[1], t[0], t[1]).is_some() {
                n += 1;
            }
        }
    }
    n
}

/// Intersections between curves of distinct lines at `v`.
fn curve_crossings(conns: &[Connection], v: usize) -> i64 {
    let here: Vec<&Connection> = conns.iter().filter(|c| c.node == v).collect();
    let mut n = 0;
    for i in 0..here.len() {
        for j in i + 1..here.len() {
            if here[i].line != here[j].line {
                n += count_intersections(here[i], here[j]) as i64;
            }
        }
    }
    n
}

#[test]
fn inverted_pair_crosses_once() {
    let g = build(
        vec![station("a", 0.0, 0.0), station("b", 800.0, 0.0), station("c", 1400.0, 500.0)],
        &[(0, 1, &[0, 1]), (1, 2, &[0, 1])],
        &["A", "B"],
    );
    for curve in [CurveKind::Cubic, CurveKind::Arc, CurveKind::Straight] {
        let st = RenderStyle {
            line_width: 5.0,
            curve,
            ..RenderStyle::default()
        };
        for (o1, n) in [(vec![0, 1], 0), (vec![1, 0], 1)] {
            let o = Ordering {
                edges: vec![vec![0, 1], o1],
            };
            let shapes = expand_node_fronts(&g, &o, &st);
            let conns = inner_connections(&g, &shapes, &st);
            assert_eq!(curve_crossings(&conns, 1), n, "{curve:?}");
        }
    }
}

#[test]
fn curve_intersections_match_evaluated_crossings() {
    for seed in 0..30 {
        let g = star(seed, 3 + (seed % 2) as usize, 4 + (seed % 3) as usize);
        let o = random_ordering(&g, seed + 100);
        let inst = Instance::new(g.clone(), &WeightPolicy::uniform());
        let b = evaluate(&inst, &o).unwrap();
        let lay = layout(&g, &o, &style(6.0)).unwrap();
        assert_eq!(curve_crossings(&lay.connections, 0), b.crossings_at(0), "seed {seed}");
    }
}

#[test]
fn empty_graph_gives_empty_layers() {
    let g = LineGraph::default();
    let svg = render_svg_string(&g, &Ordering::default(), &RenderStyle::default()).unwrap();
    for layer in ["edges", "connections", "stations", "labels"] {
        assert!(svg.contains(&format!("<g id=\"{layer}\"")));
    }
    assert!(!svg.contains("<path"));
    assert!(svg.trim_end().ends_with("</svg>"));
}

#[test]
fn one_path_per_edge_and_line() {
    let g = star(7, 4, 7);
    let o = random_ordering(&g, 1);
    let svg = render_svg_string(&g, &o, &style(6.0)).unwrap();
    let expected: usize = g.edges.iter().map(|e| e.lines.len()).sum();
    assert_eq!(svg.matches("<path id=\"band-").count(), expected);
    assert_eq!(svg.matches("<polygon").count(), g.nodes.len());
}

#[test]
fn golden_svg() {
    let g = star(42, 3, 5);
    let o = random_ordering(&g, 42);
    let svg = render_svg_string(&g, &o, &style(8.0)).unwrap();
    assert_eq!(svg, render_svg_string(&g, &o, &style(8.0)).unwrap());
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/star.svg");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &svg).unwrap();
    }
    let golden = std::fs::read_to_string(&path).expect("golden file; run with UPDATE_GOLDEN=1 to record");
    assert_eq!(svg, golden);
}

#[test]
fn style_rejects_non_positive_width() {
    let g = straight(1);
    let st = RenderStyle {
        line_width: 0.0,
        ..RenderStyle::default()
    };
    assert!(layout(&g, &Ordering::identity(&g), &st).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn three_way_stars_realise_their_crossings(seed in 0u64..1_000_000, lines in 3usize..7) {
        let g = star(seed, 3, lines);
        let o = random_ordering(&g, seed ^ 0x5eed);
        let inst = Instance::new(g.clone(), &WeightPolicy::uniform());
        let b = evaluate(&inst, &o).unwrap();
        let lay = layout(&g, &o, &style(6.0)).unwrap();
        prop_assert_eq!(curve_crossings(&lay.connections, 0), b.crossings_at(0));
    }
}
