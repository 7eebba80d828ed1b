//! Synthetic transit networks with prescribed line graph dimensions.
//!
//! Lines are monotone staircase paths across a jittered lattice, either west
//! to east or south to north. The first `max_lines` lines are routed through
//! one central trunk edge so that the maximum edge load is reached exactly;
//! every other step refuses edges already at that load and prefers edges
//! other lines use. Attempts are drawn until the lattice graph has the
//! requested cycle count, then long edges are subdivided by stations until
//! the node count matches.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{Point, Polyline};
use crate::graph::{Edge, LineGraph, Node, NodeKind};
use crate::gtfs::TransverseMercator;

use super::line;

const SPACING_M: f64 = 800.0;
const JITTER_M: f64 = 150.0;
const MAX_ATTEMPTS: u64 = 200_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CitySpec {
    pub name: &'static str,
    pub nodes: usize,
    pub edges: usize,
    pub lines: usize,
    pub max_lines: usize,
    pub stations: usize,
    /// Lattice columns and rows.
    pub grid: (usize, usize),
    /// Probability of following an edge another line already uses.
    pub stickiness: f64,
    /// Probability that a line not on the trunk runs south to north.
    pub vertical: f64,
}

pub const FREIBURG: CitySpec = CitySpec {
    name: "freiburg",
    nodes: 80,
    edges: 81,
    lines: 5,
    max_lines: 4,
    stations: 74,
    grid: (6, 5),
    stickiness: 0.85,
    vertical: 0.5,
};

pub const STUTTGART: CitySpec = CitySpec {
    name: "stuttgart",
    nodes: 223,
    edges: 235,
    lines: 15,
    max_lines: 8,
    stations: 192,
    grid: (9, 8),
    stickiness: 0.75,
    vertical: 0.5,
};

pub const NEW_YORK: CitySpec = CitySpec {
    name: "newyork",
    nodes: 517,
    edges: 548,
    lines: 26,
    max_lines: 9,
    stations: 456,
    grid: (12, 11),
    stickiness: 0.7,
    vertical: 0.5,
};

impl CitySpec {
    pub fn preset(name: &str) -> Option<CitySpec> {
        [FREIBURG, STUTTGART, NEW_YORK]
            .into_iter()
            .find(|s| s.name.eq_ignore_ascii_case(name))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CityError {
    #[error("no {name} network found within {attempts} attempts")]
    NotFound { name: &'static str, attempts: u64 },
    #[error("inconsistent city spec: {0}")]
    Spec(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct City {
    pub graph: LineGraph,
    /// Node sequence of every line, west to east or south to north.
    pub routes: Vec<Vec<usize>>,
    /// Index of the accepted attempt.
    pub attempt: u64,
}

struct Lattice {
    gx: usize,
    load: BTreeMap<(usize, usize), Vec<usize>>,
    paths: Vec<Vec<usize>>,
}

impl Lattice {
    fn key(a: usize, b: usize) -> (usize, usize) {
        (a.min(b), a.max(b))
    }

    fn load_of(&self, a: usize, b: usize) -> usize {
        self.load.get(&Lattice::key(a, b)).map_or(0, Vec::len)
    }

    /// Monotone walk from `from` to `to` over edges below `cap` lines.
    fn walk(&self, rng: &mut ChaCha8Rng, from: (usize, usize), to: (usize, usize), cap: usize, stick: f64) -> Option<Vec<usize>> {
        let idx = |(x, y): (usize, usize)| y * self.gx + x;
        let mut cur = from;
        let mut out = vec![idx(cur)];
        while cur != to {
            let mut options = Vec::new();
            if cur.0 != to.0 {
                options.push((if cur.0 < to.0 { cur.0 + 1 } else { cur.0 - 1 }, cur.1));
            }
            if cur.1 != to.1 {
                options.push((cur.0, if cur.1 < to.1 { cur.1 + 1 } else { cur.1 - 1 }));
            }
            let allowed: Vec<(usize, usize)> = options
                .into_iter()
                .filter(|&n| self.load_of(idx(cur), idx(n)) < cap)
                .collect();
            let used: Vec<(usize, usize)> = allowed
                .iter()
                .copied()
                .filter(|&n| self.load_of(idx(cur), idx(n)) > 0)
                .collect();
            let next = if !used.is_empty() && rng.gen_bool(stick) {
                *used.choose(rng)?
            } else {
                *allowed.choose(rng)?
            };
            out.push(idx(next));
            cur = next;
        }
        Some(out)
    }

    fn add(&mut self, l: usize, path: Vec<usize>) {
        for w in path.windows(2) {
            self.load.entry(Lattice::key(w[0], w[1])).or_default().push(l);
        }
        self.paths.push(path);
    }
}

fn lattice(spec: &CitySpec, rng: &mut ChaCha8Rng) -> Option<Lattice> {
    let (gx, gy) = spec.grid;
    let mut lat = Lattice {
        gx,
        load: BTreeMap::new(),
        paths: Vec::new(),
    };
    let trunk = (gx / 2 - 1, gy / 2);
    for l in 0..spec.lines {
        let horizontal = l < spec.max_lines || !rng.gen_bool(spec.vertical);
        let (from, to) = if horizontal {
            ((0, rng.gen_range(0..gy)), (gx - 1, rng.gen_range(0..gy)))
        } else {
            ((rng.gen_range(0..gx), 0), (rng.gen_range(0..gx), gy - 1))
        };
        let path = if l < spec.max_lines {
            let mut p = lat.walk(rng, from, trunk, spec.max_lines, spec.stickiness)?;
            p.extend(lat.walk(rng, (trunk.0 + 1, trunk.1), to, spec.max_lines, spec.stickiness)?);
            p
        } else {
            lat.walk(rng, from, to, spec.max_lines, spec.stickiness)?
        };
        lat.add(l, path);
    }
    Some(lat)
}

fn connected(nodes: &BTreeSet<usize>, edges: &[(usize, usize)]) -> bool {
    let Some(&start) = nodes.iter().next() else {
        return true;
    };
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            let o = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if seen.insert(o) {
                stack.push(o);
            }
        }
    }
    seen.len() == nodes.len()
}

/// Draws attempts `seed * MAX_ATTEMPTS + k` until one has the requested
/// dimensions.
pub fn city(spec: &CitySpec, seed: u64) -> Result<City, CityError> {
    if spec.edges < spec.nodes.saturating_sub(1) || spec.stations > spec.nodes || spec.max_lines > spec.lines || spec.grid.0 < 3 || spec.grid.1 < 3 {
        return Err(CityError::Spec(format!("{spec:?}")));
    }
    let aux = spec.nodes - spec.stations;
    for k in 0..MAX_ATTEMPTS {
        let attempt = seed.wrapping_mul(MAX_ATTEMPTS).wrapping_add(k);
        let mut rng = ChaCha8Rng::seed_from_u64(attempt);
        let Some(lat) = lattice(spec, &mut rng) else {
            continue;
        };
        let nodes: BTreeSet<usize> = lat.paths.iter().flatten().copied().collect();
        let edges: Vec<(usize, usize)> = lat.load.keys().copied().collect();
        if edges.len() + spec.nodes != spec.edges + nodes.len() || nodes.len() > spec.nodes {
            continue;
        }
        if lat.load.values().map(Vec::len).max() != Some(spec.max_lines) || !connected(&nodes, &edges) {
            continue;
        }
        let ends: BTreeSet<usize> = lat.paths.iter().flat_map(|p| [p[0], p[p.len() - 1]]).collect();
        let mut junctions: Vec<usize> = nodes
            .iter()
            .copied()
            .filter(|&v| !ends.contains(&v) && edges.iter().filter(|&&(a, b)| a == v || b == v).count() == 3)
            .collect();
        if junctions.len() + split_capacity(&lat) < aux || nodes.len() + 2 * aux.saturating_sub(junctions.len()) > spec.nodes {
            continue;
        }
        junctions.shuffle(&mut rng);
        junctions.truncate(aux);
        let junctions: BTreeSet<usize> = junctions.into_iter().collect();
        return Ok(assemble(spec, lat, &nodes, &junctions, &mut rng, attempt));
    }
    Err(CityError::NotFound {
        name: spec.name,
        attempts: MAX_ATTEMPTS,
    })
}

/// Number of terminal splits available: a line ending on an edge other lines
/// also use can fork off at a new junction towards its own terminus.
fn split_capacity(lat: &Lattice) -> usize {
    let mut ending: BTreeMap<((usize, usize), usize), usize> = BTreeMap::new();
    for p in &lat.paths {
        let n = p.len();
        for (a, b) in [(p[1], p[0]), (p[n - 2], p[n - 1])] {
            *ending.entry((Lattice::key(a, b), b)).or_default() += 1;
        }
    }
    ending
        .iter()
        .map(|(&(e, _), &k)| k.min(lat.load[&e].len() - 1))
        .sum()
}

fn insert_between(route: &mut Vec<usize>, a: usize, b: usize, m: usize) {
    let i = route
        .windows(2)
        .position(|w| (w[0] == a && w[1] == b) || (w[0] == b && w[1] == a))
        .expect("line runs along its edge");
    route.insert(i + 1, m);
}

fn assemble(spec: &CitySpec, lat: Lattice, used: &BTreeSet<usize>, junctions: &BTreeSet<usize>, rng: &mut ChaCha8Rng, attempt: u64) -> City {
    let mut nodes = Vec::new();
    let mut index = BTreeMap::new();
    let mut stations = 0;
    let mut junction_count = 0;
    let mut station_node = |pos: Point, nodes: &mut Vec<Node>| {
        stations += 1;
        let id = format!("st{stations}");
        nodes.push(Node {
            id: id.clone(),
            kind: NodeKind::Station {
                station_id: id,
                name: format!("Station {stations}"),
            },
            pos,
        });
        nodes.len() - 1
    };
    for &v in used {
        let (x, y) = (v % lat.gx, v / lat.gx);
        let pos = Point::new(
            x as f64 * SPACING_M + rng.gen_range(-JITTER_M..JITTER_M),
            y as f64 * SPACING_M + rng.gen_range(-JITTER_M..JITTER_M),
        );
        if junctions.contains(&v) {
            junction_count += 1;
            nodes.push(Node {
                id: format!("j{junction_count}"),
                kind: NodeKind::Auxiliary,
                pos,
            });
        } else {
            station_node(pos, &mut nodes);
        }
        index.insert(v, nodes.len() - 1);
    }
    let mut routes: Vec<Vec<usize>> = lat.paths.iter().map(|p| p.iter().map(|v| index[v]).collect()).collect();
    let mut edges: Vec<(usize, usize, Vec<usize>)> = lat
        .load
        .iter()
        .map(|(&(a, b), ls)| {
            let mut ls = ls.clone();
            ls.sort_unstable();
            (index[&a].min(index[&b]), index[&a].max(index[&b]), ls)
        })
        .collect();
    let mut l = 0;
    while junction_count < spec.nodes - spec.stations && l < 2 * routes.len() {
        let (line_ix, at_start) = (l / 2, l % 2 == 0);
        l += 1;
        let r = &routes[line_ix];
        let (a, b) = if at_start { (r[1], r[0]) } else { (r[r.len() - 2], r[r.len() - 1]) };
        let Some(k) = edges.iter().position(|e| (e.0 == a && e.1 == b) || (e.0 == b && e.1 == a)) else {
            continue;
        };
        if edges[k].2.len() < 2 {
            continue;
        }
        let (pa, pb) = (nodes[a].pos, nodes[b].pos);
        let pm = pa.lerp(pb, 0.5);
        let d = pb.sub(pa).scale(0.5);
        let side = if rng.gen_bool(0.5) { d.perp() } else { d.perp().scale(-1.0) };
        let pt = pm.add(d.add(side).scale(std::f64::consts::FRAC_1_SQRT_2));
        junction_count += 1;
        nodes.push(Node {
            id: format!("j{junction_count}"),
            kind: NodeKind::Auxiliary,
            pos: pm,
        });
        let m = nodes.len() - 1;
        let t = station_node(pt, &mut nodes);
        let rest: Vec<usize> = edges[k].2.iter().copied().filter(|&x| x != line_ix).collect();
        for &x in &rest {
            insert_between(&mut routes[x], a, b, m);
        }
        let all = std::mem::take(&mut edges[k].2);
        edges[k] = (a, m, all);
        edges.push((m, b, rest));
        edges.push((m, t, vec![line_ix]));
        let r = &mut routes[line_ix];
        if at_start {
            r[0] = m;
            r.insert(0, t);
        } else {
            *r.last_mut().unwrap() = m;
            r.push(t);
        }
    }
    while nodes.len() < spec.nodes {
        let len = |e: &(usize, usize, Vec<usize>)| nodes[e.0].pos.dist(nodes[e.1].pos);
        let (k, _) = edges
            .iter()
            .enumerate()
            .max_by(|x, y| len(x.1).total_cmp(&len(y.1)).then(y.0.cmp(&x.0)))
            .expect("at least one edge");
        let (a, b, ls) = edges[k].clone();
        let m = station_node(nodes[a].pos.lerp(nodes[b].pos, 0.5), &mut nodes);
        edges[k] = (a, m, ls.clone());
        edges.push((m, b, ls.clone()));
        for &l in &ls {
            insert_between(&mut routes[l], a, b, m);
        }
    }
    let edges = edges
        .into_iter()
        .enumerate()
        .map(|(i, (a, b, ls))| Edge {
            id: format!("e{i}"),
            a,
            b,
            lines: ls,
            path: Polyline::new([nodes[a].pos, nodes[b].pos]).expect("distinct lattice points"),
        })
        .collect();
    let graph = LineGraph {
        nodes,
        edges,
        lines: (0..spec.lines).map(|l| line(l, &format!("{}", l + 1))).collect(),
    };
    City { graph, routes, attempt }
}

/// Writes a GTFS feed whose trips follow the city's lines, one trip per
/// direction, with shapes through every node and stops at the stations.
/// Positions are unprojected around `(lat0, lon0)`.
pub fn write_gtfs(city: &City, dir: impl AsRef<Path>, lat0: f64, lon0: f64) -> std::io::Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let tm = TransverseMercator::new(lat0, lon0);
    let g = &city.graph;
    let ll = |v: usize| tm.unproject(g.nodes[v].pos);
    let mut agency = String::from("agency_id,agency_name,agency_url,agency_timezone\n");
    agency.push_str("synth,Synthetic Transit,https://example.org,Europe/Berlin\n");
    let mut calendar = String::from("service_id,monday,tuesday,wednesday,thursday,friday,saturday,sunday,start_date,end_date\n");
    calendar.push_str("daily,1,1,1,1,1,1,1,20240101,20241231\n");
    let mut stops = String::from("stop_id,stop_name,stop_lat,stop_lon\n");
    for (v, n) in g.nodes.iter().enumerate() {
        if let NodeKind::Station { station_id, name } = &n.kind {
            let (lat, lon) = ll(v);
            writeln!(stops, "{station_id},{name},{lat:.9},{lon:.9}").unwrap();
        }
    }
    let mut routes = String::from("route_id,route_short_name,route_long_name,route_type,route_color\n");
    let mut trips = String::from("route_id,service_id,trip_id,shape_id\n");
    let mut times = String::from("trip_id,arrival_time,departure_time,stop_id,stop_sequence\n");
    let mut shapes = String::from("shape_id,shape_pt_lat,shape_pt_lon,shape_pt_sequence\n");
    for (l, route) in city.routes.iter().enumerate() {
        let tl = &g.lines[l];
        let color = tl.color.to_string();
        writeln!(routes, "R{l},{},Line {},1,{}", tl.label, tl.label, color.trim_start_matches('#').to_uppercase()).unwrap();
        for dir_k in 0..2 {
            let seq: Vec<usize> = if dir_k == 0 {
                route.clone()
            } else {
                route.iter().rev().copied().collect()
            };
            let trip = format!("R{l}_{dir_k}");
            writeln!(trips, "R{l},daily,{trip},{trip}").unwrap();
            for (i, &v) in seq.iter().enumerate() {
                let (lat, lon) = ll(v);
                writeln!(shapes, "{trip},{lat:.9},{lon:.9},{}", i + 1).unwrap();
            }
            let mut k = 0;
            for &v in &seq {
                if let NodeKind::Station { station_id, .. } = &g.nodes[v].kind {
                    let t = 6 * 3600 + 120 * k;
                    let hms = format!("{:02}:{:02}:{:02}", t / 3600, t / 60 % 60, t % 60);
                    writeln!(times, "{trip},{hms},{hms},{station_id},{}", k + 1).unwrap();
                    k += 1;
                }
            }
        }
    }
    for (file, body) in [
        ("agency.txt", agency),
        ("calendar.txt", calendar),
        ("stops.txt", stops),
        ("routes.txt", routes),
        ("trips.txt", trips),
        ("stop_times.txt", times),
        ("shapes.txt", shapes),
    ] {
        std::fs::write(dir.join(file), body)?;
    }
    Ok(())
}
