use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::geometry::{project_on_segment, Point, Polyline};
use crate::graph::TransitLine;
use crate::synth::palette;

use super::{FeedModel, GtfsError, TransverseMercator};

/// Tram, subway and rail.
pub const DEFAULT_ROUTE_TYPES: [u16; 3] = [0, 1, 2];

#[derive(Debug, Clone, PartialEq)]
pub struct RawParams {
    /// Maximum distance between a stop and the shape of a trip serving it, meters.
    pub snap_tol: f64,
    /// Basic GTFS route types to keep; extended types are mapped to their
    /// basic type. Empty keeps every route.
    pub route_types: Vec<u16>,
}

impl Default for RawParams {
    fn default() -> Self {
        RawParams {
            snap_tol: 100.0,
            route_types: DEFAULT_ROUTE_TYPES.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Station {
    pub id: String,
    pub name: String,
    pub pos: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawEdge {
    pub a: usize,
    pub b: usize,
    pub line: usize,
    pub path: Polyline,
}

/// Per-line edges between consecutive stations of every distinct stop
/// pattern, before overlapping edges are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct RawNetwork {
    pub stations: Vec<Station>,
    pub lines: Vec<TransitLine>,
    pub edges: Vec<RawEdge>,
}

#[derive(Serialize)]
struct RawEdgeDoc<'a> {
    a: &'a str,
    b: &'a str,
    line: &'a str,
    coordinates: &'a [Point],
}

#[derive(Serialize)]
struct RawDoc<'a> {
    stations: &'a [Station],
    lines: &'a [TransitLine],
    edges: Vec<RawEdgeDoc<'a>>,
}

impl RawNetwork {
    pub fn to_json(&self) -> String {
        let doc = RawDoc {
            stations: &self.stations,
            lines: &self.lines,
            edges: self
                .edges
                .iter()
                .map(|e| RawEdgeDoc {
                    a: &self.stations[e.a].id,
                    b: &self.stations[e.b].id,
                    line: &self.lines[e.line].id,
                    coordinates: e.path.points(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("raw network serializes")
    }
}

fn basic_route_type(t: u16) -> u16 {
    match t {
        100..=199 => 2,
        400..=499 => 1,
        700..=799 => 3,
        900..=999 => 0,
        1000..=1099 => 4,
        1300..=1399 => 6,
        1400..=1499 => 7,
        _ => t,
    }
}

/// Nearest point of `p` to `q` at arc length at least `s_min`: `(s, dist)`.
fn nearest_after(p: &Polyline, q: Point, s_min: f64) -> (f64, f64) {
    let pts = p.points();
    let mut best = (s_min, f64::INFINITY);
    for i in 0..pts.len() - 1 {
        let (s0, s1) = (p.arc_at_vertex(i), p.arc_at_vertex(i + 1));
        if s1 < s_min {
            continue;
        }
        let lo = if s1 > s0 { ((s_min - s0) / (s1 - s0)).clamp(0.0, 1.0) } else { 0.0 };
        let f = project_on_segment(pts[i], pts[i + 1], q).max(lo);
        let d = pts[i].lerp(pts[i + 1], f).dist(q);
        if d < best.1 {
            best = (s0 + f * (s1 - s0), d);
        }
    }
    best
}

/// Builds one edge per consecutive station pair of every distinct stop
/// pattern. Stops are grouped under their parent station, coordinates are
/// projected around the centroid of the served stations, and an edge follows
/// the trip's shape between the projections of its two stops when the trip
/// has one. A route connecting the same two stations in several patterns
/// yields a single edge, the one of the first pattern in route order.
pub fn build_raw_network(feed: &FeedModel, params: &RawParams) -> Result<RawNetwork, GtfsError> {
    let root = |s: usize| feed.stops[s].parent.unwrap_or(s);
    let keep_route = |r: usize| {
        params.route_types.is_empty() || params.route_types.contains(&basic_route_type(feed.routes[r].route_type))
    };

    // distinct patterns: (route id, station sequence, shape) -> first trip by id
    let mut trip_order: Vec<usize> = (0..feed.trips.len()).collect();
    trip_order.sort_by(|&x, &y| feed.trips[x].id.cmp(&feed.trips[y].id));
    let mut patterns: BTreeMap<(&str, Vec<usize>, Option<&str>), usize> = BTreeMap::new();
    for t in trip_order {
        let trip = &feed.trips[t];
        if !keep_route(trip.route) {
            continue;
        }
        let mut seq: Vec<usize> = trip.stops.iter().map(|&s| root(s)).collect();
        seq.dedup();
        if seq.len() < 2 {
            continue;
        }
        let key = (
            feed.routes[trip.route].id.as_str(),
            seq,
            trip.shape.map(|s| feed.shapes[s].id.as_str()),
        );
        patterns.entry(key).or_insert(t);
    }
    if patterns.is_empty() {
        return Err(GtfsError::NoTrips);
    }

    let mut served: Vec<usize> = patterns.keys().flat_map(|(_, seq, _)| seq.iter().copied()).collect();
    served.sort_by(|&x, &y| feed.stops[x].id.cmp(&feed.stops[y].id));
    served.dedup();
    let tm = TransverseMercator::centered(served.iter().map(|&s| (feed.stops[s].lat, feed.stops[s].lon)))
        .expect("at least one served station");
    let project_stop = |s: usize| {
        let st = &feed.stops[s];
        tm.project(st.lat, st.lon).ok_or_else(|| GtfsError::ProjectionFailure {
            stop: st.id.clone(),
            lat: st.lat,
            lon: st.lon,
        })
    };
    let mut station_ix = HashMap::new();
    let mut stations = Vec::with_capacity(served.len());
    for &s in &served {
        station_ix.insert(s, stations.len());
        stations.push(Station {
            id: feed.stops[s].id.clone(),
            name: feed.stops[s].name.clone(),
            pos: project_stop(s)?,
        });
    }

    let mut route_ids: Vec<&str> = patterns.keys().map(|(r, _, _)| *r).collect();
    route_ids.dedup();
    let line_ix: HashMap<&str, usize> = route_ids.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let lines: Vec<TransitLine> = route_ids
        .iter()
        .enumerate()
        .map(|(i, rid)| {
            let r = feed.routes.iter().find(|r| r.id == *rid).expect("pattern route exists");
            let label = [&r.short_name, &r.long_name, &r.id]
                .into_iter()
                .find(|s| !s.is_empty())
                .cloned()
                .unwrap_or_else(|| r.id.clone());
            TransitLine {
                id: r.id.clone(),
                label,
                color: r.color.unwrap_or_else(|| palette(i)),
            }
        })
        .collect();

    let mut shape_cache: HashMap<usize, Option<Polyline>> = HashMap::new();
    let mut edges = Vec::new();
    let mut seen = HashMap::new();
    for ((rid, seq, _), &t) in &patterns {
        let trip = &feed.trips[t];
        let line = line_ix[rid];
        let shape = match trip.shape {
            Some(sh) => {
                if !shape_cache.contains_key(&sh) {
                    let pts = feed.shapes[sh]
                        .points
                        .iter()
                        .map(|&(lat, lon)| {
                            tm.project(lat, lon).ok_or_else(|| GtfsError::ProjectionFailure {
                                stop: format!("shape {}", feed.shapes[sh].id),
                                lat,
                                lon,
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    shape_cache.insert(sh, Polyline::new(pts).ok());
                }
                shape_cache[&sh].as_ref()
            }
            None => None,
        };
        // arc position on the shape of every stop of the trip, in order
        let mut stop_seq: Vec<usize> = Vec::with_capacity(trip.stops.len());
        for &s in &trip.stops {
            if stop_seq.last().map(|&l| root(l)) != Some(root(s)) {
                stop_seq.push(s);
            }
        }
        let mut arcs = Vec::with_capacity(stop_seq.len());
        if let Some(shape) = shape {
            let mut s_min = 0.0;
            for &s in &stop_seq {
                let q = project_stop(s)?;
                let (at, d) = nearest_after(shape, q, s_min);
                if d > params.snap_tol {
                    return Err(GtfsError::ShapeMismatch {
                        trip: trip.id.clone(),
                        stop: feed.stops[s].id.clone(),
                        dist: d,
                    });
                }
                arcs.push(at);
                s_min = at;
            }
        }
        debug_assert_eq!(stop_seq.len(), seq.len());
        for i in 0..seq.len() - 1 {
            let (a, b) = (station_ix[&seq[i]], station_ix[&seq[i + 1]]);
            let key = (line, a.min(b), a.max(b));
            if seen.contains_key(&key) || stations[a].pos.dist(stations[b].pos) < 1e-6 {
                continue;
            }
            let path = match shape {
                Some(sh) if arcs[i + 1] - arcs[i] > 1e-6 => sh.sub_dist(arcs[i], arcs[i + 1]).ok(),
                _ => None,
            };
            let path = match path {
                Some(p) => p,
                None => Polyline::new([stations[a].pos, stations[b].pos]).expect("distinct stations"),
            };
            seen.insert(key, edges.len());
            edges.push(RawEdge { a, b, line, path });
        }
    }
    Ok(RawNetwork { stations, lines, edges })
}
