use std::collections::HashMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::graph::Rgb;

use super::GtfsError;

#[derive(Debug, Clone, PartialEq)]
pub struct Stop {
    pub id: String,
    pub name: String,
    pub lat: f64,
    pub lon: f64,
    /// Index of the parent station, if the feed groups stops.
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub id: String,
    pub short_name: String,
    pub long_name: String,
    pub route_type: u16,
    pub color: Option<Rgb>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trip {
    pub id: String,
    pub route: usize,
    pub shape: Option<usize>,
    /// Stop indices in `stop_sequence` order.
    pub stops: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    pub id: String,
    /// `(lat, lon)` in `shape_pt_sequence` order.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeedModel {
    pub stops: Vec<Stop>,
    pub routes: Vec<Route>,
    pub trips: Vec<Trip>,
    pub shapes: Vec<Shape>,
}

#[derive(Deserialize)]
struct StopRow {
    stop_id: String,
    #[serde(default)]
    stop_name: String,
    stop_lat: String,
    stop_lon: String,
    #[serde(default)]
    parent_station: String,
}

#[derive(Deserialize)]
struct RouteRow {
    route_id: String,
    #[serde(default)]
    route_short_name: String,
    #[serde(default)]
    route_long_name: String,
    route_type: String,
    #[serde(default)]
    route_color: String,
}

#[derive(Deserialize)]
struct TripRow {
    route_id: String,
    trip_id: String,
    #[serde(default)]
    shape_id: String,
}

#[derive(Deserialize)]
struct StopTimeRow {
    trip_id: String,
    stop_id: String,
    stop_sequence: String,
}

#[derive(Deserialize)]
struct ShapeRow {
    shape_id: String,
    shape_pt_lat: String,
    shape_pt_lon: String,
    shape_pt_sequence: String,
}

/// Rows of `file` with their 1-based line numbers; `None` if the file is
/// optional and absent.
fn read_rows<T: DeserializeOwned>(dir: &Path, file: &str, required: bool) -> Result<Option<Vec<(usize, T)>>, GtfsError> {
    let path = dir.join(file);
    if !path.is_file() {
        return if required {
            Err(GtfsError::MissingFile { file: file.to_string() })
        } else {
            Ok(None)
        };
    }
    let malformed = |row: usize, msg: String| GtfsError::MalformedRow {
        file: file.to_string(),
        row,
        msg,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(&path)
        .map_err(|e| GtfsError::Io {
            path: path.display().to_string(),
            source: std::io::Error::other(e.to_string()),
        })?;
    let headers = rdr.headers().map_err(|e| malformed(1, e.to_string()))?.clone();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line() as usize);
            malformed(row, e.to_string())
        })?;
        let row = rec.position().map_or(0, |p| p.line() as usize);
        let parsed: T = rec.deserialize(Some(&headers)).map_err(|e| malformed(row, e.to_string()))?;
        out.push((row, parsed));
    }
    Ok(Some(out))
}

fn number<T: std::str::FromStr>(file: &str, row: usize, field: &str, s: &str) -> Result<T, GtfsError> {
    s.parse().map_err(|_| GtfsError::MalformedRow {
        file: file.to_string(),
        row,
        msg: format!("{field} {s:?} is not a valid number"),
    })
}

fn dangling(file: &str, row: usize, kind: &'static str, id: &str) -> GtfsError {
    GtfsError::DanglingReference {
        file: file.to_string(),
        row,
        kind,
        id: id.to_string(),
    }
}

/// Reads `stops.txt`, `routes.txt`, `trips.txt`, `stop_times.txt` and, if
/// present, `shapes.txt` from `dir`.
pub fn load_feed(dir: impl AsRef<Path>) -> Result<FeedModel, GtfsError> {
    let dir = dir.as_ref();
    let stop_rows: Vec<(usize, StopRow)> = read_rows(dir, "stops.txt", true)?.unwrap_or_default();
    let route_rows: Vec<(usize, RouteRow)> = read_rows(dir, "routes.txt", true)?.unwrap_or_default();
    let trip_rows: Vec<(usize, TripRow)> = read_rows(dir, "trips.txt", true)?.unwrap_or_default();
    let time_rows: Vec<(usize, StopTimeRow)> = read_rows(dir, "stop_times.txt", true)?.unwrap_or_default();
    let shape_rows: Option<Vec<(usize, ShapeRow)>> = read_rows(dir, "shapes.txt", false)?;

    let mut stops = Vec::with_capacity(stop_rows.len());
    let mut stop_ix = HashMap::new();
    for (row, r) in &stop_rows {
        if stop_ix.insert(r.stop_id.clone(), stops.len()).is_some() {
            return Err(GtfsError::MalformedRow {
                file: "stops.txt".into(),
                row: *row,
                msg: format!("duplicate stop_id {:?}", r.stop_id),
            });
        }
        stops.push(Stop {
            id: r.stop_id.clone(),
            name: r.stop_name.clone(),
            lat: number("stops.txt", *row, "stop_lat", &r.stop_lat)?,
            lon: number("stops.txt", *row, "stop_lon", &r.stop_lon)?,
            parent: None,
        });
    }
    for (i, (row, r)) in stop_rows.iter().enumerate() {
        if !r.parent_station.is_empty() {
            let p = *stop_ix
                .get(&r.parent_station)
                .ok_or_else(|| dangling("stops.txt", *row, "parent station", &r.parent_station))?;
            stops[i].parent = Some(p);
        }
    }

    let mut routes = Vec::with_capacity(route_rows.len());
    let mut route_ix = HashMap::new();
    for (row, r) in &route_rows {
        let color = if r.route_color.is_empty() {
            None
        } else {
            Some(r.route_color.parse().map_err(|msg| GtfsError::MalformedRow {
                file: "routes.txt".into(),
                row: *row,
                msg,
            })?)
        };
        route_ix.insert(r.route_id.clone(), routes.len());
        routes.push(Route {
            id: r.route_id.clone(),
            short_name: r.route_short_name.clone(),
            long_name: r.route_long_name.clone(),
            route_type: number("routes.txt", *row, "route_type", &r.route_type)?,
            color,
        });
    }

    let mut shapes = Vec::new();
    let mut shape_ix: HashMap<String, usize> = HashMap::new();
    if let Some(rows) = &shape_rows {
        let mut pts: Vec<Vec<(u32, f64, f64)>> = Vec::new();
        for (row, r) in rows {
            let seq = number("shapes.txt", *row, "shape_pt_sequence", &r.shape_pt_sequence)?;
            let lat = number("shapes.txt", *row, "shape_pt_lat", &r.shape_pt_lat)?;
            let lon = number("shapes.txt", *row, "shape_pt_lon", &r.shape_pt_lon)?;
            let i = *shape_ix.entry(r.shape_id.clone()).or_insert_with(|| {
                shapes.push(Shape {
                    id: r.shape_id.clone(),
                    points: Vec::new(),
                });
                pts.push(Vec::new());
                pts.len() - 1
            });
            pts[i].push((seq, lat, lon));
        }
        for (s, mut p) in shapes.iter_mut().zip(pts) {
            p.sort_by_key(|&(seq, _, _)| seq);
            s.points = p.into_iter().map(|(_, lat, lon)| (lat, lon)).collect();
        }
    }

    let mut trips = Vec::with_capacity(trip_rows.len());
    let mut trip_ix = HashMap::new();
    for (row, r) in &trip_rows {
        let route = *route_ix
            .get(&r.route_id)
            .ok_or_else(|| dangling("trips.txt", *row, "route", &r.route_id))?;
        // without shapes.txt the shape reference cannot be resolved and the
        // trip falls back to straight segments
        let shape = if r.shape_id.is_empty() || shape_rows.is_none() {
            None
        } else {
            Some(
                *shape_ix
                    .get(&r.shape_id)
                    .ok_or_else(|| dangling("trips.txt", *row, "shape", &r.shape_id))?,
            )
        };
        trip_ix.insert(r.trip_id.clone(), trips.len());
        trips.push(Trip {
            id: r.trip_id.clone(),
            route,
            shape,
            stops: Vec::new(),
        });
    }

    let mut seqs: Vec<Vec<(u32, usize)>> = vec![Vec::new(); trips.len()];
    for (row, r) in &time_rows {
        let t = *trip_ix
            .get(&r.trip_id)
            .ok_or_else(|| dangling("stop_times.txt", *row, "trip", &r.trip_id))?;
        let s = *stop_ix
            .get(&r.stop_id)
            .ok_or_else(|| dangling("stop_times.txt", *row, "stop", &r.stop_id))?;
        let seq = number("stop_times.txt", *row, "stop_sequence", &r.stop_sequence)?;
        seqs[t].push((seq, s));
    }
    for (trip, mut s) in trips.iter_mut().zip(seqs) {
        s.sort_by_key(|&(seq, _)| seq);
        trip.stops = s.into_iter().map(|(_, stop)| stop).collect();
    }

    Ok(FeedModel {
        stops,
        routes,
        trips,
        shapes,
    })
}
