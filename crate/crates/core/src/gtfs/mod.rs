//! GTFS static feeds: parsing the files the pipeline needs and turning trips
//! into a raw network of per-line edges between stations.

mod feed;
mod network;
mod projection;

pub use feed::{load_feed, FeedModel, Route, Shape, Stop, Trip};
pub use network::{build_raw_network, RawEdge, RawNetwork, RawParams, Station, DEFAULT_ROUTE_TYPES};
pub use projection::TransverseMercator;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GtfsError {
    #[error("required GTFS file {file} is missing")]
    MissingFile { file: String },
    #[error("{file}, row {row}: {msg}")]
    MalformedRow { file: String, row: usize, msg: String },
    #[error("{file}, row {row}: unknown {kind} {id:?}")]
    DanglingReference {
        file: String,
        row: usize,
        kind: &'static str,
        id: String,
    },
    #[error("stop {stop} at ({lat}, {lon}) cannot be projected")]
    ProjectionFailure { stop: String, lat: f64, lon: f64 },
    #[error("trip {trip}: stop {stop} is {dist:.1} m from its shape")]
    ShapeMismatch { trip: String, stop: String, dist: f64 },
    #[error("feed contains no trips of the selected route types")]
    NoTrips,
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}
