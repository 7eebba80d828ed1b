//! Geographically accurate transit maps from GTFS schedules.
//!
//! The pipeline has three stages: [`line_graph`] extracts a line graph from
//! overlapping vehicle paths, [`optimize`] computes a crossing- and
//! separation-minimal line ordering per edge (exactly, optionally through the
//! ILP models in [`ilp`] and after the reductions in [`reduce`]), and
//! [`render`] draws the ordered graph as SVG.

pub mod geometry;
pub mod graph;
pub mod gtfs;
pub mod instance;
pub mod line_graph;
pub mod ilp;
pub mod optimize;
pub mod reduce;
pub mod render;
pub mod synth;
