use std::fmt;
use std::process::ExitCode;

use transitmap::graph::GraphError;
use transitmap::gtfs::GtfsError;
use transitmap::line_graph::LineGraphError;
use transitmap::optimize::OptimizeError;
use transitmap::render::RenderError;

/// Process exit status per error class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Usage = 2,
    Io = 3,
    Data = 4,
    Geometry = 5,
    Solver = 6,
    Mismatch = 7,
}

#[derive(Debug)]
pub struct CliError {
    pub class: Class,
    pub msg: String,
}

impl CliError {
    pub fn new(class: Class, msg: impl fmt::Display) -> CliError {
        CliError { class, msg: msg.to_string() }
    }

    pub fn usage(msg: impl fmt::Display) -> CliError {
        CliError::new(Class::Usage, msg)
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> CliError {
        CliError::new(Class::Io, format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.class as u8)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl From<GtfsError> for CliError {
    fn from(e: GtfsError) -> CliError {
        let class = match e {
            GtfsError::MissingFile { .. } | GtfsError::Io { .. } => Class::Io,
            GtfsError::ProjectionFailure { .. } => Class::Geometry,
            _ => Class::Data,
        };
        CliError::new(class, e)
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> CliError {
        let class = match e {
            GraphError::Io { .. } => Class::Io,
            _ => Class::Data,
        };
        CliError::new(class, e)
    }
}

impl From<LineGraphError> for CliError {
    fn from(e: LineGraphError) -> CliError {
        match e {
            LineGraphError::Graph(g) => g.into(),
            e => CliError::new(Class::Geometry, e),
        }
    }
}

impl From<OptimizeError> for CliError {
    fn from(e: OptimizeError) -> CliError {
        let class = match e {
            OptimizeError::MalformedOrdering(_) => Class::Data,
            OptimizeError::ObjectiveMismatch { .. } => Class::Mismatch,
            _ => Class::Solver,
        };
        CliError::new(class, e)
    }
}

impl From<RenderError> for CliError {
    fn from(e: RenderError) -> CliError {
        let class = match e {
            RenderError::Ordering(_) => Class::Data,
            RenderError::Geometry(_) => Class::Geometry,
            RenderError::Style(_) => Class::Usage,
            RenderError::Io(_) => Class::Io,
        };
        CliError::new(class, e)
    }
}
