use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use transitmap::geometry::SweepParams;
use transitmap::gtfs::{RawParams, DEFAULT_ROUTE_TYPES};
use transitmap::instance::WeightPolicy;
use transitmap::line_graph::BuildParams;
use transitmap::optimize::external::ExternalSolver;
use transitmap::optimize::{Backend, SolveOptions, Variant};
use transitmap::render::{CurveKind, RenderStyle};

use crate::error::{Class, CliError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub d_hat: f64,
    pub step_m: f64,
    pub k: usize,
    pub min_seg_len: f64,
    pub snap_tol: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        let s = SweepParams::default();
        GeometryConfig {
            d_hat: s.d_hat,
            step_m: s.step_m,
            k: s.k,
            min_seg_len: s.min_seg_len,
            snap_tol: RawParams::default().snap_tol,
        }
    }
}

/// Settings shared by all subcommands, as read from `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub geometry: GeometryConfig,
    /// Basic GTFS route types to keep; empty keeps all.
    pub route_types: Vec<u16>,
    pub weights: WeightPolicy,
    pub variant: Variant,
    /// `builtin`, `milp`, `ext` (command from the environment) or `ext:<command>`.
    pub solver: String,
    pub solver_timeout_s: Option<f64>,
    pub node_limit: Option<u64>,
    pub render: RenderStyle,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            geometry: GeometryConfig::default(),
            route_types: DEFAULT_ROUTE_TYPES.to_vec(),
            weights: WeightPolicy::default(),
            variant: Variant::I,
            solver: "builtin".into(),
            solver_timeout_s: None,
            node_limit: None,
            render: RenderStyle::default(),
        }
    }
}

/// Command-line overrides; `None` keeps the configured value.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// JSON configuration file; flags take precedence over it
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<std::path::PathBuf>,
    /// Distance below which two paths count as shared, meters
    #[arg(long, global = true, value_name = "METERS")]
    pub d_hat: Option<f64>,
    /// Model variant: B (baseline), I (improved) or S (with separations)
    #[arg(long, global = true)]
    pub variant: Option<Variant>,
    /// builtin, milp, ext (command from TRANSITMAP_SOLVER) or ext:<command>
    #[arg(long, global = true, value_name = "SPEC")]
    pub solver: Option<String>,
    /// Time limit for an external solver, seconds
    #[arg(long, global = true, value_name = "SECS")]
    pub solver_timeout: Option<f64>,
    /// Comma-separated basic GTFS route types, or "all"
    #[arg(long, global = true, value_name = "LIST")]
    pub route_types: Option<String>,
    /// Distance between adjacent line centers, map units
    #[arg(long, global = true, value_name = "W")]
    pub line_width: Option<f64>,
    /// Inner connection shape: cubic, arc or straight
    #[arg(long, global = true)]
    pub curve: Option<CurveKind>,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    pub fn resolve(o: &Overrides) -> Result<PipelineConfig, CliError> {
        let mut c = match &o.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(d) = o.d_hat {
            c.geometry.d_hat = d;
        }
        if let Some(v) = o.variant {
            c.variant = v;
        }
        if let Some(s) = &o.solver {
            c.solver = s.clone();
        }
        if let Some(t) = o.solver_timeout {
            c.solver_timeout_s = Some(t);
        }
        if let Some(r) = &o.route_types {
            c.route_types = parse_route_types(r)?;
        }
        if let Some(w) = o.line_width {
            c.render.line_width = w;
        }
        if let Some(k) = o.curve {
            c.render.curve = k;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let g = &self.geometry;
        for (name, v) in [("d_hat", g.d_hat), ("step_m", g.step_m), ("snap_tol", g.snap_tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::usage(format!("{name} must be positive, got {v}")));
            }
        }
        if !(g.min_seg_len.is_finite() && g.min_seg_len >= 0.0) {
            return Err(CliError::usage(format!("min_seg_len must be non-negative, got {}", g.min_seg_len)));
        }
        if let Some(t) = self.solver_timeout_s {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::usage(format!("solver timeout must be positive, got {t}")));
            }
        }
        self.backend()?;
        self.render.validate()?;
        Ok(())
    }

    pub fn raw_params(&self) -> RawParams {
        RawParams {
            snap_tol: self.geometry.snap_tol,
            route_types: self.route_types.clone(),
        }
    }

    pub fn build_params(&self) -> BuildParams {
        let g = &self.geometry;
        BuildParams {
            sweep: SweepParams {
                d_hat: g.d_hat,
                step_m: g.step_m,
                k: g.k,
                min_seg_len: g.min_seg_len,
            },
            ..BuildParams::default()
        }
    }

    pub fn backend(&self) -> Result<Backend, CliError> {
        let timeout = self.solver_timeout_s.map(Duration::from_secs_f64);
        match self.solver.trim() {
            "builtin" => Ok(Backend::Builtin),
            "milp" => Ok(Backend::Milp),
            "ext" => ExternalSolver::from_env()
                .map(|s| Backend::External(s.with_timeout(timeout)))
                .ok_or_else(|| CliError::usage("solver ext needs TRANSITMAP_SOLVER to be set")),
            s => match s.strip_prefix("ext:") {
                Some(cmd) if !cmd.trim().is_empty() => Ok(Backend::External(ExternalSolver::new(cmd.trim()).with_timeout(timeout))),
                _ => Err(CliError::new(
                    Class::Usage,
                    format!("unknown solver {s:?}, expected builtin, milp, ext or ext:<command>"),
                )),
            },
        }
    }

    pub fn solve_options(&self) -> Result<SolveOptions, CliError> {
        Ok(SolveOptions {
            variant: self.variant,
            backend: self.backend()?,
            node_limit: self.node_limit,
        })
    }
}

pub fn parse_route_types(s: &str) -> Result<Vec<u16>, CliError> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u16>()
                .map_err(|_| CliError::usage(format!("bad route type {t:?} in --route-types")))
        })
        .collect()
}
