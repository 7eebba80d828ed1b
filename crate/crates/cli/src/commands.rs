use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use transitmap::graph::{load_line_graph, save_line_graph, LineGraph, Ordering};
use transitmap::gtfs::{build_raw_network, load_feed};
use transitmap::instance::Instance;
use transitmap::line_graph::construct_line_graph;
use transitmap::optimize::{optimize_pipeline, EventKind, PipelineReport, Variant};
use transitmap::render::render_svg_string;
use transitmap::synth::{city, write_gtfs, CitySpec};

use crate::config::PipelineConfig;
use crate::error::{Class, CliError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub variant: Variant,
    pub solver: String,
    pub crossings: i64,
    pub same_edge_crossings: i64,
    pub split_crossings: i64,
    pub separations: i64,
    pub objective: i64,
    pub core_nodes: usize,
    pub core_edges: usize,
    pub components: usize,
    pub nontrivial_components: usize,
    pub model_rows: usize,
    pub model_cols: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct OrderingFile {
    ordering: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    summary: Option<Summary>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OrderingInput {
    Wrapped(OrderingFile),
    Bare(BTreeMap<String, Vec<String>>),
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn print_dims(title: &str, g: &LineGraph) {
    println!("{title:<12} |S| | |V| | |E| | |L| | M");
    println!("{:<12} {}", "", g.dims());
}

pub fn extract(cfg: &PipelineConfig, gtfs_dir: &Path, out: &Path) -> Result<LineGraph, CliError> {
    let t = Instant::now();
    let feed = load_feed(gtfs_dir)?;
    let raw = build_raw_network(&feed, &cfg.raw_params())?;
    let g = construct_line_graph(&raw, &cfg.build_params())?;
    let elapsed = ms(t);
    save_line_graph(&g, out)?;
    print_dims("line graph", &g);
    println!("extracted in {elapsed:.1} ms");
    Ok(g)
}

fn summary(cfg: &PipelineConfig, r: &PipelineReport) -> Summary {
    let count = |k: EventKind| r.breakdown.of_kind(k).map(|h| h.count).sum::<i64>();
    Summary {
        variant: cfg.variant,
        solver: cfg.solver.clone(),
        crossings: r.breakdown.crossings,
        same_edge_crossings: count(EventKind::SameCrossing),
        split_crossings: count(EventKind::SplitCrossing),
        separations: r.breakdown.separations,
        objective: r.breakdown.objective,
        core_nodes: r.core_dims.nodes,
        core_edges: r.core_dims.edges,
        components: r.components,
        nontrivial_components: r.nontrivial_components,
        model_rows: r.model_dims.0,
        model_cols: r.model_dims.1,
    }
}

fn solve_graph(cfg: &PipelineConfig, g: &LineGraph, out: &Path) -> Result<Ordering, CliError> {
    cfg.weights.validate(g).map_err(CliError::usage)?;
    let t = Instant::now();
    let inst = Instance::new(g.clone(), &cfg.weights).with_separations(cfg.variant.prices_separations());
    let report = optimize_pipeline(&inst, &cfg.solve_options()?)?;
    let elapsed = ms(t);
    let s = summary(cfg, &report);
    let doc = OrderingFile {
        ordering: report.ordering.to_doc(g),
        summary: Some(s.clone()),
    };
    let text = serde_json::to_string_pretty(&doc).expect("ordering serializes");
    write(out, &(text + "\n"))?;
    println!("core graph   |S| | |V| | |E| | |L| | M");
    println!("{:<12} {}", "", report.core_dims);
    println!("components   {} ({} nontrivial)", s.components, s.nontrivial_components);
    println!("model        {} rows x {} cols (variant {:?}, {})", s.model_rows, s.model_cols, s.variant, s.solver);
    println!("crossings    {} ({} same edge, {} split)", s.crossings, s.same_edge_crossings, s.split_crossings);
    println!("separations  {}", s.separations);
    println!("objective    {}", s.objective);
    println!("optimized in {elapsed:.1} ms");
    Ok(report.ordering)
}

pub fn optimize(cfg: &PipelineConfig, graph: &Path, out: &Path) -> Result<(), CliError> {
    let g = load_line_graph(graph)?;
    solve_graph(cfg, &g, out).map(|_| ())
}

fn read_ordering(g: &LineGraph, path: &Path) -> Result<Ordering, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let doc = match serde_json::from_str(&text) {
        Ok(OrderingInput::Wrapped(f)) => f.ordering,
        Ok(OrderingInput::Bare(d)) => d,
        Err(e) => return Err(CliError::new(Class::Data, format!("{}: {e}", path.display()))),
    };
    Ordering::from_doc(g, &doc).map_err(|e| CliError::new(Class::Data, format!("{}: {e}", path.display())))
}

fn draw(cfg: &PipelineConfig, g: &LineGraph, o: &Ordering, out: &Path) -> Result<(), CliError> {
    let t = Instant::now();
    let svg = render_svg_string(g, o, &cfg.render)?;
    write(out, &svg)?;
    println!("rendered in {:.1} ms", ms(t));
    Ok(())
}

pub fn render(cfg: &PipelineConfig, graph: &Path, ordering: &Path, out: &Path) -> Result<(), CliError> {
    let g = load_line_graph(graph)?;
    let o = read_ordering(&g, ordering)?;
    draw(cfg, &g, &o, out)
}

pub fn full(
    cfg: &PipelineConfig,
    gtfs_dir: &Path,
    out: &Path,
    graph_out: Option<&Path>,
    ordering_out: Option<&Path>,
) -> Result<(), CliError> {
    let t = Instant::now();
    let scratch = std::env::temp_dir().join(format!("transitmap-full-{}", std::process::id()));
    fs::create_dir_all(&scratch).map_err(|e| CliError::io(&scratch, e))?;
    let graph_path = graph_out.map(Path::to_path_buf).unwrap_or_else(|| scratch.join("graph.json"));
    let ordering_path = ordering_out.map(Path::to_path_buf).unwrap_or_else(|| scratch.join("ordering.json"));
    let result = (|| {
        let g = extract(cfg, gtfs_dir, &graph_path)?;
        let o = solve_graph(cfg, &g, &ordering_path)?;
        draw(cfg, &g, &o, out)
    })();
    let _ = fs::remove_dir_all(&scratch);
    result?;
    println!("total        {:.1} ms", ms(t));
    Ok(())
}

pub fn synth(preset: &str, seed: u64, out: &Path, graph_out: Option<&Path>, lat: f64, lon: f64) -> Result<(), CliError> {
    let key = preset.replace(['-', '_', ' '], "");
    let spec = CitySpec::preset(&key)
        .or_else(|| CitySpec::preset(preset))
        .ok_or_else(|| CliError::usage(format!("unknown preset {preset:?}, expected freiburg, stuttgart or new-york")))?;
    let c = city(&spec, seed).map_err(|e| CliError::new(Class::Data, e))?;
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    write_gtfs(&c, out, lat, lon).map_err(|e| CliError::io(out, e))?;
    if let Some(p) = graph_out {
        save_line_graph(&c.graph, p)?;
    }
    print_dims("synthetic", &c.graph);
    Ok(())
}
