//! Browser bindings: generate a synthetic network, optimize its line
//! ordering and render it as SVG.

use transitmap::graph::{LineGraph, Ordering};
use transitmap::instance::{Instance, WeightPolicy};
use transitmap::optimize::{evaluate, optimize_pipeline, Backend, SolveOptions, Variant};
use transitmap::render::{render_svg_string, CurveKind, RenderStyle};
use transitmap::synth::{city, random_ordering, star, CitySpec};
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Demo {
    graph: LineGraph,
    ordering: Ordering,
}

#[wasm_bindgen]
impl Demo {
    /// `preset` is `star`, `freiburg`, `stuttgart` or `newyork`.
    #[wasm_bindgen(constructor)]
    pub fn new(preset: &str, seed: u32) -> Result<Demo, JsError> {
        let graph = match preset {
            "star" => star(seed as u64, 4, 6),
            name => {
                let spec = CitySpec::preset(name).ok_or_else(|| js_err(format!("unknown preset {name:?}")))?;
                city(&spec, seed as u64).map_err(js_err)?.graph
            }
        };
        let ordering = random_ordering(&graph, seed as u64);
        Ok(Demo { graph, ordering })
    }

    /// Loads a line graph JSON document as written by `transitmap extract`.
    #[wasm_bindgen(js_name = fromGraphJson)]
    pub fn from_graph_json(text: &str) -> Result<Demo, JsError> {
        let graph = LineGraph::from_json(text).map_err(js_err)?;
        let ordering = Ordering::identity(&graph);
        Ok(Demo { graph, ordering })
    }

    /// `|S| | |V| | |E| | |L| | M`.
    pub fn dims(&self) -> String {
        self.graph.dims().to_string()
    }

    /// Replaces the ordering by a random one.
    pub fn shuffle(&mut self, seed: u32) {
        self.ordering = random_ordering(&self.graph, seed as u64);
    }

    /// Optimizes the ordering with variant `B`, `I` or `S` and returns a JSON
    /// summary of the result.
    pub fn optimize(&mut self, variant: &str) -> Result<String, JsError> {
        let variant: Variant = variant.parse().map_err(js_err)?;
        let inst = Instance::new(self.graph.clone(), &WeightPolicy::default());
        let opts = SolveOptions {
            variant,
            backend: Backend::Builtin,
            node_limit: Some(2_000_000),
        };
        let r = optimize_pipeline(&inst, &opts).map_err(js_err)?;
        self.ordering = r.ordering;
        Ok(serde_json::json!({
            "crossings": r.breakdown.crossings,
            "separations": r.breakdown.separations,
            "objective": r.breakdown.objective,
            "core": r.core_dims.to_string(),
            "components": r.components,
        })
        .to_string())
    }

    /// Crossings and separations of the current ordering, as JSON.
    pub fn score(&self) -> Result<String, JsError> {
        let inst = Instance::new(self.graph.clone(), &WeightPolicy::default()).with_separations(true);
        let b = evaluate(&inst, &self.ordering).map_err(js_err)?;
        Ok(serde_json::json!({ "crossings": b.crossings, "separations": b.separations }).to_string())
    }

    pub fn render(&self, line_width: f64, curve: &str) -> Result<String, JsError> {
        let style = RenderStyle {
            line_width,
            curve: curve.parse::<CurveKind>().map_err(js_err)?,
            font_size: line_width * 4.0,
            ..RenderStyle::default()
        };
        render_svg_string(&self.graph, &self.ordering, &style).map_err(js_err)
    }
}
