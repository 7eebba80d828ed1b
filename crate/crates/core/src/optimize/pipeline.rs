use crate::graph::{GraphDims, Ordering};
use crate::instance::Instance;
use crate::reduce::{prune, split_components, unfold, unfold_components, ReductionMap};

use super::evaluate::{evaluate, ObjectiveBreakdown};
use super::solve::{solve, SolveOptions, SolveReport};
use super::OptimizeError;

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub ordering: Ordering,
    /// Evaluated on the input instance.
    pub breakdown: ObjectiveBreakdown,
    pub core_dims: GraphDims,
    pub components: usize,
    pub nontrivial_components: usize,
    /// Summed over components.
    pub model_dims: (usize, usize),
    pub component_objectives: Vec<i64>,
    pub map: ReductionMap,
    pub nodes: u64,
}

fn solve_all(parts: &[&Instance], opts: &SolveOptions) -> Vec<Result<SolveReport, OptimizeError>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        parts.par_iter().map(|inst| solve(inst, opts)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        parts.iter().map(|inst| solve(inst, opts)).collect()
    }
}

/// Prunes, splits, solves every component and unfolds the result onto the
/// input graph. The evaluated objective of the unfolded ordering must equal
/// the sum of the component objectives.
pub fn optimize_pipeline(inst: &Instance, opts: &SolveOptions) -> Result<PipelineReport, OptimizeError> {
    let mut local;
    let inst = if inst.price_separations == opts.variant.prices_separations() {
        inst
    } else {
        local = inst.clone();
        local.price_separations = opts.variant.prices_separations();
        &local
    };
    let red = prune(inst);
    let parts = split_components(&red.core);
    let refs: Vec<&Instance> = parts.components.iter().map(|c| &c.instance).collect();
    let reports = solve_all(&refs, opts).into_iter().collect::<Result<Vec<_>, _>>()?;
    let orderings: Vec<Ordering> = reports.iter().map(|r| r.ordering.clone()).collect();
    let core_ord = unfold_components(red.core.graph.edges.len(), &parts, &orderings)?;
    let ordering = unfold(&red.map, &core_ord)?;
    let breakdown = evaluate(inst, &ordering)?;
    let component_objectives: Vec<i64> = reports.iter().map(|r| r.breakdown.objective).collect();
    let total: i64 = component_objectives.iter().sum();
    if total != breakdown.objective {
        return Err(OptimizeError::ObjectiveMismatch {
            model: total,
            evaluated: breakdown.objective,
        });
    }
    let model_dims = reports
        .iter()
        .fold((0, 0), |acc, r| (acc.0 + r.model_dims.0, acc.1 + r.model_dims.1));
    Ok(PipelineReport {
        ordering,
        breakdown,
        core_dims: red.core.graph.dims(),
        components: parts.components.len(),
        nontrivial_components: parts.nontrivial(),
        model_dims,
        component_objectives,
        map: red.map,
        nodes: reports.iter().map(|r| r.nodes).sum(),
    })
}
