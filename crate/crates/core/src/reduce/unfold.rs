use crate::graph::Ordering;

use super::{Action, ReduceError, ReductionMap, Splitting};

/// Assembles per-component orderings into an ordering of the core graph.
/// Both halves of a cut edge carry the same single line, so either may be
/// used.
pub fn unfold_components(core_edges: usize, split: &Splitting, orderings: &[Ordering]) -> Result<Ordering, ReduceError> {
    if orderings.len() < split.components.len() {
        return Err(ReduceError::IncompleteSolution {
            component: orderings.len(),
        });
    }
    let mut edges: Vec<Option<Vec<usize>>> = vec![None; core_edges];
    for (ci, (comp, ord)) in split.components.iter().zip(orderings).enumerate() {
        if ord.edges.len() != comp.edge_map.len() {
            return Err(ReduceError::IncompleteSolution { component: ci });
        }
        for (o, &e) in ord.edges.iter().zip(&comp.edge_map) {
            edges[e] = Some(o.clone());
        }
    }
    let edges = edges
        .into_iter()
        .enumerate()
        .map(|(e, o)| o.ok_or_else(|| ReduceError::Mismatch(format!("core edge {e} is in no component"))))
        .collect::<Result<_, _>>()?;
    Ok(Ordering { edges })
}

/// Replays the pruning actions backwards to turn an ordering of the core
/// graph into one of the original graph.
pub fn unfold(map: &ReductionMap, core: &Ordering) -> Result<Ordering, ReduceError> {
    if core.edges.len() != map.core_edges.len() {
        return Err(ReduceError::Mismatch(format!(
            "{} edge orderings for {} core edges",
            core.edges.len(),
            map.core_edges.len()
        )));
    }
    let missing = |e: usize| ReduceError::Mismatch(format!("no ordering for edge {}", map.edge_ids[e]));
    let mut ord: Vec<Option<Vec<usize>>> = vec![None; map.edge_ids.len()];
    for (o, &e) in core.edges.iter().zip(&map.core_edges) {
        let lines = o
            .iter()
            .map(|&l| map.core_lines.get(l).copied().ok_or_else(|| ReduceError::Mismatch(format!("unknown core line {l}"))))
            .collect::<Result<_, _>>()?;
        ord[e] = Some(lines);
    }
    for action in map.actions.iter().rev() {
        match action {
            Action::ChainContraction {
                e,
                e2,
                merged,
                e_reversed,
                e2_reversed,
                ..
            } => {
                let o = ord[*merged].clone().ok_or_else(|| missing(*merged))?;
                let oriented = |rev: bool| {
                    let mut x = o.clone();
                    if rev {
                        x.reverse();
                    }
                    x
                };
                ord[*e] = Some(oriented(*e_reversed));
                ord[*e2] = Some(oriented(*e2_reversed));
            }
            Action::BundleCollapse {
                line,
                members,
                edges,
                reversed_on,
            } => {
                for &e in edges {
                    let o = ord[e].as_mut().ok_or_else(|| missing(e))?;
                    let p = o
                        .iter()
                        .position(|l| l == line)
                        .ok_or_else(|| ReduceError::Mismatch(format!("collapsed line missing on edge {}", map.edge_ids[e])))?;
                    let mut block = members.clone();
                    if reversed_on.contains(&e) {
                        block.reverse();
                    }
                    o.splice(p..=p, block);
                }
            }
            Action::TerminusEdgeRemoval { edge, lines } => {
                let mut o = lines.clone();
                o.sort_by(|&x, &y| map.line_ids[x].cmp(&map.line_ids[y]));
                ord[*edge] = Some(o);
            }
        }
    }
    let edges = ord
        .into_iter()
        .take(map.original_edges)
        .enumerate()
        .map(|(e, o)| o.ok_or_else(|| missing(e)))
        .collect::<Result<_, _>>()?;
    Ok(Ordering { edges })
}
