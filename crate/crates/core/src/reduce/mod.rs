//! Instance reductions that preserve the optimum, and the transfer of
//! solutions back onto the original graph.
//!
//! Pruning works on the events of an [`Instance`] rather than on geometry:
//! contracted chains, collapsed bundles and removed terminus edges rewrite
//! the event lists directly, so the reduced instance prices every ordering
//! exactly like the original one prices the ordering it unfolds to.
//!
//! * Chain contraction: a degree-2 node `v` between `e = {u, v}` and
//!   `e' = {v, w}` with `L(e) = L(e')` is removed and the two edges merged.
//!   It is applied only when the crossings moved off `v` can be absorbed at
//!   a neighbour `x` that does not branch any line of the dropped edge and
//!   whose weights do not exceed those of `v`.
//! * Bundle collapse: lines with identical edge sets become one line whose
//!   multiplicity is the sum of the members'. It is applied only when none of
//!   the members branches, the members can be oriented consistently on all
//!   their edges, and separations are not priced.
//! * Terminus edge removal: an edge all of whose lines end at both endpoints
//!   takes part in no event and is dropped.
//!
//! Splitting then cuts single-line edges at their midpoint and detaches edge
//! ends at nodes where all of the edge's lines terminate; the connected
//! pieces are independent instances.

mod prune;
mod split;
mod unfold;

pub use prune::{prune, rule1_applicable, Reduction};
pub use split::{split_components, Component, SplitAction, Splitting};
pub use unfold::{unfold, unfold_components};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReduceError {
    #[error("no ordering for component {component}")]
    IncompleteSolution { component: usize },
    #[error("ordering does not match the reduced graph: {0}")]
    Mismatch(String),
}

/// One reversible pruning step. Edge and line numbers index
/// [`ReductionMap::edge_ids`] and [`ReductionMap::line_ids`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    /// `e` and `e2` were merged into `merged`, oriented from the far end of
    /// `e` to the far end of `e2`. The flags tell whether `e` and `e2` are
    /// stored against that direction.
    ChainContraction {
        node: String,
        e: usize,
        e2: usize,
        merged: usize,
        e_reversed: bool,
        e2_reversed: bool,
    },
    /// `members` (in their fixed order) now travel as `line`; on the edges in
    /// `reversed_on` the order is reversed relative to the edge direction.
    BundleCollapse {
        line: usize,
        members: Vec<usize>,
        edges: Vec<usize>,
        reversed_on: Vec<usize>,
    },
    TerminusEdgeRemoval { edge: usize, lines: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReductionMap {
    /// Edges of the original graph come first, merged edges follow.
    pub edge_ids: Vec<String>,
    pub original_edges: usize,
    pub line_ids: Vec<String>,
    pub actions: Vec<Action>,
    /// Core edge index to edge number.
    pub core_edges: Vec<usize>,
    /// Core line index to line number.
    pub core_lines: Vec<usize>,
}

impl ReductionMap {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reduction map serializes") + "\n"
    }

    pub fn is_identity(&self) -> bool {
        self.actions.is_empty()
    }
}
