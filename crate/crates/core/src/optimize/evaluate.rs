use serde::Serialize;

use crate::graph::Ordering;
use crate::instance::Instance;

use super::OptimizeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    SameCrossing,
    SplitCrossing,
    Separation,
}

/// One realised event. `edges` holds `(e, f)` for same-edge crossings and
/// separations and `(e, f, g)` for split crossings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventHit {
    pub kind: EventKind,
    pub node: usize,
    pub edges: Vec<usize>,
    pub lines: (usize, usize),
    pub weight: i64,
    /// Number of original line pairs involved (product of multiplicities).
    pub count: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ObjectiveBreakdown {
    pub events: Vec<EventHit>,
    pub crossings: i64,
    pub separations: i64,
    pub crossing_cost: i64,
    pub separation_cost: i64,
    /// Crossing cost plus separation cost when separations are priced.
    pub objective: i64,
}

impl ObjectiveBreakdown {
    pub fn of_kind(&self, kind: EventKind) -> impl Iterator<Item = &EventHit> {
        self.events.iter().filter(move |h| h.kind == kind)
    }

    /// Number of crossings (weighted by multiplicity) at node `v`.
    pub fn crossings_at(&self, v: usize) -> i64 {
        self.events
            .iter()
            .filter(|h| h.node == v && h.kind != EventKind::Separation)
            .map(|h| h.count)
            .sum()
    }
}

/// 1-based positions per edge, indexed by line; 0 marks absent lines.
pub(crate) fn position_table(inst: &Instance, o: &Ordering) -> Vec<Vec<u32>> {
    let n = inst.graph.lines.len();
    o.edges
        .iter()
        .map(|ord| {
            let mut p = vec![0u32; n];
            for (i, &l) in ord.iter().enumerate() {
                p[l] = i as u32 + 1;
            }
            p
        })
        .collect()
}

/// Full breakdown of `o` under the instance's events and weights.
pub fn evaluate(inst: &Instance, o: &Ordering) -> Result<ObjectiveBreakdown, OptimizeError> {
    o.validate(&inst.graph)?;
    let pos = position_table(inst, o);
    let mut out = ObjectiveBreakdown::default();
    for ev in &inst.same {
        let (pe, pf) = (&pos[ev.e], &pos[ev.f]);
        let before_e = pe[ev.a] < pe[ev.b];
        let before_f = pf[ev.a] < pf[ev.b];
        if (before_e ^ before_f) == ev.rho {
            out.events.push(EventHit {
                kind: EventKind::SameCrossing,
                node: ev.node,
                edges: vec![ev.e, ev.f],
                lines: (ev.a, ev.b),
                weight: ev.cross_w,
                count: ev.mult,
            });
        }
        let adj_e = pe[ev.a].abs_diff(pe[ev.b]) == 1;
        let adj_f = pf[ev.a].abs_diff(pf[ev.b]) == 1;
        if adj_e != adj_f {
            out.events.push(EventHit {
                kind: EventKind::Separation,
                node: ev.node,
                edges: vec![ev.e, ev.f],
                lines: (ev.a, ev.b),
                weight: ev.sep_w,
                count: ev.mult,
            });
        }
    }
    for ev in &inst.split {
        let pe = &pos[ev.e];
        if (pe[ev.a] < pe[ev.b]) == ev.target {
            out.events.push(EventHit {
                kind: EventKind::SplitCrossing,
                node: ev.node,
                edges: vec![ev.e, ev.f, ev.g],
                lines: (ev.a, ev.b),
                weight: ev.w,
                count: ev.mult,
            });
        }
    }
    out.events
        .sort_by(|x, y| (x.node, x.kind, &x.edges, x.lines).cmp(&(y.node, y.kind, &y.edges, y.lines)));
    for h in &out.events {
        if h.kind == EventKind::Separation {
            out.separations += h.count;
            out.separation_cost += h.weight;
        } else {
            out.crossings += h.count;
            out.crossing_cost += h.weight;
        }
    }
    out.objective = out.crossing_cost + if inst.price_separations { out.separation_cost } else { 0 };
    Ok(out)
}

/// Objective only, over a precomputed position table.
pub(crate) fn objective_of(inst: &Instance, pos: &[Vec<u32>]) -> i64 {
    let mut total = 0;
    for ev in &inst.same {
        let (pe, pf) = (&pos[ev.e], &pos[ev.f]);
        if ((pe[ev.a] < pe[ev.b]) ^ (pf[ev.a] < pf[ev.b])) == ev.rho {
            total += ev.cross_w;
        }
        if inst.price_separations && ((pe[ev.a].abs_diff(pe[ev.b]) == 1) != (pf[ev.a].abs_diff(pf[ev.b]) == 1)) {
            total += ev.sep_w;
        }
    }
    for ev in &inst.split {
        let pe = &pos[ev.e];
        if (pe[ev.a] < pe[ev.b]) == ev.target {
            total += ev.w;
        }
    }
    total
}
