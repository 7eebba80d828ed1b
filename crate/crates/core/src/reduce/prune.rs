use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::graph::{Edge, LineGraph};
use crate::instance::{Instance, NodeWeights, SameEvent, SplitEvent};

use super::{Action, ReductionMap};

/// A pruned instance and the map that unfolds its orderings.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub core: Instance,
    pub map: ReductionMap,
}

fn carriers(g: &LineGraph, adj: &[Vec<usize>], x: usize, l: usize) -> usize {
    adj[x].iter().filter(|&&e| g.edges[e].has_line(l)).count()
}

/// Whether crossings of `edge` moved off `v` can be absorbed at `x`: no line
/// of `edge` branches at `x` and, if at least two of its lines continue
/// there, `x` is never more expensive than `v`.
fn absorbs(g: &LineGraph, adj: &[Vec<usize>], w: &[NodeWeights], v: usize, x: usize, edge: usize) -> bool {
    let counts: Vec<usize> = g.edges[edge].lines.iter().map(|&l| carriers(g, adj, x, l)).collect();
    if counts.iter().any(|&c| c > 2) {
        return false;
    }
    counts.iter().filter(|&&c| c == 2).count() < 2 || (w[x].same.max(w[x].split) <= w[v].same && w[x].sep <= w[v].sep)
}

/// `(kept, dropped)` edges if the chain rule contracts `v`.
fn chain_side(g: &LineGraph, adj: &[Vec<usize>], w: &[NodeWeights], v: usize) -> Option<(usize, usize)> {
    let [e, f] = adj[v][..] else {
        return None;
    };
    let (u, x) = (g.edges[e].other(v), g.edges[f].other(v));
    if e == f || u == x || u == v || x == v || g.edges[e].lines != g.edges[f].lines {
        return None;
    }
    if absorbs(g, adj, w, v, x, f) {
        Some((e, f))
    } else if absorbs(g, adj, w, v, u, e) {
        Some((f, e))
    } else {
        None
    }
}

/// Whether the chain rule contracts node `v` of `inst`: `v` has degree 2,
/// both edges carry the same lines, and one neighbour can absorb the moved
/// crossings.
pub fn rule1_applicable(inst: &Instance, v: usize) -> bool {
    let adj = inst.graph.adjacency();
    chain_side(&inst.graph, &adj, &inst.weights, v).is_some()
}

struct Work {
    g: LineGraph,
    adj: Vec<Vec<usize>>,
    edge_alive: Vec<bool>,
    w: Vec<NodeWeights>,
    mult: Vec<u32>,
    same: Vec<SameEvent>,
    split: Vec<SplitEvent>,
    price: bool,
    actions: Vec<Action>,
    /// Member line numbers of collapsed lines.
    bundles: HashMap<usize, Vec<usize>>,
}

impl Work {
    fn rev(&self, e: usize, v: usize) -> bool {
        self.g.edges[e].a == v
    }

    fn remove_terminus_edges(&mut self) -> bool {
        let mut changed = false;
        for e in 0..self.g.edges.len() {
            if !self.edge_alive[e] {
                continue;
            }
            let edge = &self.g.edges[e];
            if edge.a == edge.b {
                continue;
            }
            let ends = [edge.a, edge.b];
            let terminal = ends
                .iter()
                .all(|&x| edge.lines.iter().all(|&l| carriers(&self.g, &self.adj, x, l) == 1));
            if !terminal {
                continue;
            }
            debug_assert!(!self.same.iter().any(|ev| ev.e == e || ev.f == e));
            debug_assert!(!self.split.iter().any(|ev| ev.e == e || ev.f == e || ev.g == e));
            self.edge_alive[e] = false;
            for x in ends {
                self.adj[x].retain(|&y| y != e);
            }
            self.actions.push(Action::TerminusEdgeRemoval {
                edge: e,
                lines: self.g.edges[e].lines.clone(),
            });
            changed = true;
        }
        changed
    }

    /// Relative member orientation per edge, or `None` if the members would
    /// have to cross somewhere.
    fn bundle_colors(&self, edges: &[usize], a: usize, b: usize) -> Option<BTreeMap<usize, bool>> {
        let mut links: HashMap<usize, Vec<(usize, bool)>> = HashMap::new();
        for ev in self.same.iter().filter(|ev| ev.a == a && ev.b == b) {
            // no crossing: orientations differ exactly when rho is unset
            links.entry(ev.e).or_default().push((ev.f, !ev.rho));
            links.entry(ev.f).or_default().push((ev.e, !ev.rho));
        }
        let mut color: BTreeMap<usize, bool> = BTreeMap::new();
        for &root in edges {
            if color.contains_key(&root) {
                continue;
            }
            color.insert(root, false);
            let mut q = VecDeque::from([root]);
            while let Some(e) = q.pop_front() {
                let ce = color[&e];
                for &(f, differ) in links.get(&e).map(Vec::as_slice).unwrap_or(&[]) {
                    match color.get(&f) {
                        Some(&cf) if cf != (ce ^ differ) => return None,
                        Some(_) => {}
                        None => {
                            color.insert(f, ce ^ differ);
                            q.push_back(f);
                        }
                    }
                }
            }
        }
        Some(color)
    }

    fn collapse_bundles(&mut self) -> bool {
        let mut sets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (e, edge) in self.g.edges.iter().enumerate() {
            if self.edge_alive[e] {
                for &l in &edge.lines {
                    sets.entry(l).or_default().push(e);
                }
            }
        }
        let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (l, es) in sets {
            groups.entry(es).or_default().push(l);
        }
        let mut changed = false;
        for (edges, group) in groups {
            if group.len() < 2 {
                continue;
            }
            let branches = edges.iter().any(|&e| {
                let edge = &self.g.edges[e];
                [edge.a, edge.b].iter().any(|&x| carriers(&self.g, &self.adj, x, group[0]) > 2)
            });
            if branches {
                continue;
            }
            let Some(color) = self.bundle_colors(&edges, group[0], group[1]) else {
                continue;
            };
            let rep = group[0];
            let others = &group[1..];
            let old = self.mult[rep] as i64;
            let new: i64 = group.iter().map(|&l| self.mult[l] as i64).sum();
            for &l in others {
                self.mult[l] = 0;
            }
            self.mult[rep] = new as u32;
            let involved = |x: usize| others.contains(&x);
            self.same.retain(|ev| !involved(ev.a) && !involved(ev.b));
            self.split.retain(|ev| !involved(ev.a) && !involved(ev.b));
            let scale = |x: i64| x / old * new;
            for ev in self.same.iter_mut().filter(|ev| ev.a == rep || ev.b == rep) {
                ev.cross_w = scale(ev.cross_w);
                ev.sep_w = scale(ev.sep_w);
                ev.mult = scale(ev.mult);
            }
            for ev in self.split.iter_mut().filter(|ev| ev.a == rep || ev.b == rep) {
                ev.w = scale(ev.w);
                ev.mult = scale(ev.mult);
            }
            for &e in &edges {
                self.g.edges[e].lines.retain(|l| !others.contains(l));
            }
            let mut flat: Vec<usize> = group
                .iter()
                .flat_map(|l| self.bundles.remove(l).unwrap_or_else(|| vec![*l]))
                .collect();
            flat.sort_by(|&x, &y| self.g.lines[x].id.cmp(&self.g.lines[y].id));
            self.bundles.insert(rep, flat);
            let mut members = group.clone();
            members.sort_by(|&x, &y| self.g.lines[x].id.cmp(&self.g.lines[y].id));
            self.actions.push(Action::BundleCollapse {
                line: rep,
                members,
                edges: edges.clone(),
                reversed_on: color.iter().filter(|(_, &c)| c).map(|(&e, _)| e).collect(),
            });
            changed = true;
        }
        changed
    }

    fn contract(&mut self, v: usize, keep: usize, drop: usize) {
        let (u, x) = (self.g.edges[keep].other(v), self.g.edges[drop].other(v));
        let e_reversed = self.g.edges[keep].a != u;
        let e2_reversed = self.g.edges[drop].a != v;
        let p1 = if e_reversed {
            self.g.edges[keep].path.reversed()
        } else {
            self.g.edges[keep].path.clone()
        };
        let p2 = if e2_reversed {
            self.g.edges[drop].path.reversed()
        } else {
            self.g.edges[drop].path.clone()
        };
        let path = p1.concat(&p2).expect("joined chain is a valid polyline");
        let m = self.g.edges.len();
        self.g.edges.push(Edge {
            id: format!("{}+{}", self.g.edges[keep].id, self.g.edges[drop].id),
            a: u,
            b: x,
            lines: self.g.edges[keep].lines.clone(),
            path,
        });
        self.edge_alive.push(true);
        self.edge_alive[keep] = false;
        self.edge_alive[drop] = false;
        for y in &mut self.adj[u] {
            if *y == keep {
                *y = m;
            }
        }
        for y in &mut self.adj[x] {
            if *y == drop {
                *y = m;
            }
        }
        self.adj[v].clear();

        self.same.retain(|ev| ev.node != v);
        self.split.retain(|ev| ev.node != v);
        let sub = |e: usize| if e == keep || e == drop { m } else { e };
        let mut same = std::mem::take(&mut self.same);
        for ev in &mut same {
            let (e, f) = (sub(ev.e), sub(ev.f));
            if (e, f) != (ev.e, ev.f) {
                ev.e = e.min(f);
                ev.f = e.max(f);
                ev.rho = self.rev(ev.e, ev.node) ^ self.rev(ev.f, ev.node);
            }
        }
        self.same = same;
        let mut split = std::mem::take(&mut self.split);
        for ev in &mut split {
            let e = sub(ev.e);
            if e != ev.e {
                ev.target ^= self.rev(ev.e, ev.node) ^ self.rev(e, ev.node);
                ev.e = e;
            }
            ev.f = sub(ev.f);
            ev.g = sub(ev.g);
        }
        self.split = split;
        self.actions.push(Action::ChainContraction {
            node: self.g.nodes[v].id.clone(),
            e: keep,
            e2: drop,
            merged: m,
            e_reversed,
            e2_reversed,
        });
    }

    fn contract_chains(&mut self) -> bool {
        let mut changed = false;
        for v in 0..self.g.nodes.len() {
            if let Some((keep, drop)) = chain_side(&self.g, &self.adj, &self.w, v) {
                self.contract(v, keep, drop);
                changed = true;
            }
        }
        changed
    }

    fn finish(self, original_edges: usize, line_ids: Vec<String>) -> Reduction {
        let core_edges: Vec<usize> = (0..self.g.edges.len()).filter(|&e| self.edge_alive[e]).collect();
        let mut node_map = vec![usize::MAX; self.g.nodes.len()];
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for v in 0..self.g.nodes.len() {
            if !self.adj[v].is_empty() {
                node_map[v] = nodes.len();
                nodes.push(self.g.nodes[v].clone());
                weights.push(self.w[v]);
            }
        }
        let mut used = vec![false; self.g.lines.len()];
        for &e in &core_edges {
            for &l in &self.g.edges[e].lines {
                used[l] = true;
            }
        }
        let core_lines: Vec<usize> = (0..used.len()).filter(|&l| used[l]).collect();
        let mut line_map = vec![usize::MAX; used.len()];
        for (i, &l) in core_lines.iter().enumerate() {
            line_map[l] = i;
        }
        let mut edge_map = vec![usize::MAX; self.g.edges.len()];
        for (i, &e) in core_edges.iter().enumerate() {
            edge_map[e] = i;
        }
        let lines = core_lines
            .iter()
            .map(|&l| {
                let mut tl = self.g.lines[l].clone();
                if let Some(members) = self.bundles.get(&l) {
                    tl.id = members.iter().map(|&m| self.g.lines[m].id.as_str()).collect::<Vec<_>>().join("+");
                    tl.label = members.iter().map(|&m| self.g.lines[m].label.as_str()).collect::<Vec<_>>().join("+");
                }
                tl
            })
            .collect();
        let edges = core_edges
            .iter()
            .map(|&e| {
                let ed = &self.g.edges[e];
                Edge {
                    id: ed.id.clone(),
                    a: node_map[ed.a],
                    b: node_map[ed.b],
                    lines: ed.lines.iter().map(|&l| line_map[l]).collect(),
                    path: ed.path.clone(),
                }
            })
            .collect();
        let same = self
            .same
            .iter()
            .map(|ev| SameEvent {
                node: node_map[ev.node],
                e: edge_map[ev.e],
                f: edge_map[ev.f],
                a: line_map[ev.a],
                b: line_map[ev.b],
                ..*ev
            })
            .collect();
        let split = self
            .split
            .iter()
            .map(|ev| SplitEvent {
                node: node_map[ev.node],
                e: edge_map[ev.e],
                f: edge_map[ev.f],
                g: edge_map[ev.g],
                a: line_map[ev.a],
                b: line_map[ev.b],
                ..*ev
            })
            .collect();
        let mult = core_lines.iter().map(|&l| self.mult[l]).collect();
        let graph = LineGraph { nodes, edges, lines };
        let core = Instance::from_events(graph, weights, mult, self.price, same, split);
        let map = ReductionMap {
            edge_ids: self.g.edges.iter().map(|e| e.id.clone()).collect(),
            original_edges,
            line_ids,
            actions: self.actions,
            core_edges,
            core_lines,
        };
        Reduction { core, map }
    }
}

/// Applies the pruning rules to a fixed point. Bundles are only collapsed
/// when the instance does not price separations.
pub fn prune(inst: &Instance) -> Reduction {
    let adj = inst.graph.adjacency();
    let mut w = Work {
        g: inst.graph.clone(),
        adj,
        edge_alive: vec![true; inst.graph.edges.len()],
        w: inst.weights.clone(),
        mult: inst.line_mult.clone(),
        same: inst.same.clone(),
        split: inst.split.clone(),
        price: inst.price_separations,
        actions: Vec::new(),
        bundles: HashMap::new(),
    };
    loop {
        let mut changed = w.remove_terminus_edges();
        if !w.price {
            changed |= w.collapse_bundles();
        }
        changed |= w.contract_chains();
        if !changed {
            break;
        }
    }
    let line_ids = inst.graph.lines.iter().map(|l| l.id.clone()).collect();
    w.finish(inst.graph.edges.len(), line_ids)
}
