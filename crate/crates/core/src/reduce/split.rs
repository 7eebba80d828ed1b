use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::{Edge, LineGraph, Node, NodeKind};
use crate::instance::{Instance, SameEvent, SplitEvent};

/// An independent part of a core instance. `edge_map[i]` is the core edge
/// that component edge `i` was cut or detached from.
#[derive(Debug, Clone)]
pub struct Component {
    pub instance: Instance,
    pub edge_map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum SplitAction {
    /// A single-line edge cut at its midpoint.
    EdgeCut { edge: usize },
    /// The end of `edge` at `node` moved to a fresh dangling node because
    /// all of the edge's lines terminate there.
    TerminusDetach { edge: usize, node: usize },
}

#[derive(Debug, Clone)]
pub struct Splitting {
    pub components: Vec<Component>,
    pub actions: Vec<SplitAction>,
}

impl Splitting {
    /// Components with at least one crossing or separation event.
    pub fn nontrivial(&self) -> usize {
        self.components.iter().filter(|c| !c.instance.is_trivial()).count()
    }
}

#[derive(Clone, Copy)]
struct Piece {
    edge: usize,
    /// 0 for an uncut edge, 1 and 2 for the halves at `a` and `b`.
    half: u8,
    /// Attached endpoints, `None` where the piece dangles.
    ends: [Option<usize>; 2],
}

fn find(uf: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while uf[r] != r {
        r = uf[r];
    }
    let mut c = x;
    while uf[c] != r {
        let n = uf[c];
        uf[c] = r;
        c = n;
    }
    r
}

/// Splits a pruned instance into ordering-relevant connected components.
pub fn split_components(core: &Instance) -> Splitting {
    let g = &core.graph;
    let adj = g.adjacency();
    let terminates_all = |e: usize, x: usize| {
        g.edges[e]
            .lines
            .iter()
            .all(|&l| adj[x].iter().filter(|&&f| g.edges[f].has_line(l)).count() == 1)
    };
    let mut actions = Vec::new();
    let mut pieces: Vec<Piece> = Vec::new();
    // piece holding the end of edge e at node v
    let mut piece_at: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (e, edge) in g.edges.iter().enumerate() {
        let ends = [edge.a, edge.b];
        let loop_edge = edge.a == edge.b;
        let mut attached = [Some(edge.a), Some(edge.b)];
        for (k, &x) in ends.iter().enumerate() {
            if !loop_edge && adj[x].len() > 1 && terminates_all(e, x) {
                attached[k] = None;
                actions.push(SplitAction::TerminusDetach { edge: e, node: x });
            }
        }
        if edge.lines.len() == 1 && !loop_edge {
            actions.push(SplitAction::EdgeCut { edge: e });
            for k in 0..2 {
                if let Some(x) = attached[k] {
                    piece_at.insert((e, x), pieces.len());
                }
                let mut ends = [None, None];
                ends[k] = attached[k];
                pieces.push(Piece {
                    edge: e,
                    half: k as u8 + 1,
                    ends,
                });
            }
        } else {
            for x in attached.iter().flatten() {
                piece_at.insert((e, *x), pieces.len());
            }
            pieces.push(Piece {
                edge: e,
                half: 0,
                ends: attached,
            });
        }
    }

    let n_nodes = g.nodes.len();
    let mut uf: Vec<usize> = (0..n_nodes + pieces.len()).collect();
    for (i, p) in pieces.iter().enumerate() {
        for x in p.ends.iter().flatten() {
            let (r1, r2) = (find(&mut uf, n_nodes + i), find(&mut uf, *x));
            uf[r1] = r2;
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut order: Vec<usize> = Vec::new();
    for i in 0..pieces.len() {
        let r = find(&mut uf, n_nodes + i);
        if !groups.contains_key(&r) {
            order.push(r);
        }
        groups.entry(r).or_default().push(i);
    }

    let mut comp_of_piece = vec![(0usize, 0usize); pieces.len()];
    let mut comps: Vec<(LineGraph, Vec<crate::instance::NodeWeights>, Vec<usize>, BTreeMap<usize, usize>)> = Vec::new();
    for r in order {
        let members = &groups[&r];
        let mut nodes: Vec<Node> = Vec::new();
        let mut weights = Vec::new();
        let mut node_map: BTreeMap<usize, usize> = BTreeMap::new();
        let mut edges = Vec::new();
        let mut edge_map = Vec::new();
        let ci = comps.len();
        for &pi in members {
            let p = pieces[pi];
            let edge = &g.edges[p.edge];
            let len = edge.path.length();
            let (path, ids) = match p.half {
                0 => (edge.path.clone(), edge.id.clone()),
                1 => (edge.path.sub_dist(0.0, len / 2.0).expect("half of a valid path"), format!("{}#1", edge.id)),
                _ => (edge.path.sub_dist(len / 2.0, len).expect("half of a valid path"), format!("{}#2", edge.id)),
            };
            let mut local = [0usize; 2];
            for k in 0..2 {
                let orig = [edge.a, edge.b][k];
                local[k] = match p.ends[k] {
                    Some(x) => *node_map.entry(x).or_insert_with(|| {
                        nodes.push(g.nodes[x].clone());
                        weights.push(core.weights[x]);
                        nodes.len() - 1
                    }),
                    None => {
                        let pos = if k == 0 { path.first() } else { path.last() };
                        nodes.push(Node {
                            id: format!("{}#{}", ids, ["a", "b"][k]),
                            kind: NodeKind::Auxiliary,
                            pos,
                        });
                        weights.push(core.weights[orig]);
                        nodes.len() - 1
                    }
                };
            }
            comp_of_piece[pi] = (ci, edges.len());
            edges.push(Edge {
                id: ids,
                a: local[0],
                b: local[1],
                lines: edge.lines.clone(),
                path,
            });
            edge_map.push(p.edge);
        }
        let graph = LineGraph {
            nodes,
            edges,
            lines: g.lines.clone(),
        };
        comps.push((graph, weights, edge_map, node_map));
    }

    let mut same: Vec<Vec<SameEvent>> = vec![Vec::new(); comps.len()];
    let mut split: Vec<Vec<SplitEvent>> = vec![Vec::new(); comps.len()];
    let locate = |e: usize, v: usize| comp_of_piece[piece_at[&(e, v)]];
    for ev in &core.same {
        let (c, e) = locate(ev.e, ev.node);
        let (c2, f) = locate(ev.f, ev.node);
        debug_assert_eq!(c, c2);
        same[c].push(SameEvent {
            node: comps[c].3[&ev.node],
            e: e.min(f),
            f: e.max(f),
            ..*ev
        });
    }
    for ev in &core.split {
        let (c, e) = locate(ev.e, ev.node);
        let (_, f) = locate(ev.f, ev.node);
        let (_, gg) = locate(ev.g, ev.node);
        split[c].push(SplitEvent {
            node: comps[c].3[&ev.node],
            e,
            f,
            g: gg,
            ..*ev
        });
    }
    let components = comps
        .into_iter()
        .zip(same.into_iter().zip(split))
        .map(|((graph, weights, edge_map, _), (s, sp))| Component {
            instance: Instance::from_events(graph, weights, core.line_mult.clone(), core.price_separations, s, sp),
            edge_map,
        })
        .collect();
    Splitting { components, actions }
}
