//! Exact branch-and-bound over per-edge permutations.
//!
//! Every crossing event depends on the relative order of a single line pair
//! on at most two edges, so the crossing cost decomposes into one small
//! binary problem per line pair over that pair's "a before b" bits. Ignoring
//! the coupling between pairs (transitivity of the orders) yields a lower
//! bound: for each pair a tree dynamic program over a spanning forest of its
//! same-continuation links, with unary costs from split events, minimises the
//! pair's cost subject to the bits fixed so far. Links outside the forest and
//! separation events are only counted once fully decided.
//!
//! Edges are completed one at a time in breadth-first order; inside an edge
//! the permutation is built left to right, and placing a line fixes its bits
//! against every line not yet placed.

use std::collections::VecDeque;

use crate::graph::Ordering;
use crate::instance::Instance;

use super::OptimizeError;

const INF: i64 = i64::MAX / 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BnbStats {
    pub nodes: u64,
    pub root_bound: i64,
    pub objective: i64,
}

#[derive(Default)]
struct PairModel {
    /// Edge of each local bit.
    edges: Vec<usize>,
    unary: Vec<[i64; 2]>,
    /// Local bits in post-order (children before parents).
    post: Vec<usize>,
    /// `(parent, rho, w)`: cost `w` when `bit ^ parent_bit == rho`.
    parent: Vec<Option<(usize, bool, i64)>>,
    extra: Vec<(usize, usize, bool, i64)>,
    fixed: Vec<i8>,
}

impl PairModel {
    fn local(&mut self, e: usize) -> usize {
        match self.edges.iter().position(|&x| x == e) {
            Some(i) => i,
            None => {
                self.edges.push(e);
                self.unary.push([0, 0]);
                self.fixed.push(-1);
                self.edges.len() - 1
            }
        }
    }

    fn finish(&mut self, links: Vec<(usize, usize, bool, i64)>) {
        let k = self.edges.len();
        let mut nbr: Vec<Vec<(usize, bool, i64)>> = vec![Vec::new(); k];
        let mut uf: Vec<usize> = (0..k).collect();
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
        for (u, v, rho, w) in links {
            let (ru, rv) = (find(&mut uf, u), find(&mut uf, v));
            if ru == rv {
                self.extra.push((u, v, rho, w));
            } else {
                uf[ru] = rv;
                nbr[u].push((v, rho, w));
                nbr[v].push((u, rho, w));
            }
        }
        self.parent = vec![None; k];
        let mut seen = vec![false; k];
        for root in 0..k {
            if seen[root] {
                continue;
            }
            let mut pre = vec![root];
            seen[root] = true;
            let mut i = 0;
            while i < pre.len() {
                let u = pre[i];
                for &(v, rho, w) in &nbr[u] {
                    if !seen[v] {
                        seen[v] = true;
                        self.parent[v] = Some((u, rho, w));
                        pre.push(v);
                    }
                }
                i += 1;
            }
            self.post.extend(pre.into_iter().rev());
        }
    }

    fn bound(&self, scratch: &mut Vec<[i64; 2]>) -> i64 {
        scratch.clear();
        for i in 0..self.edges.len() {
            let mut c = self.unary[i];
            match self.fixed[i] {
                0 => c[1] = INF,
                1 => c[0] = INF,
                _ => {}
            }
            scratch.push(c);
        }
        let mut total = 0;
        for &u in &self.post {
            let cu = scratch[u];
            match self.parent[u] {
                Some((p, rho, w)) => {
                    for pb in 0..2 {
                        let best = (0..2)
                            .map(|cb| cu[cb] + if ((cb ^ pb) == 1) == rho { w } else { 0 })
                            .min()
                            .unwrap();
                        scratch[p][pb] = (scratch[p][pb] + best).min(INF);
                    }
                }
                None => total += cu[0].min(cu[1]),
            }
        }
        for &(u, v, rho, w) in &self.extra {
            if self.fixed[u] >= 0 && self.fixed[v] >= 0 && ((self.fixed[u] ^ self.fixed[v]) == 1) == rho {
                total += w;
            }
        }
        total
    }
}

/// Separation event between `e` and `f` for a local pair slot on each.
#[derive(Clone, Copy)]
struct SepLink {
    other_edge: usize,
    other_slot: usize,
    w: i64,
}

enum Undo {
    Bit { pair: usize, local: usize, old_lb: i64 },
    Adj { edge: usize, slot: usize, added: i64 },
    Place { edge: usize },
}

struct Search<'a> {
    inst: &'a Instance,
    /// Lines of each edge that are searched over, in ascending order.
    active: Vec<Vec<usize>>,
    /// Lines appended unsearched after the active ones.
    passive: Vec<Vec<usize>>,
    /// Per edge, `n*n` table over active local indices of `(pair, local bit)`
    /// where `slot[i*n+j]` refers to "active[i] before active[j]".
    slot: Vec<Vec<Option<(usize, usize, bool)>>>,
    pairs: Vec<PairModel>,
    pair_lb: Vec<i64>,
    lb: i64,
    /// Separation links per edge and local pair slot `i*n+j` (i < j).
    sep: Vec<Vec<Vec<SepLink>>>,
    adj: Vec<Vec<i8>>,
    cur: Vec<Vec<usize>>,
    order: Vec<usize>,
    trail: Vec<Undo>,
    scratch: Vec<[i64; 2]>,
    best: i64,
    best_ord: Option<Vec<Vec<usize>>>,
    root_bound: i64,
    nodes: u64,
    node_limit: Option<u64>,
    aborted: bool,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, node_limit: Option<u64>) -> Search<'a> {
        let g = &inst.graph;
        let n_edges = g.edges.len();
        let mut involved = vec![Vec::<usize>::new(); n_edges];
        for ev in &inst.same {
            involved[ev.e].extend([ev.a, ev.b]);
            involved[ev.f].extend([ev.a, ev.b]);
        }
        for ev in &inst.split {
            involved[ev.e].extend([ev.a, ev.b]);
        }
        let mut active = Vec::with_capacity(n_edges);
        let mut passive = Vec::with_capacity(n_edges);
        for (e, edge) in g.edges.iter().enumerate() {
            if inst.price_separations && !involved[e].is_empty() {
                active.push(edge.lines.clone());
                passive.push(Vec::new());
            } else {
                let inv = &mut involved[e];
                inv.sort_unstable();
                inv.dedup();
                active.push(inv.clone());
                passive.push(edge.lines.iter().copied().filter(|l| inv.binary_search(l).is_err()).collect());
            }
        }

        // line pair -> pair model index
        let n_lines = g.lines.len();
        let mut pair_id = vec![usize::MAX; n_lines * n_lines];
        let mut pairs: Vec<PairModel> = Vec::new();
        let mut links: Vec<Vec<(usize, usize, bool, i64)>> = Vec::new();
        let mut pid = |a: usize, b: usize, pairs: &mut Vec<PairModel>, links: &mut Vec<Vec<_>>| {
            let k = a * n_lines + b;
            if pair_id[k] == usize::MAX {
                pair_id[k] = pairs.len();
                pairs.push(PairModel::default());
                links.push(Vec::new());
            }
            pair_id[k]
        };
        for ev in &inst.same {
            let p = pid(ev.a, ev.b, &mut pairs, &mut links);
            let u = pairs[p].local(ev.e);
            let v = pairs[p].local(ev.f);
            links[p].push((u, v, ev.rho, ev.cross_w));
        }
        for ev in &inst.split {
            let p = pid(ev.a, ev.b, &mut pairs, &mut links);
            let u = pairs[p].local(ev.e);
            pairs[p].unary[u][ev.target as usize] += ev.w;
        }
        for (pm, l) in pairs.iter_mut().zip(links) {
            pm.finish(l);
        }

        let mut slot = Vec::with_capacity(n_edges);
        let mut sep = Vec::with_capacity(n_edges);
        let mut adj = Vec::with_capacity(n_edges);
        for (e, act) in active.iter().enumerate() {
            let n = act.len();
            let mut s = vec![None; n * n];
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let (a, b) = (act[i].min(act[j]), act[i].max(act[j]));
                    let k = a * n_lines + b;
                    if pair_id[k] == usize::MAX {
                        continue;
                    }
                    let p = pair_id[k];
                    if let Some(li) = pairs[p].edges.iter().position(|&x| x == e) {
                        // bit is "a before b"; act[i] before act[j] sets it iff act[i] == a
                        s[i * n + j] = Some((p, li, act[i] == a));
                    }
                }
            }
            slot.push(s);
            sep.push(vec![Vec::new(); n * n]);
            adj.push(vec![-1i8; n * n]);
        }
        if inst.price_separations {
            let local = |e: usize, l: usize| active[e].binary_search(&l).expect("active line");
            for ev in &inst.same {
                let (ne, nf) = (active[ev.e].len(), active[ev.f].len());
                let se = local(ev.e, ev.a) * ne + local(ev.e, ev.b);
                let sf = local(ev.f, ev.a) * nf + local(ev.f, ev.b);
                sep[ev.e][se].push(SepLink {
                    other_edge: ev.f,
                    other_slot: sf,
                    w: ev.sep_w,
                });
                sep[ev.f][sf].push(SepLink {
                    other_edge: ev.e,
                    other_slot: se,
                    w: ev.sep_w,
                });
            }
        }

        let mut scratch = Vec::new();
        let pair_lb: Vec<i64> = pairs.iter().map(|p| p.bound(&mut scratch)).collect();
        let lb = pair_lb.iter().sum();
        let order = bfs_edge_order(inst, &active);
        Search {
            inst,
            cur: vec![Vec::new(); n_edges],
            active,
            passive,
            slot,
            pairs,
            pair_lb,
            lb,
            sep,
            adj,
            order,
            trail: Vec::new(),
            scratch,
            best: INF,
            best_ord: None,
            root_bound: lb,
            nodes: 0,
            node_limit,
            aborted: false,
        }
    }

    /// Places active line index `c` next on edge `e`.
    fn place(&mut self, e: usize, c: usize) {
        self.trail.push(Undo::Place { edge: e });
        let n = self.active[e].len();
        let placed_mask: u128 = self.cur[e].iter().fold(0, |m, &i| m | (1u128 << i));
        for r in 0..n {
            if r == c || placed_mask & (1u128 << r) != 0 {
                continue;
            }
            if let Some((p, li, val)) = self.slot[e][c * n + r] {
                let pm = &mut self.pairs[p];
                pm.fixed[li] = val as i8;
                let nb = pm.bound(&mut self.scratch);
                let old = self.pair_lb[p];
                self.lb += nb - old;
                self.pair_lb[p] = nb;
                self.trail.push(Undo::Bit {
                    pair: p,
                    local: li,
                    old_lb: old,
                });
            }
        }
        if self.inst.price_separations {
            let k = self.cur[e].len();
            for (pos, &q) in self.cur[e].clone().iter().enumerate() {
                let (i, j) = (q.min(c), q.max(c));
                let s = i * n + j;
                let adjacent = pos + 1 == k;
                self.adj[e][s] = adjacent as i8;
                let mut added = 0;
                for link in &self.sep[e][s] {
                    let other = self.adj[link.other_edge][link.other_slot];
                    if other >= 0 && (other == 1) != adjacent {
                        added += link.w;
                    }
                }
                self.lb += added;
                self.trail.push(Undo::Adj { edge: e, slot: s, added });
            }
        }
        self.cur[e].push(c);
    }

    fn undo_place(&mut self) {
        while let Some(u) = self.trail.pop() {
            match u {
                Undo::Bit { pair, local, old_lb } => {
                    self.pairs[pair].fixed[local] = -1;
                    self.lb += old_lb - self.pair_lb[pair];
                    self.pair_lb[pair] = old_lb;
                }
                Undo::Adj { edge, slot, added } => {
                    self.adj[edge][slot] = -1;
                    self.lb -= added;
                }
                Undo::Place { edge } => {
                    self.cur[edge].pop();
                    return;
                }
            }
        }
    }

    fn rec(&mut self, oi: usize) {
        if self.aborted || self.lb >= self.best {
            return;
        }
        self.nodes += 1;
        if let Some(limit) = self.node_limit {
            if self.nodes > limit {
                self.aborted = true;
                return;
            }
        }
        if oi == self.order.len() {
            self.best = self.lb;
            self.best_ord = Some(self.cur.clone());
            return;
        }
        let e = self.order[oi];
        let n = self.active[e].len();
        if self.cur[e].len() == n {
            self.rec(oi + 1);
            return;
        }
        let placed_mask: u128 = self.cur[e].iter().fold(0, |m, &i| m | (1u128 << i));
        let mut cands: Vec<(i64, usize)> = Vec::with_capacity(n);
        for c in 0..n {
            if placed_mask & (1u128 << c) != 0 {
                continue;
            }
            self.place(e, c);
            cands.push((self.lb, c));
            self.undo_place();
        }
        cands.sort_unstable();
        for (lb, c) in cands {
            if lb >= self.best || self.aborted || self.best == self.root_bound {
                break;
            }
            self.place(e, c);
            self.rec(oi);
            self.undo_place();
        }
    }
}

/// Edges with active lines in breadth-first order over shared nodes,
/// starting from the edge with the most active lines.
fn bfs_edge_order(inst: &Instance, active: &[Vec<usize>]) -> Vec<usize> {
    let g = &inst.graph;
    let adj = g.adjacency();
    let mut seen = vec![false; g.edges.len()];
    let mut order = Vec::new();
    let mut starts: Vec<usize> = (0..g.edges.len()).filter(|&e| active[e].len() > 1).collect();
    starts.sort_by_key(|&e| (std::cmp::Reverse(active[e].len()), e));
    for s in starts {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(e) = q.pop_front() {
            order.push(e);
            let mut next: Vec<usize> = [g.edges[e].a, g.edges[e].b]
                .iter()
                .flat_map(|&v| adj[v].iter().copied())
                .filter(|&f| !seen[f] && active[f].len() > 1)
                .collect();
            next.sort_unstable();
            next.dedup();
            for f in next {
                seen[f] = true;
                q.push_back(f);
            }
        }
    }
    order
}

/// Exact minimum of the instance objective. Returns the ordering, its
/// objective and search statistics.
pub fn branch_and_bound(inst: &Instance, node_limit: Option<u64>) -> Result<(Ordering, BnbStats), OptimizeError> {
    if inst.graph.edges.iter().any(|e| e.lines.len() > 128) {
        return Err(OptimizeError::SolverFailure("more than 128 lines on one edge".into()));
    }
    let mut s = Search::new(inst, node_limit);
    s.rec(0);
    if s.aborted {
        return Err(OptimizeError::SolverFailure(format!("node limit of {} reached", node_limit.unwrap_or(0))));
    }
    let cur = s.best_ord.take().unwrap_or_else(|| s.cur.clone());
    let edges = cur
        .iter()
        .enumerate()
        .map(|(e, idx)| {
            let mut o: Vec<usize> = idx.iter().map(|&i| s.active[e][i]).collect();
            if o.len() < s.active[e].len() {
                // edges never visited by the search (single active line)
                o = s.active[e].clone();
            }
            o.extend(s.passive[e].iter().copied());
            o
        })
        .collect();
    let objective = if s.best == INF { s.lb } else { s.best };
    Ok((
        Ordering { edges },
        BnbStats {
            nodes: s.nodes,
            root_bound: s.root_bound,
            objective,
        },
    ))
}
