use std::collections::BTreeSet;

use crate::instance::Instance;

use super::{IlpModel, ModelKind, Rel, VarRole};

pub fn build(inst: &Instance, kind: ModelKind) -> IlpModel {
    match kind {
        ModelKind::Baseline => build_baseline(inst),
        ModelKind::Improved => build_improved(inst),
        ModelKind::Separation => build_separation(inst),
    }
}

fn edge_lines(inst: &Instance) -> Vec<Vec<usize>> {
    inst.graph.edges.iter().map(|e| e.lines.clone()).collect()
}

/// Explicit position variables; crossings are detected by enumerating every
/// combination of positions that inverts a pair.
pub fn build_baseline(inst: &Instance) -> IlpModel {
    let mut m = IlpModel::new(ModelKind::Baseline, edge_lines(inst));
    for (e, edge) in inst.graph.edges.iter().enumerate() {
        let n = edge.lines.len();
        for &l in &edge.lines {
            for p in 1..=n {
                m.var(VarRole::Pos { e, l, p });
            }
        }
        for &l in &edge.lines {
            let terms = (1..=n).map(|p| (m.var(VarRole::Pos { e, l, p }), 1)).collect();
            m.constrain(format!("line_e{e}_l{l}"), terms, Rel::Eq, 1);
        }
        for p in 1..=n {
            let terms = edge.lines.iter().map(|&l| (m.var(VarRole::Pos { e, l, p }), 1)).collect();
            m.constrain(format!("slot_e{e}_p{p}"), terms, Rel::Eq, 1);
        }
    }
    for ev in &inst.same {
        let c = m.var(VarRole::SameCross {
            v: ev.node,
            e: ev.e,
            f: ev.f,
            a: ev.a,
            b: ev.b,
            rho: ev.rho,
        });
        m.objective.push((c, ev.cross_w));
        let (ne, nf) = (inst.graph.edges[ev.e].lines.len(), inst.graph.edges[ev.f].lines.len());
        for i in 1..=ne {
            for j in (1..=ne).filter(|&j| j != i) {
                for k in 1..=nf {
                    for l in (1..=nf).filter(|&l| l != k) {
                        if ((i < j) ^ (k < l)) != ev.rho {
                            continue;
                        }
                        let terms = vec![
                            (m.var(VarRole::Pos { e: ev.e, l: ev.a, p: i }), 1),
                            (m.var(VarRole::Pos { e: ev.e, l: ev.b, p: j }), 1),
                            (m.var(VarRole::Pos { e: ev.f, l: ev.a, p: k }), 1),
                            (m.var(VarRole::Pos { e: ev.f, l: ev.b, p: l }), 1),
                            (c, -1),
                        ];
                        let name = format!("inv_{}_{i}_{j}_{k}_{l}", m.var_name(c));
                        m.constrain(name, terms, Rel::Le, 3);
                    }
                }
            }
        }
    }
    for ev in &inst.split {
        let s = m.var(VarRole::SplitCross {
            v: ev.node,
            e: ev.e,
            f: ev.f,
            g: ev.g,
            a: ev.a,
            b: ev.b,
            target: ev.target,
        });
        m.objective.push((s, ev.w));
        let ne = inst.graph.edges[ev.e].lines.len();
        for i in 1..=ne {
            for j in (1..=ne).filter(|&j| j != i) {
                if (i < j) != ev.target {
                    continue;
                }
                let terms = vec![
                    (m.var(VarRole::Pos { e: ev.e, l: ev.a, p: i }), 1),
                    (m.var(VarRole::Pos { e: ev.e, l: ev.b, p: j }), 1),
                    (s, -1),
                ];
                let name = format!("inv_{}_{i}_{j}", m.var_name(s));
                m.constrain(name, terms, Rel::Le, 1);
            }
        }
    }
    m
}

/// `(rows, cols)` of the baseline model without building it. The model
/// grows with the fourth power of the line count per continuing edge pair,
/// which makes large instances too big to materialise.
pub fn baseline_dims(inst: &Instance) -> (usize, usize) {
    let n = |e: usize| inst.graph.edges[e].lines.len();
    let mut rows: usize = inst.graph.edges.iter().map(|e| 2 * e.lines.len()).sum();
    let mut cols: usize = inst.graph.edges.iter().map(|e| e.lines.len().pow(2)).sum();
    cols += inst.same.len() + inst.split.len();
    for ev in &inst.same {
        let (ne, nf) = (n(ev.e), n(ev.f));
        rows += ne * (ne - 1) * nf * (nf - 1) / 2;
    }
    for ev in &inst.split {
        let ne = n(ev.e);
        rows += ne * (ne - 1) / 2;
    }
    (rows, cols)
}

/// Sum of the cumulative variables of `l` on `e`, i.e. `n + 1 - pos(l)`.
fn cum_terms(m: &mut IlpModel, e: usize, l: usize, n: usize, sign: i64) -> Vec<(usize, i64)> {
    (1..=n).map(|p| (m.var(VarRole::Cum { e, l, p }), sign)).collect()
}

fn add_assignment(m: &mut IlpModel, inst: &Instance) {
    for (e, edge) in inst.graph.edges.iter().enumerate() {
        let n = edge.lines.len();
        for &l in &edge.lines {
            for p in 1..=n {
                m.var(VarRole::Cum { e, l, p });
            }
        }
        for &l in &edge.lines {
            for p in 1..n {
                let terms = vec![
                    (m.var(VarRole::Cum { e, l, p }), 1),
                    (m.var(VarRole::Cum { e, l, p: p + 1 }), -1),
                ];
                m.constrain(format!("mono_e{e}_l{l}_p{p}"), terms, Rel::Le, 0);
            }
        }
        for p in 1..=n {
            let terms = edge.lines.iter().map(|&l| (m.var(VarRole::Cum { e, l, p }), 1)).collect();
            m.constrain(format!("fill_e{e}_p{p}"), terms, Rel::Eq, p as i64);
        }
    }
}

/// Variable for "`a` before `b` on `e`", declaring the order pair and its
/// linking constraints on first use.
fn order_var(m: &mut IlpModel, inst: &Instance, e: usize, a: usize, b: usize) -> usize {
    let role = VarRole::Order { e, a, b };
    if let Some(i) = m.lookup(&role) {
        return i;
    }
    let n = inst.graph.edges[e].lines.len();
    let big_m = n as i64;
    let ab = m.var(role);
    let ba = m.var(VarRole::Order { e, a: b, b: a });
    for (x, y, before) in [(a, b, ba), (b, a, ab)] {
        // sum(x) - sum(y) = pos(y) - pos(x); negative exactly when y comes first
        let mut terms = cum_terms(m, e, x, n, 1);
        terms.extend(cum_terms(m, e, y, n, -1));
        terms.push((before, big_m));
        let name = format!("cmp_e{e}_l{x}_l{y}");
        m.constrain(name, terms, Rel::Ge, 0);
    }
    let (lo, hi) = (a.min(b), a.max(b));
    m.constrain(format!("excl_e{e}_l{lo}_l{hi}"), vec![(ab, 1), (ba, 1)], Rel::Eq, 1);
    ab
}

fn add_crossings(m: &mut IlpModel, inst: &Instance) {
    for ev in &inst.same {
        let on_e = order_var(m, inst, ev.e, ev.a, ev.b);
        // with rho set the pair crosses when the two order bits differ,
        // otherwise when they agree, i.e. when e's bit differs from "b before a" on f
        let on_f = if ev.rho {
            order_var(m, inst, ev.f, ev.a, ev.b)
        } else {
            order_var(m, inst, ev.f, ev.b, ev.a)
        };
        let c = m.var(VarRole::SameCross {
            v: ev.node,
            e: ev.e,
            f: ev.f,
            a: ev.a,
            b: ev.b,
            rho: ev.rho,
        });
        m.objective.push((c, ev.cross_w));
        let name = m.var_name(c);
        m.constrain(format!("up_{name}"), vec![(on_e, 1), (on_f, -1), (c, -1)], Rel::Le, 0);
        m.constrain(format!("lo_{name}"), vec![(on_e, -1), (on_f, 1), (c, -1)], Rel::Le, 0);
    }
    for ev in &inst.split {
        let wrong = if ev.target {
            order_var(m, inst, ev.e, ev.a, ev.b)
        } else {
            order_var(m, inst, ev.e, ev.b, ev.a)
        };
        let s = m.var(VarRole::SplitCross {
            v: ev.node,
            e: ev.e,
            f: ev.f,
            g: ev.g,
            a: ev.a,
            b: ev.b,
            target: ev.target,
        });
        m.objective.push((s, ev.w));
        let name = m.var_name(s);
        m.constrain(format!("side_{name}"), vec![(wrong, 1), (s, -1)], Rel::Le, 0);
    }
}

/// Cumulative position variables and pairwise order variables.
pub fn build_improved(inst: &Instance) -> IlpModel {
    let mut m = IlpModel::new(ModelKind::Improved, edge_lines(inst));
    add_assignment(&mut m, inst);
    add_crossings(&mut m, inst);
    m
}

/// The improved model plus adjacency variables over all line pairs of every
/// edge that takes part in a continuation, and separation event variables.
pub fn build_separation(inst: &Instance) -> IlpModel {
    let mut m = IlpModel::new(ModelKind::Separation, edge_lines(inst));
    add_assignment(&mut m, inst);
    add_crossings(&mut m, inst);
    let edges: BTreeSet<usize> = inst.same.iter().flat_map(|ev| [ev.e, ev.f]).collect();
    for &e in &edges {
        let lines = inst.graph.edges[e].lines.clone();
        let n = lines.len();
        let big_m = n as i64;
        let mut all = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (lines[i], lines[j]);
                let d = m.var(VarRole::Apart { e, a, b });
                all.push((d, 1));
                for (x, y) in [(a, b), (b, a)] {
                    let mut terms = cum_terms(&mut m, e, x, n, 1);
                    terms.extend(cum_terms(&mut m, e, y, n, -1));
                    terms.push((d, -big_m));
                    m.constrain(format!("gap_e{e}_l{x}_l{y}"), terms, Rel::Le, 1);
                }
            }
        }
        // exactly n - 1 of the C(n, 2) pairs are adjacent
        let cap = (n * (n - 1) / 2) as i64 - (n as i64 - 1);
        m.constrain(format!("adj_e{e}"), all, Rel::Le, cap);
    }
    for ev in &inst.same {
        let de = m.lookup(&VarRole::Apart { e: ev.e, a: ev.a, b: ev.b }).expect("apart var");
        let df = m.lookup(&VarRole::Apart { e: ev.f, a: ev.a, b: ev.b }).expect("apart var");
        let q = m.var(VarRole::SepEvent {
            v: ev.node,
            e: ev.e,
            f: ev.f,
            a: ev.a,
            b: ev.b,
        });
        m.objective.push((q, ev.sep_w));
        let name = m.var_name(q);
        m.constrain(format!("up_{name}"), vec![(de, 1), (df, -1), (q, -1)], Rel::Le, 0);
        m.constrain(format!("lo_{name}"), vec![(de, -1), (df, 1), (q, -1)], Rel::Le, 0);
    }
    m
}
