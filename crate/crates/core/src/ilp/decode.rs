use std::collections::HashMap;

use crate::graph::Ordering;

use super::{IlpError, IlpModel, VarRole};

/// Values of a model's variables, indexed like `IlpModel::vars`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub values: Vec<f64>,
}

impl Assignment {
    /// Builds an assignment from named values; missing variables are 0.
    pub fn from_names(m: &IlpModel, named: &HashMap<String, f64>) -> Assignment {
        Assignment {
            values: m.vars.iter().map(|r| named.get(&r.name()).copied().unwrap_or(0.0)).collect(),
        }
    }

    pub fn bit(&self, i: usize) -> bool {
        self.values[i] > 0.5
    }

    fn int(&self, i: usize) -> i64 {
        self.values[i].round() as i64
    }

    /// The 0/1 assignment encoding `o`, with every auxiliary variable at the
    /// smallest value its constraints allow.
    pub fn encode(m: &IlpModel, o: &Ordering) -> Assignment {
        let n_lines = m.edge_lines.iter().flatten().copied().max().map_or(0, |x| x + 1);
        let pos: Vec<Vec<usize>> = o
            .edges
            .iter()
            .map(|ord| {
                let mut p = vec![0; n_lines];
                for (i, &l) in ord.iter().enumerate() {
                    p[l] = i + 1;
                }
                p
            })
            .collect();
        let before = |e: usize, a: usize, b: usize| pos[e][a] < pos[e][b];
        let apart = |e: usize, a: usize, b: usize| pos[e][a].abs_diff(pos[e][b]) != 1;
        let values = m
            .vars
            .iter()
            .map(|r| {
                let on = match *r {
                    VarRole::Pos { e, l, p } => pos[e][l] == p,
                    VarRole::Cum { e, l, p } => pos[e][l] <= p,
                    VarRole::Order { e, a, b } => before(e, a, b),
                    VarRole::SameCross { e, f, a, b, rho, .. } => (before(e, a, b) ^ before(f, a, b)) == rho,
                    VarRole::SplitCross { e, a, b, target, .. } => before(e, a, b) == target,
                    VarRole::Apart { e, a, b } => apart(e, a, b),
                    VarRole::SepEvent { e, f, a, b, .. } => apart(e, a, b) != apart(f, a, b),
                };
                if on {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        Assignment { values }
    }

    pub fn is_feasible(&self, m: &IlpModel) -> bool {
        let integral = self.values.iter().all(|v| (v - v.round()).abs() < 1e-6 && (-1e-6..=1.0 + 1e-6).contains(v));
        integral
            && m.constraints.iter().all(|c| {
                let lhs: i64 = c.terms.iter().map(|&(i, k)| k * self.int(i)).sum();
                c.rel.holds(lhs, c.rhs)
            })
    }

    pub fn objective(&self, m: &IlpModel) -> i64 {
        m.objective.iter().map(|&(i, k)| k * self.int(i)).sum()
    }
}

/// Decodes per-edge orderings from an integral assignment: with cumulative
/// variables the position of `l` is one plus the number of `p` with
/// `x_{l<=p} = 0`; with position variables it is the `p` with `x_{lp} = 1`.
pub fn extract_ordering(m: &IlpModel, asg: &Assignment) -> Result<Ordering, IlpError> {
    let mut edges = Vec::with_capacity(m.edge_lines.len());
    for (e, lines) in m.edge_lines.iter().enumerate() {
        let n = lines.len();
        let mut slots: Vec<Option<usize>> = vec![None; n];
        for &l in lines {
            let p = if m.lookup(&VarRole::Cum { e, l, p: 1 }).is_some() {
                1 + (1..=n)
                    .filter(|&p| !asg.bit(m.lookup(&VarRole::Cum { e, l, p }).expect("cum var")))
                    .count()
            } else if m.lookup(&VarRole::Pos { e, l, p: 1 }).is_some() {
                let hits: Vec<usize> = (1..=n)
                    .filter(|&p| asg.bit(m.lookup(&VarRole::Pos { e, l, p }).expect("pos var")))
                    .collect();
                if hits.len() != 1 {
                    return Err(IlpError::InfeasibleAssignment { edge: e });
                }
                hits[0]
            } else {
                return Err(IlpError::InfeasibleAssignment { edge: e });
            };
            match slots.get_mut(p - 1) {
                Some(slot @ None) => *slot = Some(l),
                _ => return Err(IlpError::InfeasibleAssignment { edge: e }),
            }
        }
        edges.push(slots.into_iter().map(|s| s.expect("filled")).collect());
    }
    Ok(Ordering { edges })
}
