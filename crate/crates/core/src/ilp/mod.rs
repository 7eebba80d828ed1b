//! Integer linear programs for the line ordering problem.
//!
//! Three formulations are built over an [`Instance`](crate::instance::Instance):
//! the baseline model with explicit position variables and one constraint per
//! inverting position combination, the improved model with cumulative
//! position variables and pairwise order variables, and the improved model
//! extended with adjacency variables that price line separations.
//!
//! All variables are binary. Variable names follow a fixed grammar built from
//! edge, node, line and position indices so that solution files from external
//! solvers can be mapped back:
//!
//! | name                              | meaning                                        |
//! |-----------------------------------|------------------------------------------------|
//! | `x_e{e}_l{l}_p{p}`                | line `l` sits at position `p` of edge `e`      |
//! | `x_e{e}_l{l}_le{p}`               | position of `l` on `e` is at most `p`          |
//! | `o_e{e}_l{a}_lt_l{b}`             | `a` comes before `b` on `e`                    |
//! | `c_n{v}_e{e}_e{f}_l{a}_l{b}`      | `a`, `b` cross at `v` between `e` and `f`      |
//! | `s_n{v}_e{e}_e{f}_e{g}_l{a}_l{b}` | `a` (to `f`) and `b` (to `g`) cross at `v`     |
//! | `d_e{e}_l{a}_l{b}`                | `a` and `b` are not adjacent on `e`            |
//! | `q_n{v}_e{e}_e{f}_l{a}_l{b}`      | `a`, `b` separate at `v` between `e` and `f`   |

mod build;
mod decode;
mod lp;

pub use build::{baseline_dims, build, build_baseline, build_improved, build_separation};
pub use decode::{extract_ordering, Assignment};
pub use lp::{lp_string, parse_lp, read_solution, write_lp, ParsedLp};

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IlpError {
    #[error("assignment does not decode to a permutation on edge {edge}")]
    InfeasibleAssignment { edge: usize },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse {what} at line {line}: {text}")]
    Parse {
        what: &'static str,
        line: usize,
        text: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    Baseline,
    Improved,
    Separation,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Baseline => "B",
            ModelKind::Improved => "I",
            ModelKind::Separation => "S",
        })
    }
}

/// Structured key of a variable. Positions are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarRole {
    Pos { e: usize, l: usize, p: usize },
    Cum { e: usize, l: usize, p: usize },
    Order { e: usize, a: usize, b: usize },
    SameCross { v: usize, e: usize, f: usize, a: usize, b: usize, rho: bool },
    SplitCross { v: usize, e: usize, f: usize, g: usize, a: usize, b: usize, target: bool },
    Apart { e: usize, a: usize, b: usize },
    SepEvent { v: usize, e: usize, f: usize, a: usize, b: usize },
}

impl VarRole {
    pub fn name(&self) -> String {
        match *self {
            VarRole::Pos { e, l, p } => format!("x_e{e}_l{l}_p{p}"),
            VarRole::Cum { e, l, p } => format!("x_e{e}_l{l}_le{p}"),
            VarRole::Order { e, a, b } => format!("o_e{e}_l{a}_lt_l{b}"),
            VarRole::SameCross { v, e, f, a, b, .. } => format!("c_n{v}_e{e}_e{f}_l{a}_l{b}"),
            VarRole::SplitCross { v, e, f, g, a, b, .. } => format!("s_n{v}_e{e}_e{f}_e{g}_l{a}_l{b}"),
            VarRole::Apart { e, a, b } => format!("d_e{e}_l{a}_l{b}"),
            VarRole::SepEvent { v, e, f, a, b } => format!("q_n{v}_e{e}_e{f}_l{a}_l{b}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Le => "<=",
            Rel::Ge => ">=",
            Rel::Eq => "=",
        }
    }

    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Rel::Le => lhs <= rhs,
            Rel::Ge => lhs >= rhs,
            Rel::Eq => lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, i64)>,
    pub rel: Rel,
    pub rhs: i64,
}

#[derive(Debug, Clone, Default)]
pub struct IlpModel {
    pub kind: Option<ModelKind>,
    pub vars: Vec<VarRole>,
    pub constraints: Vec<Constraint>,
    /// Minimized; sparse coefficients over `vars`.
    pub objective: Vec<(usize, i64)>,
    /// Lines of every edge of the underlying graph.
    pub edge_lines: Vec<Vec<usize>>,
    index: HashMap<VarRole, usize>,
}

impl IlpModel {
    pub(crate) fn new(kind: ModelKind, edge_lines: Vec<Vec<usize>>) -> IlpModel {
        IlpModel {
            kind: Some(kind),
            edge_lines,
            ..IlpModel::default()
        }
    }

    /// Index of `role`, declaring it on first use.
    pub(crate) fn var(&mut self, role: VarRole) -> usize {
        if let Some(&i) = self.index.get(&role) {
            return i;
        }
        self.vars.push(role);
        self.index.insert(role, self.vars.len() - 1);
        self.vars.len() - 1
    }

    pub(crate) fn constrain(&mut self, name: String, terms: Vec<(usize, i64)>, rel: Rel, rhs: i64) {
        self.constraints.push(Constraint { name, terms, rel, rhs });
    }

    pub fn lookup(&self, role: &VarRole) -> Option<usize> {
        self.index.get(role).copied()
    }

    pub fn var_name(&self, i: usize) -> String {
        self.vars[i].name()
    }

    /// `(rows, cols)`: number of constraints and of variables.
    pub fn dims(&self) -> (usize, usize) {
        (self.constraints.len(), self.vars.len())
    }

    pub fn name_index(&self) -> HashMap<String, usize> {
        self.vars.iter().enumerate().map(|(i, r)| (r.name(), i)).collect()
    }
}

/// Dimensions as reported for a model.
pub fn model_dims(m: &IlpModel) -> (usize, usize) {
    m.dims()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_model_dims() {
        assert_eq!(model_dims(&IlpModel::default()), (0, 0));
    }

    #[test]
    fn declaring_twice_reuses_the_variable() {
        let mut m = IlpModel::new(ModelKind::Improved, vec![vec![0, 1]]);
        let a = m.var(VarRole::Cum { e: 0, l: 1, p: 2 });
        let b = m.var(VarRole::Cum { e: 0, l: 1, p: 2 });
        assert_eq!(a, b);
        assert_eq!(m.var_name(a), "x_e0_l1_le2");
    }
}
