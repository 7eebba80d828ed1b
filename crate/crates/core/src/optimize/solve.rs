use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::Ordering;
use crate::ilp::{self, extract_ordering, Assignment, IlpModel, ModelKind};
use crate::instance::Instance;

use super::bnb::branch_and_bound;
use super::evaluate::{evaluate, ObjectiveBreakdown};
use super::external::ExternalSolver;
use super::OptimizeError;

/// Which model is solved. `S` adds separation costs to the objective; `B`
/// and `I` minimise crossings only and differ in their formulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    B,
    I,
    S,
}

impl Variant {
    pub fn model_kind(self) -> ModelKind {
        match self {
            Variant::B => ModelKind::Baseline,
            Variant::I => ModelKind::Improved,
            Variant::S => ModelKind::Separation,
        }
    }

    pub fn prices_separations(self) -> bool {
        self == Variant::S
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.model_kind(), f)
    }
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Variant, String> {
        match s {
            "B" | "b" => Ok(Variant::B),
            "I" | "i" => Ok(Variant::I),
            "S" | "s" => Ok(Variant::S),
            _ => Err(format!("unknown model variant {s:?}, expected B, I or S")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    /// Combinatorial branch-and-bound, no model solve.
    Builtin,
    /// The pure-Rust MILP solver on the generated model.
    Milp,
    /// An external solver on the generated model written as LP.
    External(ExternalSolver),
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Builtin => "builtin",
            Backend::Milp => "milp",
            Backend::External(_) => "external",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    pub variant: Variant,
    pub backend: Backend,
    /// Aborts the built-in search after this many nodes.
    pub node_limit: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            variant: Variant::S,
            backend: Backend::Builtin,
            node_limit: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub ordering: Ordering,
    pub breakdown: ObjectiveBreakdown,
    /// `(rows, cols)` of the model for the chosen variant.
    pub model_dims: (usize, usize),
    pub backend: &'static str,
    /// Search nodes of the built-in solver.
    pub nodes: u64,
}

/// Optimal ordering of `inst` under the chosen variant. The model objective
/// of the result is checked against the independent evaluator.
pub fn solve(inst: &Instance, opts: &SolveOptions) -> Result<SolveReport, OptimizeError> {
    let mut local;
    let inst = if inst.price_separations == opts.variant.prices_separations() {
        inst
    } else {
        local = inst.clone();
        local.price_separations = opts.variant.prices_separations();
        &local
    };
    let model = ilp::build(inst, opts.variant.model_kind());
    let model_dims = model.dims();
    if inst.is_trivial() {
        let ordering = Ordering::identity(&inst.graph);
        let breakdown = evaluate(inst, &ordering)?;
        return Ok(SolveReport {
            ordering,
            breakdown,
            model_dims,
            backend: "trivial",
            nodes: 0,
        });
    }
    let (ordering, model_obj, nodes) = match &opts.backend {
        Backend::Builtin => {
            let (ord, stats) = branch_and_bound(inst, opts.node_limit)?;
            let asg = Assignment::encode(&model, &ord);
            if !asg.is_feasible(&model) {
                return Err(OptimizeError::SolverFailure("search result violates the model".into()));
            }
            if asg.objective(&model) != stats.objective {
                return Err(OptimizeError::ObjectiveMismatch {
                    model: asg.objective(&model),
                    evaluated: stats.objective,
                });
            }
            (ord, asg.objective(&model), stats.nodes)
        }
        Backend::Milp => {
            let asg = solve_milp(&model)?;
            (extract_ordering(&model, &asg)?, asg.objective(&model), 0)
        }
        Backend::External(ext) => {
            let asg = solve_external(&model, ext)?;
            (extract_ordering(&model, &asg)?, asg.objective(&model), 0)
        }
    };
    let breakdown = evaluate(inst, &ordering)?;
    if breakdown.objective != model_obj {
        return Err(OptimizeError::ObjectiveMismatch {
            model: model_obj,
            evaluated: breakdown.objective,
        });
    }
    Ok(SolveReport {
        ordering,
        breakdown,
        model_dims,
        backend: opts.backend.name(),
        nodes,
    })
}

#[cfg(feature = "milp")]
pub(crate) fn solve_milp(m: &IlpModel) -> Result<Assignment, OptimizeError> {
    use microlp::{ComparisonOp, OptimizationDirection, Problem};

    let mut obj = vec![0.0; m.vars.len()];
    for &(i, k) in &m.objective {
        obj[i] += k as f64;
    }
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = obj.iter().map(|&c| p.add_binary_var(c)).collect();
    for c in &m.constraints {
        let op = match c.rel {
            ilp::Rel::Le => ComparisonOp::Le,
            ilp::Rel::Ge => ComparisonOp::Ge,
            ilp::Rel::Eq => ComparisonOp::Eq,
        };
        let terms: Vec<_> = c.terms.iter().map(|&(i, k)| (vars[i], k as f64)).collect();
        p.add_constraint(terms.as_slice(), op, c.rhs as f64);
    }
    let outcome = p.solve().map_err(|e| match e {
        microlp::Error::Infeasible => OptimizeError::Infeasible,
        other => OptimizeError::SolverFailure(other.to_string()),
    })?;
    let sol = outcome
        .into_solution()
        .map_err(|_| OptimizeError::SolverFailure("solve interrupted".into()))?;
    Ok(Assignment {
        values: vars.iter().map(|&v| sol.var_value(v).round()).collect(),
    })
}

#[cfg(not(feature = "milp"))]
pub(crate) fn solve_milp(_: &IlpModel) -> Result<Assignment, OptimizeError> {
    Err(OptimizeError::Unavailable("milp"))
}

fn solve_external(m: &IlpModel, ext: &ExternalSolver) -> Result<Assignment, OptimizeError> {
    let dir = ext.scratch_dir()?;
    let lp = dir.join("model.lp");
    let sol = dir.join("model.sol");
    let text = ilp::write_lp(m, &lp).map_err(OptimizeError::from).and_then(|_| ext.run(&lp, &sol));
    let _ = std::fs::remove_dir_all(&dir);
    Ok(Assignment::from_names(m, &ilp::read_solution(&text?)))
}
