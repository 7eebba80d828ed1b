use crate::graph::Ordering;
use crate::instance::Instance;

use super::evaluate::{evaluate, objective_of, ObjectiveBreakdown};
use super::OptimizeError;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Rearranges `v` into the next permutation in lexicographic order,
/// returning false (and leaving `v` sorted) after the last one.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Size of the ordering space, saturating at `u64::MAX`.
pub fn search_space(inst: &Instance) -> u64 {
    inst.graph.edges.iter().fold(1u64, |acc, e| {
        (1..=e.lines.len() as u64).fold(acc, |a, k| a.saturating_mul(k))
    })
}

/// Exhaustive minimum over all per-edge permutations. Edges are enumerated
/// like an odometer with the first edge most significant and each edge's
/// permutations in lexicographic order, and only strict improvements replace
/// the incumbent, so the lexicographically first optimum is returned.
pub fn brute_force(inst: &Instance, budget: u64) -> Result<(Ordering, ObjectiveBreakdown), OptimizeError> {
    let size = search_space(inst);
    if size > budget {
        return Err(OptimizeError::BudgetExceeded { size, budget });
    }
    let n_lines = inst.graph.lines.len();
    let mut cur: Vec<Vec<usize>> = inst.graph.edges.iter().map(|e| e.lines.clone()).collect();
    let mut pos: Vec<Vec<u32>> = cur.iter().map(|o| positions(o, n_lines)).collect();
    let mut best = (objective_of(inst, &pos), cur.clone());
    'outer: loop {
        let mut i = cur.len();
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            let more = next_permutation(&mut cur[i]);
            pos[i] = positions(&cur[i], n_lines);
            if more {
                break;
            }
        }
        let obj = objective_of(inst, &pos);
        if obj < best.0 {
            best = (obj, cur.clone());
        }
    }
    let ord = Ordering { edges: best.1 };
    let bd = evaluate(inst, &ord)?;
    Ok((ord, bd))
}

fn positions(o: &[usize], n_lines: usize) -> Vec<u32> {
    let mut p = vec![0u32; n_lines];
    for (i, &l) in o.iter().enumerate() {
        p[l] = i as u32 + 1;
    }
    p
}
