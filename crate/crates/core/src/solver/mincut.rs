//! Exact two-label minimizer via max-flow.
//!
//! With two labels every pairwise term is submodular (`cost(l,l) = 0`,
//! `cost(0,1) = cost(1,0) >= 0`), so the labeling problem is a minimum s-t
//! cut on the grid graph: unary costs become terminal capacities and pair
//! costs become undirected edges.

use crate::error::{Error, Result};
use crate::solver::discretize::DiscreteProblem;
use crate::solver::maxflow::FlowGraph;

pub fn mincut_two_label(problem: &DiscreteProblem) -> Result<(Vec<u8>, u64, u64)> {
    if problem.k != 2 {
        return Err(Error::domain("min-cut solver requires exactly two labels"));
    }
    let n = problem.free_count();
    let s = n;
    let t = n + 1;
    let mut g = FlowGraph::new(n + 2);
    for i in 0..n {
        let theta0 = problem.unary[2 * i];
        let theta1 = problem.unary[2 * i + 1];
        // Cutting s->i puts i on the sink side (label 1) and pays theta1.
        if theta1 > 0 {
            g.add_edge(s, i, theta1, 0);
        }
        if theta0 > 0 {
            g.add_edge(i, t, theta0, 0);
        }
    }
    for p in &problem.pairs {
        let w01 = p.cost[1];
        let w10 = p.cost[2];
        debug_assert_eq!(w01, w10, "pair symmetry broken at integer scale");
        if w01 > 0 {
            g.add_edge(p.i as usize, p.j as usize, w01, w10);
        }
    }
    let (flow, augmentations) = g.max_flow(s, t);
    let side = g.source_side(s);
    let assignment: Vec<u8> = (0..n).map(|i| if side[i] { 0 } else { 1 }).collect();
    let value = problem.constant + flow;
    debug_assert_eq!(value, problem.value_int(&assignment));
    Ok((assignment, value, augmentations))
}
