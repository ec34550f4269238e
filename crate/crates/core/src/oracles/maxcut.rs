use crate::error::{Error, Result};
use crate::hamiltonians::WeightedGraph;
use crate::sim::index_to_bitstring;

pub const MAX_BRUTE_FORCE_NODES: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct MaxCutSolution {
    pub c_opt: f64,
    /// Every maximizing assignment (node 0 first), in increasing index order.
    pub assignments: Vec<String>,
    indices: Vec<usize>,
}

impl MaxCutSolution {
    pub fn optimal_indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn is_optimal(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }
}

/// Exhaustive search over all `2^n` assignments.
pub fn brute_force_maxcut(graph: &WeightedGraph) -> Result<MaxCutSolution> {
    let n = graph.n_nodes();
    if n > MAX_BRUTE_FORCE_NODES {
        return Err(Error::TooLarge(format!(
            "brute-force MaxCut on {n} nodes (limit {MAX_BRUTE_FORCE_NODES})"
        )));
    }
    let values: Vec<f64> = (0..1usize << n).map(|z| graph.cut_value_index(z)).collect();
    let c_opt = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * c_opt.abs().max(1.0);
    let indices: Vec<usize> = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= c_opt - tol)
        .map(|(z, _)| z)
        .collect();
    let assignments = indices.iter().map(|&z| index_to_bitstring(z, n)).collect();
    Ok(MaxCutSolution {
        c_opt,
        assignments,
        indices,
    })
}
