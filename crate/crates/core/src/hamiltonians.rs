//! Hamiltonian and observable builders.
//!
//! MaxCut uses the standard weighted-cut objective: each edge contributes
//! `w_ij (1 - z_i z_j) / 2`, so the cost operator is
//! `H = Σ_{i<j} (w_ij/2) Z_i Z_j - Σ_{i<j} w_ij/2` and `<z|H|z> = -cut(z)`.
//! The Heisenberg chain has open boundaries.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliSum};
use crate::sim::bitstring_to_index;

/// Complete graph with symmetric edge weights in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n_nodes: usize,
    // upper triangle, row-major over i < j
    weights: Vec<f64>,
}

impl WeightedGraph {
    /// Builds a graph from a weight function evaluated on every pair `i < j`.
    pub fn from_fn(n_nodes: usize, mut weight: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if n_nodes < 2 {
            return Err(Error::InvalidArgument(format!(
                "a graph needs at least 2 nodes, got {n_nodes}"
            )));
        }
        let mut weights = Vec::with_capacity(n_nodes * (n_nodes - 1) / 2);
        for i in 0..n_nodes {
            for j in i + 1..n_nodes {
                let w = weight(i, j);
                if !(0.0..=1.0).contains(&w) {
                    return Err(Error::InvalidArgument(format!(
                        "weight w_{i}{j} = {w} outside [0, 1]"
                    )));
                }
                weights.push(w);
            }
        }
        Ok(Self { n_nodes, weights })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        // offset of row i in the packed upper triangle
        i * (2 * self.n_nodes - i - 1) / 2 + (j - i - 1)
    }

    /// Weight of edge `{i, j}`; panics if `i == j` or either is out of range.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        assert!(i != j && i < self.n_nodes && j < self.n_nodes);
        self.weights[self.slot(i, j)]
    }

    /// Iterates `(i, j, w_ij)` over all pairs with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_nodes)
            .flat_map(move |i| (i + 1..self.n_nodes).map(move |j| (i, j)))
            .zip(self.weights.iter())
            .map(|((i, j), &w)| (i, j, w))
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Cut value of the assignment encoded in the bits of `index` (node `i` is bit `i`).
    pub fn cut_value_index(&self, index: usize) -> f64 {
        self.edges()
            .filter(|&(i, j, _)| (index >> i & 1) != (index >> j & 1))
            .map(|(_, _, w)| w)
            .sum()
    }

    /// Cut value of a bitstring assignment (node 0 first).
    pub fn cut_value(&self, assignment: &str) -> Result<f64> {
        if assignment.chars().count() != self.n_nodes {
            return Err(Error::Dimension(format!(
                "assignment of length {} for {} nodes",
                assignment.chars().count(),
                self.n_nodes
            )));
        }
        Ok(self.cut_value_index(bitstring_to_index(assignment)?))
    }

    /// Edge-list text: header `n=<count>` then `i j w_ij` per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n={}\n", self.n_nodes);
        for (i, j, w) in self.edges() {
            writeln!(out, "{i} {j} {w}").unwrap();
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing `n=<count>` header".into(),
        })?;
        let n: usize = header
            .trim()
            .strip_prefix("n=")
            .and_then(|v| v.parse().ok())
            .ok_or(Error::Parse {
                line: 1,
                msg: format!("bad header {header:?}"),
            })?;
        let mut weights = vec![None; n * n.saturating_sub(1) / 2];
        let shell = WeightedGraph {
            n_nodes: n,
            weights: Vec::new(),
        };
        for (lineno, line) in lines {
            let perr = |msg: String| Error::Parse {
                line: lineno + 1,
                msg,
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(perr("expected `i j w`".into()));
            }
            let i: usize = toks[0].parse().map_err(|_| perr("bad node index".into()))?;
            let j: usize = toks[1].parse().map_err(|_| perr("bad node index".into()))?;
            let w: f64 = toks[2].parse().map_err(|_| perr("bad weight".into()))?;
            if i == j || i >= n || j >= n {
                return Err(perr(format!("invalid edge ({i}, {j})")));
            }
            let s = shell.slot(i, j);
            if weights[s].replace(w).is_some() {
                return Err(perr(format!("duplicate edge ({i}, {j})")));
            }
        }
        if let Some(k) = weights.iter().position(Option::is_none) {
            return Err(Error::Parse {
                line: 0,
                msg: format!("graph is not complete (edge slot {k} missing)"),
            });
        }
        let flat: Vec<f64> = weights.into_iter().flatten().collect();
        let mut it = flat.into_iter();
        WeightedGraph::from_fn(n, |_, _| it.next().unwrap())
    }
}

/// Complete graph on `n` nodes with i.i.d. uniform `[0, 1)` weights.
pub fn random_complete_graph(n: usize, seed: u64) -> Result<WeightedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    WeightedGraph::from_fn(n, |_, _| rng.gen::<f64>())
}

/// `Σ (w_ij/2) Z_i Z_j - Σ w_ij/2`; minimizing it maximizes the cut.
pub fn maxcut_hamiltonian(graph: &WeightedGraph) -> PauliSum {
    let mut h = PauliSum::new(graph.n_nodes());
    for (i, j, w) in graph.edges() {
        h.add_term(w / 2.0, &[(i, Pauli::Z), (j, Pauli::Z)])
            .expect("indices in range");
        h.add_constant(-w / 2.0);
    }
    h
}

/// Open-boundary XXX chain: `J Σ (XX + YY + ZZ) + h Σ Z`.
pub fn heisenberg_hamiltonian(n: usize, coupling: f64, field: f64) -> Result<PauliSum> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "chain needs at least 2 sites, got {n}"
        )));
    }
    let mut h = PauliSum::new(n);
    for i in 0..n - 1 {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            h.add_term(coupling, &[(i, p), (i + 1, p)])?;
        }
    }
    for i in 0..n {
        h.add_term(field, &[(i, Pauli::Z)])?;
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrozenState {
    Zero,
    One,
}

impl FrozenState {
    /// Eigenvalue of `Z` on the frozen state.
    pub fn z_sign(self) -> f64 {
        match self {
            FrozenState::Zero => 1.0,
            FrozenState::One => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            FrozenState::Zero => FrozenState::One,
            FrozenState::One => FrozenState::Zero,
        }
    }
}

/// A chain site pinned to a basis state. `site` is the distance from the left edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImpuritySpec {
    pub site: usize,
    pub frozen: FrozenState,
}

impl ImpuritySpec {
    pub fn new(site: usize, frozen: FrozenState) -> Self {
        Self { site, frozen }
    }

    pub fn check(&self, n_system: usize) -> Result<()> {
        if self.site >= n_system {
            return Err(Error::InvalidArgument(format!(
                "impurity site {} outside a {n_system}-site chain",
                self.site
            )));
        }
        Ok(())
    }
}

/// Effective Hamiltonian of the chain with the impurity site frozen.
///
/// Acts on the `n - 1` free sites (sites after the impurity shift down by
/// one). At the impurity `Z -> s`, `X, Y -> 0`; neighbours pick up a local
/// field `J s Z` and the impurity's own field energy `h s` lands in the
/// constant offset.
pub fn constrained_impurity_hamiltonian(
    n: usize,
    coupling: f64,
    field: f64,
    impurity: ImpuritySpec,
) -> Result<PauliSum> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "chain needs at least 2 sites, got {n}"
        )));
    }
    impurity.check(n)?;
    let d = impurity.site;
    let s = impurity.frozen.z_sign();
    let map = |i: usize| if i < d { i } else { i - 1 };
    let mut h = PauliSum::new(n - 1);
    for i in 0..n - 1 {
        let j = i + 1;
        if i == d || j == d {
            let other = if i == d { j } else { i };
            h.add_term(coupling * s, &[(map(other), Pauli::Z)])?;
        } else {
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                h.add_term(coupling, &[(map(i), p), (map(j), p)])?;
            }
        }
    }
    for i in (0..n).filter(|&i| i != d) {
        h.add_term(field, &[(map(i), Pauli::Z)])?;
    }
    h.add_constant(field * s);
    Ok(h)
}

/// `(1/n) Σ Z_i`.
pub fn magnetization_observable(n: usize) -> Result<PauliSum> {
    if n == 0 {
        return Err(Error::InvalidArgument("magnetization of an empty register".into()));
    }
    let mut m = PauliSum::new(n);
    for i in 0..n {
        m.add_term(1.0 / n as f64, &[(i, Pauli::Z)])?;
    }
    Ok(m)
}
