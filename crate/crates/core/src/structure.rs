//! Maximum spanning dependence trees.

use crate::empirical::default_lattice_order;
use crate::error::{Error, Result};
use crate::measures::{weight_matrix, Measure, WeightMatrix};
use crate::samples::{Dataset, TieBreak};

/// Undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeEdge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    weight: f64,
    pair: (usize, usize),
}

impl Candidate {
    fn new(a: usize, b: usize, weight: f64) -> Self {
        Candidate {
            weight,
            pair: (a.min(b), a.max(b)),
        }
    }

    /// Heavier wins; equal weights go to the lexicographically smaller pair.
    fn beats(&self, other: &Candidate) -> bool {
        self.weight > other.weight || (self.weight == other.weight && self.pair < other.pair)
    }
}

/// Prim's algorithm seeded with the heaviest edge, growing one vertex at a
/// time through the heaviest edge leaving the tree. O(N²) on the dense
/// matrix. Edges are returned in insertion order.
pub fn maximum_spanning_tree(w: &WeightMatrix) -> Result<Vec<TreeEdge>> {
    let n = w.n();
    if n < 2 {
        return Err(Error::TooFewColumns(n));
    }

    let mut seed = Candidate::new(0, 1, w.get(0, 1));
    for i in 0..n {
        for j in i + 1..n {
            let c = Candidate::new(i, j, w.get(i, j));
            if c.beats(&seed) {
                seed = c;
            }
        }
    }

    let mut in_tree = vec![false; n];
    let mut best: Vec<Option<Candidate>> = vec![None; n];
    let mut edges = Vec::with_capacity(n - 1);
    let (a, b) = seed.pair;
    edges.push(TreeEdge {
        u: a,
        v: b,
        weight: seed.weight,
    });
    for added in [a, b] {
        in_tree[added] = true;
    }
    for added in [a, b] {
        relax(w, added, &in_tree, &mut best);
    }

    while edges.len() < n - 1 {
        let next = (0..n)
            .filter(|&j| !in_tree[j])
            .filter_map(|j| best[j].map(|c| (j, c)))
            .reduce(|acc, cur| if cur.1.beats(&acc.1) { cur } else { acc })
            .ok_or_else(|| Error::Invariant("no edge leaves the partial tree".into()))?;
        let (vertex, c) = next;
        edges.push(TreeEdge {
            u: c.pair.0,
            v: c.pair.1,
            weight: c.weight,
        });
        in_tree[vertex] = true;
        relax(w, vertex, &in_tree, &mut best);
    }
    Ok(edges)
}

fn relax(w: &WeightMatrix, added: usize, in_tree: &[bool], best: &mut [Option<Candidate>]) {
    for j in 0..in_tree.len() {
        if in_tree[j] {
            continue;
        }
        let c = Candidate::new(added, j, w.get(added, j));
        if best[j].is_none_or(|b| c.beats(&b)) {
            best[j] = Some(c);
        }
    }
}

/// Share of the total pairwise weight carried by the tree edges.
pub fn coverage_ratio(edges: &[TreeEdge], w: &WeightMatrix) -> Result<f64> {
    let total = w.total();
    if total <= 0.0 {
        return Err(Error::ZeroTotalWeight);
    }
    let covered: f64 = edges.iter().map(|e| w.get(e.u, e.v)).sum();
    Ok(covered / total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DependenceEdge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
    pub signed_value: f64,
}

/// Learned tree over named variables.
#[derive(Debug, Clone, PartialEq)]
pub struct DependenceTree {
    pub nodes: Vec<String>,
    pub edges: Vec<DependenceEdge>,
    pub measure: Measure,
    pub lattice_order: usize,
    pub coverage_ratio: f64,
}

impl DependenceTree {
    /// Checks the spanning-tree invariants against the matrix it came from.
    pub fn validate(&self, w: &WeightMatrix) -> Result<()> {
        let n = self.nodes.len();
        if self.edges.len() + 1 != n {
            return Err(Error::Invariant(format!(
                "{} edges for {n} nodes",
                self.edges.len()
            )));
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            if e.u >= n || e.v >= n || e.u == e.v {
                return Err(Error::Invariant(format!("bad edge ({}, {})", e.u, e.v)));
            }
            if e.weight != w.get(e.u, e.v) {
                return Err(Error::Invariant(format!(
                    "edge ({}, {}) weight differs from the matrix",
                    e.u, e.v
                )));
            }
            let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
            if a == b {
                return Err(Error::Invariant("tree contains a cycle".into()));
            }
            parent[a] = b;
        }
        Ok(())
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        self.edges.iter().any(|e| {
            let (u, v) = (&self.nodes[e.u], &self.nodes[e.v]);
            (u == a && v == b) || (u == b && v == a)
        })
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| e.u == node || e.v == node)
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LearnOptions {
    pub measure: Measure,
    /// `None` picks `max(2, floor(sqrt(T)))`.
    pub lattice_order: Option<usize>,
    pub ties: TieBreak,
}

impl Default for LearnOptions {
    fn default() -> Self {
        LearnOptions {
            measure: Measure::MiCell,
            lattice_order: None,
            ties: TieBreak::default(),
        }
    }
}

/// Lattice order used for `data` under `opts`. Rho always works on the
/// full rank lattice (order T).
pub fn resolve_lattice_order(data: &Dataset, opts: &LearnOptions) -> Result<usize> {
    let t = data.n_samples();
    let k = opts
        .lattice_order
        .unwrap_or_else(|| default_lattice_order(t));
    if k < 2 || k > t {
        return Err(Error::LatticeOrder {
            order: k,
            min: 2,
            max: t,
        });
    }
    Ok(if opts.measure.uses_lattice() { k } else { t })
}

/// Ranks, weighs every pair, spans the maximum tree and scores coverage.
pub fn learn_structure(data: &Dataset, opts: &LearnOptions) -> Result<DependenceTree> {
    let (tree, _) = learn_with_weights(data, opts)?;
    Ok(tree)
}

/// [`learn_structure`] that also returns the weight matrix.
pub fn learn_with_weights(
    data: &Dataset,
    opts: &LearnOptions,
) -> Result<(DependenceTree, WeightMatrix)> {
    let k = resolve_lattice_order(data, opts)?;
    let w = weight_matrix(data, opts.measure, k, opts.ties)?;
    let edges = maximum_spanning_tree(&w)?;
    let coverage = coverage_ratio(&edges, &w)?;
    let tree = DependenceTree {
        nodes: data.names().to_vec(),
        edges: edges
            .iter()
            .map(|e| DependenceEdge {
                u: e.u,
                v: e.v,
                weight: e.weight,
                signed_value: w.signed(e.u, e.v),
            })
            .collect(),
        measure: opts.measure,
        lattice_order: k,
        coverage_ratio: coverage,
    };
    tree.validate(&w)?;
    Ok((tree, w))
}
