//! Weighted digraphs, their Laplacians and connectivity structure.
//!
//! Nodes are labelled `1..=n` at every public boundary. An edge `(i, j)`
//! means agent `i` listens to agent `j`: it enters row `i` of the Laplacian
//! with weight `-a_ij`, and `i`'s opinion is pulled toward `j`'s. Influence
//! therefore flows against edge direction, and a globally reachable node is
//! an ultimate influencer.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::GraphError;

/// A directed, positively weighted interaction `from -> to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

impl Edge {
    pub fn new(from: usize, to: usize, weight: f64) -> Self {
        Self { from, to, weight }
    }
}

/// Validated weighted digraph on nodes `1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Validates the edge list. Rejects out-of-range ids, self-loops,
    /// non-positive (or non-finite) weights and repeated ordered pairs.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut seen = BTreeSet::new();
        for (index, e) in edges.iter().enumerate() {
            if e.from == 0 || e.from > n || e.to == 0 || e.to > n {
                return Err(GraphError::NodeOutOfRange {
                    index,
                    from: e.from,
                    to: e.to,
                    n,
                });
            }
            if e.from == e.to {
                return Err(GraphError::SelfLoop { index, node: e.from });
            }
            if !(e.weight > 0.0 && e.weight.is_finite()) {
                return Err(GraphError::NonPositiveWeight {
                    index,
                    from: e.from,
                    to: e.to,
                    weight: e.weight,
                });
            }
            if !seen.insert((e.from, e.to)) {
                return Err(GraphError::DuplicateEdge {
                    index,
                    from: e.from,
                    to: e.to,
                });
            }
        }
        Ok(Self { n, edges })
    }

    /// Convenience constructor from `(from, to, weight)` triples.
    pub fn from_triples(n: usize, triples: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        Self::new(
            n,
            triples.iter().map(|&(f, t, w)| Edge::new(f, t, w)).collect(),
        )
    }

    /// Undirected graph: every pair is inserted in both directions.
    pub fn undirected(n: usize, pairs: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        let mut edges = Vec::with_capacity(2 * pairs.len());
        for &(i, j, w) in pairs {
            edges.push(Edge::new(i, j, w));
            edges.push(Edge::new(j, i, w));
        }
        Self::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Dense weighted adjacency matrix, `A[(i-1, j-1)] = a_ij`.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            a[(e.from - 1, e.to - 1)] = e.weight;
        }
        a
    }

    /// `L = D - A` with the out-degree on the diagonal.
    pub fn laplacian(&self) -> Laplacian {
        let mut l = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            let (i, j) = (e.from - 1, e.to - 1);
            l[(i, j)] -= e.weight;
            l[(i, i)] += e.weight;
        }
        Laplacian(l)
    }

    /// True when every edge has a reverse twin of identical weight.
    pub fn is_symmetric(&self) -> bool {
        let a = self.adjacency();
        self.edges
            .iter()
            .all(|e| a[(e.to - 1, e.from - 1)] == e.weight)
    }

    fn out_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.from - 1].push(e.to - 1);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Strongly connected components, condensation and global reachability.
    pub fn connectivity(&self) -> ConnectivityReport {
        let adj = self.out_lists();
        let comp_of = tarjan_scc(&adj);
        let count = comp_of.iter().copied().max().map_or(0, |m| m + 1);

        // Renumber components by their smallest member so the output does not
        // depend on traversal order.
        let mut first_node = vec![usize::MAX; count];
        for (v, &c) in comp_of.iter().enumerate() {
            first_node[c] = first_node[c].min(v);
        }
        let mut order: Vec<usize> = (0..count).collect();
        order.sort_by_key(|&c| first_node[c]);
        let mut rank = vec![0; count];
        for (r, &c) in order.iter().enumerate() {
            rank[c] = r;
        }
        let comp_of: Vec<usize> = comp_of.iter().map(|&c| rank[c]).collect();

        let mut components = vec![Vec::new(); count];
        for (v, &c) in comp_of.iter().enumerate() {
            components[c].push(v + 1);
        }

        let mut cond = BTreeSet::new();
        for (v, outs) in adj.iter().enumerate() {
            for &w in outs {
                let (cv, cw) = (comp_of[v], comp_of[w]);
                if cv != cw {
                    cond.insert((cv, cw));
                }
            }
        }
        let condensation_edges: Vec<(usize, usize)> = cond.into_iter().collect();

        let mut has_out = vec![false; count];
        for &(c, _) in &condensation_edges {
            has_out[c] = true;
        }
        let sink_components: Vec<usize> = (0..count).filter(|&c| !has_out[c]).collect();

        let globally_reachable = if sink_components.len() == 1 {
            components[sink_components[0]].clone()
        } else {
            Vec::new()
        };

        let weakly = underlying_connected(&adj);
        let class = if weakly && self.is_symmetric() {
            ConnectivityClass::Undirected
        } else if count == 1 {
            ConnectivityClass::StronglyConnected
        } else if weakly {
            ConnectivityClass::WeaklyConnected
        } else {
            ConnectivityClass::Disconnected
        };

        ConnectivityReport {
            components,
            condensation_edges,
            sink_components,
            globally_reachable,
            class,
        }
    }
}

/// Tarjan's algorithm, iterative. Returns the component index of each node.
fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<usize> {
    const UNVISITED: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNVISITED; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    // (node, position in its adjacency list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                while let Some(w) = stack.pop() {
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}

fn underlying_connected(adj: &[Vec<usize>]) -> bool {
    let n = adj.len();
    let mut und = vec![Vec::new(); n];
    for (v, outs) in adj.iter().enumerate() {
        for &w in outs {
            und[v].push(w);
            und[w].push(v);
        }
    }
    let mut seen = vec![false; n];
    let mut todo = vec![0];
    seen[0] = true;
    let mut reached = 1;
    while let Some(v) = todo.pop() {
        for &w in &und[v] {
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                todo.push(w);
            }
        }
    }
    reached == n
}

/// Graph Laplacian `L = D - A`. Rows sum to zero, off-diagonals are `<= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian(DMatrix<f64>);

impl Laplacian {
    /// Wraps a raw matrix after checking the Laplacian sign and row-sum
    /// structure (row sums within `1e-12` of zero, relative to the row scale).
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self, GraphError> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(GraphError::NotALaplacian("matrix must be square and non-empty"));
        }
        for i in 0..m.nrows() {
            let mut sum = 0.0;
            let mut scale: f64 = 1.0;
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if !v.is_finite() {
                    return Err(GraphError::NotALaplacian("non-finite entry"));
                }
                if i != j && v > 0.0 {
                    return Err(GraphError::NotALaplacian("positive off-diagonal entry"));
                }
                sum += v;
                scale = scale.max(v.abs());
            }
            if m[(i, i)] < 0.0 {
                return Err(GraphError::NotALaplacian("negative diagonal entry"));
            }
            if sum.abs() > 1e-12 * scale {
                return Err(GraphError::NotALaplacian("row does not sum to zero"));
            }
        }
        Ok(Self(m))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.0
            .row_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.0 * x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectivityClass {
    /// Symmetric weights and connected.
    Undirected,
    StronglyConnected,
    WeaklyConnected,
    Disconnected,
}

impl ConnectivityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Undirected => "undirected",
            Self::StronglyConnected => "strongly_connected",
            Self::WeaklyConnected => "weakly_connected",
            Self::Disconnected => "disconnected",
        }
    }
}

/// Strongly connected components and their condensation DAG.
///
/// Components are indexed in order of their smallest node; node ids inside
/// each component are sorted and 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityReport {
    pub components: Vec<Vec<usize>>,
    pub condensation_edges: Vec<(usize, usize)>,
    /// Components with no outgoing condensation edge.
    pub sink_components: Vec<usize>,
    /// Nodes reachable from every node; empty unless there is exactly one sink.
    pub globally_reachable: Vec<usize>,
    pub class: ConnectivityClass,
}
