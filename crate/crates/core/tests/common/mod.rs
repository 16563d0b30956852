#![allow(dead_code)]

use biasflow_core::{DMatrix, DVector, Edge, Graph, Laplacian};
use nalgebra::SymmetricEigen;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform weight in `(0, 2]`.
pub fn weight(rng: &mut impl Rng) -> f64 {
    2.0 * (1.0 - rng.random::<f64>())
}

pub fn uniform_vec(rng: &mut impl Rng, n: usize, half_width: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-half_width..half_width))
}

/// Erdős–Rényi style digraph: each ordered pair independently with
/// probability `p`.
pub fn random_digraph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != j && rng.random::<f64>() < p {
                edges.push(Edge::new(i, j, weight(rng)));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

/// Digraph with `n ∈ 3..=10` and a density drawn from `[0.08, 0.6)`, so that
/// single and multiple sink components both occur.
pub fn random_scenario_graph(rng: &mut impl Rng) -> Graph {
    let n = rng.random_range(3..=10);
    let p = rng.random_range(0.08..0.6);
    random_digraph(rng, n, p)
}

/// Connected undirected graph: random spanning tree plus extra symmetric edges.
pub fn random_connected_undirected(rng: &mut impl Rng, n: usize, extra_p: f64) -> Graph {
    let mut pairs = Vec::new();
    let mut tree = std::collections::BTreeSet::new();
    for v in 2..=n {
        let u = rng.random_range(1..v);
        pairs.push((u, v, weight(rng)));
        tree.insert((u, v));
    }
    for i in 1..=n {
        for j in i + 1..=n {
            if !tree.contains(&(i, j)) && rng.random::<f64>() < extra_p {
                pairs.push((i, j, weight(rng)));
            }
        }
    }
    Graph::undirected(n, &pairs).unwrap()
}

/// Least-squares slope of `ys` against `ts`.
pub fn regression_slope(ts: &[f64], ys: &[f64]) -> f64 {
    let n = ts.len() as f64;
    let mt = ts.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = ts.iter().zip(ys).map(|(t, y)| (t - mt) * (y - my)).sum();
    let den: f64 = ts.iter().map(|t| (t - mt) * (t - mt)).sum();
    num / den
}

/// Steady state of a connected undirected graph by eigen-expansion:
/// `x̄ = mean(x₀)·1 + Σ_{λ_k > 0} v_k (v_kᵀ b) / λ_k` over an orthonormal
/// eigenbasis of the symmetric `L`.
pub fn symmetric_expansion_steady_state(l: &Laplacian, x0: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = l.n();
    let eig = SymmetricEigen::new(l.matrix().clone());
    let cutoff = 1e-9 * l.inf_norm().max(1.0);
    let mut x = DVector::from_element(n, x0.sum() / n as f64);
    for k in 0..n {
        let lambda = eig.eigenvalues[k];
        if lambda.abs() > cutoff {
            let v = eig.eigenvectors.column(k);
            x += v * (v.dot(b) / lambda);
        }
    }
    x
}

/// Dimension of the null space of `m` by SVD with the given relative cutoff.
pub fn null_dim(m: &DMatrix<f64>, rel: f64, scale: f64) -> usize {
    let s = m.clone().svd(false, false);
    s.singular_values.iter().filter(|&&v| v < rel * scale.max(1.0)).count()
}

pub fn dv(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

/// Six-agent topology consistent with every state vector of the worked
/// polarisation / clustering example: `L x̄ = b`, `L x_f = b + u`, and the
/// conserved quantity of `x₀` shared by `x̄` and `x_f`. Nodes {1,2,3,4,6}
/// form the sink component; node 5 listens to node 1 only.
pub fn six_agent_graph() -> Graph {
    Graph::from_triples(
        6,
        &[
            (1, 2, 453.0 / 640.0),
            (1, 3, 187.0 / 640.0),
            (1, 6, 453.0 / 3200.0),
            (2, 4, 1.0),
            (3, 1, 3653.0 / 6900.0),
            (3, 4, 539.0 / 1380.0),
            (3, 6, 0.08),
            (4, 2, 1.0),
            (4, 6, 1.0),
            (5, 1, 1.0),
            (6, 3, 1.0),
        ],
    )
    .unwrap()
}

pub const SIX_X0: [f64; 6] = [-6.0, 4.0, -5.0, 5.0, 2.0, 0.0];
pub const SIX_BIAS: [f64; 6] = [-20.0, 20.0, 20.0, -20.0, 20.0, -20.0];
pub const SIX_X_BAR: [f64; 6] = [-10.0, 10.0, 10.0, -10.0, 10.0, -10.0];
pub const SIX_U: [f64; 6] = [0.0, -5.0, -2.0, -20.0, 0.0, 25.0];
pub const SIX_X_F: [f64; 6] = [-14.0, 1.0, 6.0, -14.0, 6.0, 11.0];
