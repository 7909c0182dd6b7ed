//! Shared oracles for the integration tests.
//!
//! Everything here recomputes model quantities from their defining
//! formulas with deliberately different machinery than the library (BFS
//! components instead of union-find, linear-domain products, rescanning
//! predecessor searches), so agreement is meaningful.
#![allow(dead_code)] // each test target uses its own subset

use fkmc::{EdgeSet, ExactDistribution, Graph, RandomTape, RcParams};

/// Linear-domain random-cluster weight with BFS components.
pub fn brute_weight(g: &Graph, params: &RcParams, s: &EdgeSet) -> f64 {
    let n = g.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for e in s.iter() {
        let (u, v) = g.edge(e);
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut w = 1.0;
    for e in 0..g.edge_count() {
        w *= if s.contains(e) {
            params.p()[e]
        } else {
            1.0 - params.p()[e]
        };
    }
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut prod = 1.0;
        while let Some(v) = stack.pop() {
            prod *= params.lambda()[v];
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        w *= 1.0 + prod;
    }
    w
}

pub fn brute_log_weight(g: &Graph, params: &RcParams, s: &EdgeSet) -> f64 {
    brute_weight(g, params, s).ln()
}

/// Exact distribution by direct linear-domain normalization.
pub fn brute_distribution(g: &Graph, params: &RcParams) -> Vec<f64> {
    let m = g.edge_count();
    assert!(m <= 20);
    let weights: Vec<f64> = (0..(1u64 << m))
        .map(|idx| brute_weight(g, params, &EdgeSet::from_index(m, idx)))
        .collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Conditional marginal as the literal weight ratio.
pub fn brute_marginal(g: &Graph, params: &RcParams, s: &EdgeSet, e: usize) -> f64 {
    let mut on = s.clone();
    on.set(e, true);
    let mut off = s.clone();
    off.set(e, false);
    let w_on = brute_weight(g, params, &on);
    let w_off = brute_weight(g, params, &off);
    w_on / (w_on + w_off)
}

/// Textbook round-synchronous simulation: full recomputation each round,
/// predecessors by rescanning, marginals from brute weights.
pub fn naive_parallel_rc(
    g: &Graph,
    params: &RcParams,
    tape: &RandomTape,
    t_pa: usize,
) -> (EdgeSet, Option<usize>, Vec<usize>) {
    let t = tape.steps();
    let m = g.edge_count();
    let pred = |i: usize, e: usize| -> usize {
        (1..i)
            .rev()
            .find(|&j| tape.sites[j - 1] as usize == e)
            .unwrap_or(0)
    };
    let mut y_prev: Vec<bool> = (1..=t)
        .map(|i| tape.initial.contains(tape.sites[i - 1] as usize))
        .collect();
    let mut stabilization = None;
    let mut diffs = Vec::new();
    for round in 1..=t_pa {
        let mut y_next = vec![false; t];
        for i in 1..=t {
            let mut sigma = EdgeSet::empty(m);
            for e in 0..m {
                let j = pred(i, e);
                let bit = if j == 0 {
                    tape.initial.contains(e)
                } else {
                    y_prev[j - 1]
                };
                sigma.set(e, bit);
            }
            let mu = brute_marginal(g, params, &sigma, tape.sites[i - 1] as usize);
            y_next[i - 1] = tape.uniforms[i - 1] < mu;
        }
        let d = y_next.iter().zip(&y_prev).filter(|(a, b)| a != b).count();
        diffs.push(d);
        if d == 0 && stabilization.is_none() {
            stabilization = Some(round);
        }
        y_prev = y_next;
    }
    let mut out = EdgeSet::empty(m);
    for e in 0..m {
        let j = (1..=t)
            .rev()
            .find(|&j| tape.sites[j - 1] as usize == e)
            .unwrap_or(0);
        let bit = if j == 0 {
            tape.initial.contains(e)
        } else {
            y_prev[j - 1]
        };
        out.set(e, bit);
    }
    (out, stabilization, diffs)
}

pub fn triangle() -> Graph {
    Graph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap()
}

pub fn path(n: usize) -> Graph {
    Graph::new(n, (0..n - 1).map(|i| (i, i + 1)).collect()).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect()).unwrap()
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((u, v));
        }
    }
    Graph::new(n, edges).unwrap()
}

/// A multigraph with a parallel pair and a self-loop.
pub fn multigraph() -> Graph {
    Graph::new(3, vec![(0, 1), (0, 1), (1, 2), (2, 2)]).unwrap()
}

pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

#[allow(dead_code)]
pub fn tv(a: &[f64], b: &[f64]) -> f64 {
    l1_distance(a, b) / 2.0
}

/// Multiplies a distribution row vector into a transition matrix.
pub fn row_times_matrix(mu: &[f64], p: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; mu.len()];
    for (x, &mx) in mu.iter().enumerate() {
        for (y, v) in out.iter_mut().enumerate() {
            *v += mx * p[x][y];
        }
    }
    out
}

#[allow(dead_code)]
pub fn exact_from(probs: Vec<f64>) -> ExactDistribution {
    ExactDistribution::from_probs(probs).unwrap()
}
