//! Reference implementations used as oracles by the integration tests.
//! Nothing here calls into the solver under test.

#![allow(dead_code)]

use dressfp::Graph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense fixed-point iteration run until the values stop changing in f64.
/// Returns the full symmetric matrix; entries off the loop-augmented edge set are 0.
pub fn dense_dress(g: &Graph, init: f64) -> Vec<Vec<f64>> {
    let n = g.n();
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|u| (0..n).map(|v| u == v || g.has_edge(u, v)).collect())
        .collect();
    let mut d: Vec<Vec<f64>> = adj
        .iter()
        .map(|row| row.iter().map(|&a| if a { init } else { 0.0 }).collect())
        .collect();
    for _ in 0..10_000 {
        let norm: Vec<f64> = d.iter().map(|row| row.iter().sum::<f64>().sqrt()).collect();
        let mut next = vec![vec![0.0; n]; n];
        let mut delta: f64 = 0.0;
        for u in 0..n {
            for v in 0..n {
                if !adj[u][v] {
                    continue;
                }
                let s: f64 = (0..n)
                    .filter(|&x| adj[u][x] && adj[x][v])
                    .map(|x| d[u][x] + d[x][v])
                    .sum();
                next[u][v] = s / (norm[u] * norm[v]);
                delta = delta.max((next[u][v] - d[u][v]).abs());
            }
        }
        d = next;
        if delta < 1e-15 {
            break;
        }
    }
    d
}

/// Sorted non-loop values of the dense reference.
pub fn dense_fingerprint(g: &Graph) -> Vec<f64> {
    let d = dense_dress(g, 1.0);
    let mut v: Vec<f64> = g.edges().map(|(a, b)| d[a][b]).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Reference vertex-deletion fingerprint for k = 1 built on the dense solver.
pub fn dense_delta1(g: &Graph) -> Vec<f64> {
    let mut all = Vec::new();
    for x in 0..g.n() {
        let keep: Vec<usize> = (0..g.n()).filter(|&v| v != x).collect();
        let sub = Graph::from_edges(
            keep.len(),
            g.edges()
                .filter(|&(a, b)| a != x && b != x)
                .map(|(a, b)| (a - (a > x) as usize, b - (b > x) as usize)),
        )
        .unwrap();
        all.extend(dense_fingerprint(&sub));
    }
    all.sort_by(f64::total_cmp);
    all
}

/// Real root of `p^3 + p^2 - 2p - 4` in `[1, 2]` by bisection.
pub fn path3_root() -> f64 {
    let f = |p: f64| p * p * p + p * p - 2.0 * p - 4.0;
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn random_graph(rng: &mut ChaCha8Rng, max_n: usize) -> Graph {
    let n = rng.gen_range(1..=max_n);
    let p: f64 = rng.gen_range(0.1..0.9);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exhaustive isomorphism test for tiny graphs.
pub fn brute_force_isomorphic(a: &Graph, b: &Graph) -> bool {
    use itertools::Itertools;
    if a.n() != b.n() || a.m() != b.m() || a.degree_sequence() != b.degree_sequence() {
        return false;
    }
    let n = a.n();
    (0..n)
        .permutations(n)
        .any(|p| a.edges().all(|(u, v)| b.has_edge(p[u], p[v])))
}
