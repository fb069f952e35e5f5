//! The DRESS edge dynamics.
//!
//! Every vertex carries an implicit self-loop. With `N[u]` the closed
//! neighborhood and `‖u‖ = sqrt(Σ_{x ∈ N[u]} d_ux)`, one synchronous step sets
//!
//! ```text
//! d'_uv = Σ_{x ∈ N[u] ∩ N[v]} (d_ux + d_xv) / (‖u‖ · ‖v‖)
//! ```
//!
//! for every loop and every edge, using only values from the previous step.
//! All sums run over `x` in ascending vertex order, so results are
//! bit-for-bit reproducible.

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_INIT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolverConfig {
    /// Stop once the L∞ change over all edge values drops below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial value of every edge and loop.
    pub init: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            init: DEFAULT_INIT,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if !(self.init > 0.0 && self.init.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "init must be positive, got {}",
                self.init
            )));
        }
        Ok(())
    }
}

/// Converged values on the loop-augmented graph.
#[derive(Debug, Clone)]
pub struct EdgeValues {
    /// `(u, v)` with `u <= v`, lexicographic; loops appear as `(u, u)`.
    pub edges: Vec<(usize, usize)>,
    pub values: Vec<f64>,
    pub iterations: usize,
    pub final_residual: f64,
}

impl EdgeValues {
    pub fn loop_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges
            .iter()
            .zip(&self.values)
            .filter(|((u, v), _)| u == v)
            .map(|(_, &d)| d)
    }

    pub fn edge_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges
            .iter()
            .zip(&self.values)
            .filter(|((u, v), _)| u != v)
            .map(|(_, &d)| d)
    }

    pub fn value(&self, u: usize, v: usize) -> Option<f64> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok().map(|i| self.values[i])
    }

    /// Sorted non-loop values.
    pub fn fingerprint(&self) -> Fingerprint {
        let mut values: Vec<f64> = self.edge_values().collect();
        values.sort_by(f64::total_cmp);
        Fingerprint { values }
    }
}

/// Ascending non-loop edge values of one converged graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint {
    pub values: Vec<f64>,
}

impl Fingerprint {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Augmented adjacency in CSR form: for every vertex, its closed
/// neighborhood ascending, paired with the id of the augmented edge.
struct Augmented {
    start: Vec<usize>,
    nbr: Vec<usize>,
    eid: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl Augmented {
    fn new(g: &Graph) -> Self {
        let n = g.n();
        let mut edges = Vec::with_capacity(n + g.m());
        for u in 0..n {
            edges.push((u, u));
            edges.extend(g.neighbors(u).iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        // edges are already lexicographic: (u,u) precedes (u,v) for v > u
        let mut start = Vec::with_capacity(n + 1);
        let mut nbr = Vec::with_capacity(n + 2 * g.m());
        let mut eid = Vec::with_capacity(n + 2 * g.m());
        start.push(0);
        for u in 0..n {
            for x in g.closed_neighborhood(u) {
                let key = (u.min(x), u.max(x));
                nbr.push(x);
                eid.push(edges.binary_search(&key).expect("edge present"));
            }
            start.push(nbr.len());
        }
        Augmented {
            start,
            nbr,
            eid,
            edges,
        }
    }

    fn row(&self, u: usize) -> (&[usize], &[usize]) {
        let r = self.start[u]..self.start[u + 1];
        (&self.nbr[r.clone()], &self.eid[r])
    }
}

/// Runs the synchronous iteration to its fixed point.
pub fn dress_converge(g: &Graph, cfg: &SolverConfig) -> Result<EdgeValues> {
    cfg.validate()?;
    let n = g.n();
    if n == 0 {
        return Ok(EdgeValues {
            edges: Vec::new(),
            values: Vec::new(),
            iterations: 0,
            final_residual: 0.0,
        });
    }
    let aug = Augmented::new(g);
    let mut cur = vec![cfg.init; aug.edges.len()];
    let mut next = vec![0.0; aug.edges.len()];
    let mut norm = vec![0.0; n];
    let mut residual = f64::INFINITY;

    for iter in 1..=cfg.max_iter {
        for (u, slot) in norm.iter_mut().enumerate() {
            let (_, ids) = aug.row(u);
            let s: f64 = ids.iter().map(|&e| cur[e]).sum();
            *slot = s.sqrt();
        }
        residual = 0.0;
        for (e, &(u, v)) in aug.edges.iter().enumerate() {
            let (nu, eu) = aug.row(u);
            let (nv, ev) = aug.row(v);
            let (mut i, mut j) = (0, 0);
            let mut num = 0.0;
            while i < nu.len() && j < nv.len() {
                match nu[i].cmp(&nv[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        num += cur[eu[i]] + cur[ev[j]];
                        i += 1;
                        j += 1;
                    }
                }
            }
            let d = num / (norm[u] * norm[v]);
            residual = f64::max(residual, (d - cur[e]).abs());
            next[e] = d;
        }
        std::mem::swap(&mut cur, &mut next);
        if residual < cfg.tol {
            return Ok(EdgeValues {
                edges: aug.edges,
                values: cur,
                iterations: iter,
                final_residual: residual,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: cfg.max_iter,
        residual,
    })
}

/// Sorted non-loop values of a converged run.
pub fn extract_fingerprint(ev: &EdgeValues) -> Fingerprint {
    ev.fingerprint()
}
