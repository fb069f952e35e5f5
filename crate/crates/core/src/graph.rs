//! Simple undirected graphs on vertices `0..n`.
//!
//! Adjacency lists are kept sorted ascending, which the solver relies on for
//! merge-based neighborhood intersection and a fixed summation order.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A simple undirected graph. No self-loops, no parallel edges.
#[derive(Clone, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
    name: Option<String>,
}

/// Parameters `(n, d, lambda, mu)` of a strongly regular graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SrgParams {
    pub n: usize,
    pub d: usize,
    pub lambda: usize,
    pub mu: usize,
}

impl fmt::Display for SrgParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SRG({},{},{},{})", self.n, self.d, self.lambda, self.mu)
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            m: 0,
            name: None,
        }
    }

    /// Builds a graph from an edge list. Duplicate edges (in either
    /// orientation) are merged; self-loops and out-of-range endpoints are
    /// rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { index: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &set {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            adj,
            m: set.len(),
            name: None,
        })
    }

    /// Builds a graph from an adjacency predicate evaluated on every pair `u < v`.
    pub fn from_predicate(n: usize, mut adjacent: impl FnMut(usize, usize) -> bool) -> Self {
        let mut adj = vec![Vec::new(); n];
        let mut m = 0;
        for u in 0..n {
            for v in (u + 1)..n {
                if adjacent(u, v) {
                    adj[u].push(v);
                    adj[v].push(u);
                    m += 1;
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { adj, m, name: None }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn set_name(&mut self, name: Option<String>) {
        self.name = name;
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Closed neighborhood `N[u] = N(u) ∪ {u}`, ascending.
    pub fn closed_neighborhood(&self, u: usize) -> Vec<usize> {
        let list = &self.adj[u];
        let pos = list.partition_point(|&x| x < u);
        let mut out = Vec::with_capacity(list.len() + 1);
        out.extend_from_slice(&list[..pos]);
        out.push(u);
        out.extend_from_slice(&list[pos..]);
        out
    }

    /// Sorted degree sequence.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        d.sort_unstable();
        d
    }

    /// Number of common neighbors of `u` and `v`.
    pub fn common_neighbors(&self, u: usize, v: usize) -> usize {
        let (a, b) = (&self.adj[u], &self.adj[v]);
        let (mut i, mut j, mut c) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    c += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        c
    }

    /// Induced subgraph on the vertices not in `removed`. Survivors are
    /// re-indexed contiguously in ascending original order.
    pub fn induced_delete(&self, removed: &[usize]) -> Result<Graph> {
        let n = self.n();
        let mut gone = vec![false; n];
        for &s in removed {
            if s >= n {
                return Err(Error::VertexOutOfRange { index: s, n });
            }
            gone[s] = true;
        }
        Ok(self.delete_mask(&gone))
    }

    pub(crate) fn delete_mask(&self, gone: &[bool]) -> Graph {
        const NONE: usize = usize::MAX;
        let mut index = vec![NONE; self.n()];
        let mut next = 0;
        for (u, &g) in gone.iter().enumerate() {
            if !g {
                index[u] = next;
                next += 1;
            }
        }
        let mut adj = Vec::with_capacity(next);
        let mut m = 0;
        for (u, list) in self.adj.iter().enumerate() {
            if gone[u] {
                continue;
            }
            // ascending original order is preserved by the monotone re-index
            let row: Vec<usize> = list
                .iter()
                .filter(|&&v| !gone[v])
                .map(|&v| index[v])
                .collect();
            m += row.len();
            adj.push(row);
        }
        Graph {
            adj,
            m: m / 2,
            name: None,
        }
    }

    /// Complement graph on the same vertex set.
    pub fn complement(&self) -> Graph {
        Graph::from_predicate(self.n(), |u, v| !self.has_edge(u, v))
    }

    /// Relabels vertex `u` as `perm[u]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Graph> {
        let n = self.n();
        if perm.len() != n {
            return Err(Error::NotABijection {
                n,
                reason: format!("mapping has {} entries", perm.len()),
            });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::NotABijection {
                    n,
                    reason: format!("image {p} repeated or out of range"),
                });
            }
            seen[p] = true;
        }
        let mut adj = vec![Vec::new(); n];
        for (u, list) in self.adj.iter().enumerate() {
            adj[perm[u]] = list.iter().map(|&v| perm[v]).collect();
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            adj,
            m: self.m,
            name: self.name.clone(),
        })
    }

    /// Disjoint union; the vertices of `other` follow those of `self`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.n();
        let mut adj = self.adj.clone();
        adj.extend(
            other
                .adj
                .iter()
                .map(|list| list.iter().map(|&v| v + off).collect::<Vec<_>>()),
        );
        Graph {
            adj,
            m: self.m + other.m,
            name: None,
        }
    }

    /// Cartesian product; vertex `(a, b)` has index `a * other.n() + b`.
    pub fn cartesian_product(&self, other: &Graph) -> Graph {
        let (n1, n2) = (self.n(), other.n());
        Graph::from_predicate(n1 * n2, |x, y| {
            let (a1, b1) = (x / n2, x % n2);
            let (a2, b2) = (y / n2, y % n2);
            (a1 == a2 && other.has_edge(b1, b2)) || (b1 == b2 && self.has_edge(a1, a2))
        })
    }

    /// Returns `(n, d, lambda, mu)` if the graph is strongly regular.
    ///
    /// Both an adjacent and a non-adjacent pair must exist, so complete and
    /// edgeless graphs are rejected.
    pub fn srg_parameters(&self) -> Option<SrgParams> {
        let n = self.n();
        let d = self.adj.first()?.len();
        if self.adj.iter().any(|l| l.len() != d) {
            return None;
        }
        let (mut lambda, mut mu) = (None, None);
        for u in 0..n {
            for v in (u + 1)..n {
                let c = self.common_neighbors(u, v);
                let slot = if self.has_edge(u, v) {
                    &mut lambda
                } else {
                    &mut mu
                };
                match *slot {
                    None => *slot = Some(c),
                    Some(prev) if prev != c => return None,
                    _ => {}
                }
            }
        }
        Some(SrgParams {
            n,
            d,
            lambda: lambda?,
            mu: mu?,
        })
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }
}

impl PartialEq for Graph {
    /// Labeled equality; names are ignored.
    fn eq(&self, other: &Self) -> bool {
        self.adj == other.adj
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("Graph");
        if let Some(name) = &self.name {
            s.field("name", name);
        }
        s.field("n", &self.n())
            .field("m", &self.m)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}
