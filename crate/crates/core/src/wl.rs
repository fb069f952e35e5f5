//! Reference Weisfeiler–Leman distinguishers.
//!
//! Two graphs are refined side by side with one shared color dictionary, so
//! color ids are comparable across them. Each round, every vertex or tuple
//! gets the signature `(old color, payload)`; the distinct signatures of the
//! round are sorted and numbered densely, which makes ids canonical.
//!
//! Naming follows the usual split between the oblivious and folklore
//! variants: `Folklore(k)` has the power of `Oblivious(k + 1)`. So the
//! classical "3-WL" is `Oblivious(3)` ≡ `Folklore(2)` and "3-FWL" (≡ 4-WL) is
//! `Folklore(3)`.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default cap on the tuple table size `n^k` of one graph.
pub const DEFAULT_TUPLE_CAP: usize = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum WlMethod {
    /// Color refinement on vertices.
    OneWl,
    /// Oblivious k-WL on ordered k-tuples, `k ∈ {2, 3}`.
    Oblivious(usize),
    /// Folklore k-WL on ordered k-tuples, `k ∈ {2, 3}`.
    Folklore(usize),
}

impl fmt::Display for WlMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WlMethod::OneWl => write!(f, "1wl"),
            WlMethod::Oblivious(k) => write!(f, "{k}wl"),
            WlMethod::Folklore(k) => write!(f, "{k}fwl"),
        }
    }
}

impl FromStr for WlMethod {
    type Err = Error;

    /// Accepts `1wl`, `2wl`, `3wl` (oblivious), `2fwl`, `3fwl` (folklore).
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let m = match lower.as_str() {
            "1wl" => WlMethod::OneWl,
            "2wl" => WlMethod::Oblivious(2),
            "3wl" => WlMethod::Oblivious(3),
            "2fwl" => WlMethod::Folklore(2),
            "3fwl" => WlMethod::Folklore(3),
            _ => return Err(Error::UnsupportedMethod(s.to_string())),
        };
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WlVerdict {
    Distinguished,
    Indistinguishable,
}

impl fmt::Display for WlVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WlVerdict::Distinguished => "DISTINGUISHED",
            WlVerdict::Indistinguishable => "INDISTINGUISHABLE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct WlOutcome {
    pub verdict: WlVerdict,
    /// Refinement rounds executed.
    pub rounds: usize,
    /// False when the run stopped early because the histograms already differed.
    pub stable: bool,
    /// Number of joint color classes at the end.
    pub classes: usize,
}

/// Colors of both graphs after some round, ids shared.
#[derive(Debug, Clone)]
pub struct ColoringState {
    pub arity: usize,
    pub colors: [Vec<u32>; 2],
    pub round: usize,
    pub stable: bool,
}

impl ColoringState {
    fn classes(&self) -> usize {
        let mut all: Vec<u32> = self.colors[0]
            .iter()
            .chain(&self.colors[1])
            .copied()
            .collect();
        all.sort_unstable();
        all.dedup();
        all.len()
    }

    fn histograms_differ(&self) -> bool {
        let hist = |c: &[u32]| {
            let mut h = c.to_vec();
            h.sort_unstable();
            h
        };
        hist(&self.colors[0]) != hist(&self.colors[1])
    }
}

pub fn wl_distinguish(g1: &Graph, g2: &Graph, method: WlMethod) -> Result<WlOutcome> {
    wl_distinguish_capped(g1, g2, method, DEFAULT_TUPLE_CAP)
}

/// As [`wl_distinguish`] with an explicit tuple-table cap.
pub fn wl_distinguish_capped(
    g1: &Graph,
    g2: &Graph,
    method: WlMethod,
    tuple_cap: usize,
) -> Result<WlOutcome> {
    if g1.n() == 0 || g2.n() == 0 {
        return Err(Error::InvalidParameters {
            family: "wl".into(),
            reason: "both graphs must be non-empty".into(),
        });
    }
    let graphs = [g1, g2];
    let k = match method {
        WlMethod::OneWl => 1,
        WlMethod::Oblivious(k) | WlMethod::Folklore(k) => {
            if !(2..=3).contains(&k) {
                return Err(Error::UnsupportedMethod(method.to_string()));
            }
            k
        }
    };
    let n_max = g1.n().max(g2.n());
    let table = n_max.checked_pow(k as u32).unwrap_or(usize::MAX);
    if table > tuple_cap {
        return Err(Error::MemoryGuard {
            n: n_max,
            k,
            cap: tuple_cap,
        });
    }

    let mut state = match method {
        WlMethod::OneWl => ColoringState {
            arity: 1,
            colors: [vec![0; g1.n()], vec![0; g2.n()]],
            round: 0,
            stable: false,
        },
        _ => initial_tuple_coloring(graphs, k),
    };
    if state.histograms_differ() {
        return Ok(finish(&state, WlVerdict::Distinguished));
    }
    let mut classes = state.classes();
    let round_cap = n_max * n_max;
    loop {
        let next = match method {
            WlMethod::OneWl => refine_vertices(graphs, &state),
            WlMethod::Oblivious(_) => refine_tuples(graphs, &state, obl_payload),
            WlMethod::Folklore(_) => refine_tuples(graphs, &state, fwl_payload),
        };
        let next_classes = next.classes();
        state = next;
        if next_classes == classes {
            state.stable = true;
            let verdict = if state.histograms_differ() {
                WlVerdict::Distinguished
            } else {
                WlVerdict::Indistinguishable
            };
            return Ok(finish(&state, verdict));
        }
        classes = next_classes;
        if state.histograms_differ() {
            return Ok(finish(&state, WlVerdict::Distinguished));
        }
        assert!(
            state.round <= round_cap,
            "refinement failed to stabilize within n^2 rounds"
        );
    }
}

fn finish(state: &ColoringState, verdict: WlVerdict) -> WlOutcome {
    WlOutcome {
        verdict,
        rounds: state.round,
        stable: state.stable,
        classes: state.classes(),
    }
}

/// Assigns dense ids to signatures in sorted signature order. The dictionary
/// is shared across both graphs.
fn canonicalize<S: Ord + Hash + Clone>(sigs: [Vec<S>; 2]) -> [Vec<u32>; 2] {
    let mut temp: HashMap<S, u32> = HashMap::new();
    let mut keys: Vec<S> = Vec::new();
    let ids: Vec<Vec<u32>> = sigs
        .into_iter()
        .map(|side| {
            side.into_iter()
                .map(|s| {
                    *temp.entry(s.clone()).or_insert_with(|| {
                        keys.push(s);
                        (keys.len() - 1) as u32
                    })
                })
                .collect()
        })
        .collect();
    let mut order: Vec<u32> = (0..keys.len() as u32).collect();
    order.sort_by(|&a, &b| keys[a as usize].cmp(&keys[b as usize]));
    let mut rank = vec![0u32; keys.len()];
    for (r, &t) in order.iter().enumerate() {
        rank[t as usize] = r as u32;
    }
    let mut it = ids.into_iter();
    let remap = |v: Vec<u32>| v.into_iter().map(|t| rank[t as usize]).collect();
    [remap(it.next().unwrap()), remap(it.next().unwrap())]
}

fn refine_vertices(graphs: [&Graph; 2], state: &ColoringState) -> ColoringState {
    let sigs = [0, 1].map(|side| {
        let g = graphs[side];
        let c = &state.colors[side];
        (0..g.n())
            .map(|u| {
                let mut nb: Vec<u32> = g.neighbors(u).iter().map(|&v| c[v]).collect();
                nb.sort_unstable();
                (c[u], nb)
            })
            .collect::<Vec<_>>()
    });
    ColoringState {
        arity: 1,
        colors: canonicalize(sigs),
        round: state.round + 1,
        stable: false,
    }
}

/// Index arithmetic for ordered k-tuples over `0..n`, first position most
/// significant.
#[derive(Clone, Copy)]
struct TupleSpace {
    n: usize,
    k: usize,
}

impl TupleSpace {
    fn len(&self) -> usize {
        self.n.pow(self.k as u32)
    }

    fn stride(&self, pos: usize) -> usize {
        self.n.pow((self.k - 1 - pos) as u32)
    }

    fn digit(&self, t: usize, pos: usize) -> usize {
        (t / self.stride(pos)) % self.n
    }

    fn replace(&self, t: usize, pos: usize, w: usize) -> usize {
        let s = self.stride(pos);
        t - self.digit(t, pos) * s + w * s
    }
}

fn initial_tuple_coloring(graphs: [&Graph; 2], k: usize) -> ColoringState {
    let sigs = [0, 1].map(|side| {
        let g = graphs[side];
        let space = TupleSpace { n: g.n(), k };
        (0..space.len())
            .map(|t| {
                let v: Vec<usize> = (0..k).map(|p| space.digit(t, p)).collect();
                let mut code = 0u32;
                for i in 0..k {
                    for j in (i + 1)..k {
                        code = (code << 2)
                            | ((v[i] == v[j]) as u32) << 1
                            | g.has_edge(v[i], v[j]) as u32;
                    }
                }
                code
            })
            .collect::<Vec<_>>()
    });
    ColoringState {
        arity: k,
        colors: canonicalize(sigs),
        round: 0,
        stable: false,
    }
}

type Payload = Vec<[u32; 3]>;

/// Oblivious update: per position, the sorted colors over all substitutions.
fn obl_payload(space: TupleSpace, c: &[u32], t: usize) -> Payload {
    let mut out = Vec::with_capacity(space.k * space.n);
    for pos in 0..space.k {
        let mut col: Vec<u32> = (0..space.n).map(|w| c[space.replace(t, pos, w)]).collect();
        col.sort_unstable();
        out.extend(col.into_iter().map(|x| [pos as u32, x, 0]));
    }
    out
}

/// Folklore update: one sorted multiset of color vectors, one per substitute `w`.
fn fwl_payload(space: TupleSpace, c: &[u32], t: usize) -> Payload {
    let mut out: Payload = (0..space.n)
        .map(|w| {
            let mut e = [0u32; 3];
            for (pos, slot) in e.iter_mut().enumerate().take(space.k) {
                *slot = c[space.replace(t, pos, w)];
            }
            e
        })
        .collect();
    out.sort_unstable();
    out
}

fn refine_tuples(
    graphs: [&Graph; 2],
    state: &ColoringState,
    payload: fn(TupleSpace, &[u32], usize) -> Payload,
) -> ColoringState {
    let k = state.arity;
    let sigs = [0, 1].map(|side| {
        let space = TupleSpace {
            n: graphs[side].n(),
            k,
        };
        let c = &state.colors[side];
        (0..space.len())
            .into_par_iter()
            .map(|t| (c[t], payload(space, c, t)))
            .collect::<Vec<_>>()
    });
    ColoringState {
        arity: k,
        colors: canonicalize(sigs),
        round: state.round + 1,
        stable: false,
    }
}

/// True iff color refinement leaves a strongly regular graph with one class.
pub fn srg_1wl_check(g: &Graph) -> Result<bool> {
    if g.srg_parameters().is_none() {
        return Err(Error::InvalidParameters {
            family: "srg_1wl_check".into(),
            reason: "graph is not strongly regular".into(),
        });
    }
    let mut state = ColoringState {
        arity: 1,
        colors: [vec![0; g.n()], Vec::new()],
        round: 0,
        stable: false,
    };
    let empty = Graph::empty(0);
    loop {
        let next = refine_vertices([g, &empty], &state);
        if next.classes() == state.classes() {
            return Ok(next.classes() == 1);
        }
        state = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete_bipartite, cycle, path, petersen, prism, rook, shrikhande};

    #[test]
    fn tuple_space_indexing() {
        let s = TupleSpace { n: 5, k: 3 };
        let t = 2 * 25 + 3 * 5 + 4;
        assert_eq!((s.digit(t, 0), s.digit(t, 1), s.digit(t, 2)), (2, 3, 4));
        assert_eq!(s.replace(t, 1, 0), 2 * 25 + 4);
    }

    #[test]
    fn one_wl_fails_on_regular_pair() {
        let out = wl_distinguish(&prism(3), &complete_bipartite(3, 3), WlMethod::OneWl).unwrap();
        assert_eq!(out.verdict, WlVerdict::Indistinguishable);
        assert!(out.stable);
    }

    #[test]
    fn one_wl_separates_path_from_star() {
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let out = wl_distinguish(&path(4), &star, WlMethod::OneWl).unwrap();
        assert_eq!(out.verdict, WlVerdict::Distinguished);
    }

    #[test]
    fn two_fwl_sees_triangles() {
        // prism has triangles, K3,3 does not
        for m in [WlMethod::Folklore(2), WlMethod::Oblivious(3)] {
            let out = wl_distinguish(&prism(3), &complete_bipartite(3, 3), m).unwrap();
            assert_eq!(out.verdict, WlVerdict::Distinguished, "{m}");
        }
    }

    #[test]
    fn oblivious_two_equals_one_wl_on_regular() {
        let two_c4 = cycle(4).disjoint_union(&cycle(4));
        let out = wl_distinguish(&two_c4, &cycle(8), WlMethod::Oblivious(2)).unwrap();
        assert_eq!(out.verdict, WlVerdict::Indistinguishable);
        let out = wl_distinguish(&two_c4, &cycle(8), WlMethod::Folklore(2)).unwrap();
        assert_eq!(out.verdict, WlVerdict::Distinguished);
    }

    #[test]
    fn memory_guard_trips() {
        let g = cycle(50);
        assert!(matches!(
            wl_distinguish_capped(&g, &g, WlMethod::Folklore(3), 1000),
            Err(Error::MemoryGuard {
                n: 50,
                k: 3,
                cap: 1000
            })
        ));
    }

    #[test]
    fn rejects_unsupported_arity() {
        let g = cycle(5);
        assert!(wl_distinguish(&g, &g, WlMethod::Folklore(4)).is_err());
        assert!(wl_distinguish(&g, &g, WlMethod::Oblivious(1)).is_err());
        assert!("4fwl".parse::<WlMethod>().is_err());
        assert_eq!("3FWL".parse::<WlMethod>().unwrap(), WlMethod::Folklore(3));
    }

    #[test]
    fn srg_single_class() {
        assert!(srg_1wl_check(&petersen()).unwrap());
        assert!(srg_1wl_check(&shrikhande()).unwrap());
        assert!(srg_1wl_check(&rook(4)).unwrap());
        assert!(srg_1wl_check(&path(3)).is_err());
    }

    #[test]
    fn different_sizes_are_distinguished_immediately() {
        let out = wl_distinguish(&cycle(5), &cycle(6), WlMethod::OneWl).unwrap();
        assert_eq!(out.verdict, WlVerdict::Distinguished);
        assert_eq!(out.rounds, 0);
    }
}
