//! Deterministic generators for the constructed benchmark families.
//!
//! Every generator yields vertices `0..n` with no loops or duplicate edges.
//! Expressions of the form `cycle:8`, `kneser:5:2`, `cfi:K5:twisted`,
//! `union(cycle:4,cycle:4)` or `complement(prism)` parse into a
//! [`GeneratorSpec`]; the optional `gen:` prefix is accepted.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Pairing attempts allowed before `random_regular` gives up.
pub const RANDOM_REGULAR_RETRY_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    Cycle(usize),
    Path(usize),
    Complete(usize),
    CompleteBipartite(usize, usize),
    /// `C_k □ K_2`; the plain prism is `k = 3`.
    Prism(usize),
    Kneser(usize, usize),
    Johnson(usize, usize),
    Hamming(usize, usize),
    Paley(usize),
    Rook(usize),
    Shrikhande,
    Petersen,
    /// `0` is the triangular graph `T(8)`, `1..=3` its three Chang switchings.
    Chang(usize),
    DisjointUnion(Vec<GeneratorSpec>),
    ComplementOf(Box<GeneratorSpec>),
    Cfi {
        base: Box<GeneratorSpec>,
        twisted: bool,
    },
    RandomRegular {
        n: usize,
        d: usize,
        seed: u64,
    },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<Graph> {
        use GeneratorSpec::*;
        let g = match self {
            Cycle(n) => {
                require(*n >= 3, "cycle", "need n >= 3")?;
                cycle(*n)
            }
            Path(n) => {
                require(*n >= 1, "path", "need n >= 1")?;
                path(*n)
            }
            Complete(n) => complete(*n),
            CompleteBipartite(a, b) => complete_bipartite(*a, *b),
            Prism(k) => {
                require(*k >= 3, "prism", "need k >= 3")?;
                prism(*k)
            }
            Kneser(n, k) => {
                require(*k >= 1 && 2 * k <= *n, "kneser", "need 1 <= k and 2k <= n")?;
                kneser(*n, *k)
            }
            Johnson(n, k) => {
                require(*k >= 1 && *k < *n, "johnson", "need 1 <= k < n")?;
                johnson(*n, *k)
            }
            Hamming(d, q) => {
                require(*d >= 1 && *q >= 2, "hamming", "need d >= 1 and q >= 2")?;
                require(
                    (*q as f64).powi(*d as i32) <= 1e6,
                    "hamming",
                    "q^d too large",
                )?;
                hamming(*d, *q)
            }
            Paley(q) => {
                require(
                    is_prime(*q) && q % 4 == 1,
                    "paley",
                    "q must be a prime with q = 1 (mod 4); prime powers are unsupported",
                )?;
                paley(*q)
            }
            Rook(n) => {
                require(*n >= 2, "rook", "need n >= 2")?;
                rook(*n)
            }
            Shrikhande => shrikhande(),
            Petersen => petersen(),
            Chang(i) => {
                require(*i <= 3, "chang", "index must be 0..=3")?;
                chang(*i)
            }
            DisjointUnion(parts) => {
                require(!parts.is_empty(), "union", "need at least one part")?;
                let mut acc = Graph::empty(0);
                for p in parts {
                    acc = acc.disjoint_union(&p.generate()?);
                }
                acc
            }
            ComplementOf(inner) => inner.generate()?.complement(),
            Cfi { base, twisted } => {
                let (plain, tw) = cfi_pair(&base.generate()?)?;
                if *twisted {
                    tw
                } else {
                    plain
                }
            }
            RandomRegular { n, d, seed } => random_regular(*n, *d, *seed)?,
        };
        Ok(g.with_name(self.to_string()))
    }
}

fn require(ok: bool, family: &str, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameters {
            family: family.to_string(),
            reason: reason.to_string(),
        })
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GeneratorSpec::*;
        match self {
            Cycle(n) => write!(f, "cycle:{n}"),
            Path(n) => write!(f, "path:{n}"),
            Complete(n) => write!(f, "complete:{n}"),
            CompleteBipartite(a, b) => write!(f, "kbip:{a}:{b}"),
            Prism(3) => write!(f, "prism"),
            Prism(k) => write!(f, "prism:{k}"),
            Kneser(n, k) => write!(f, "kneser:{n}:{k}"),
            Johnson(n, k) => write!(f, "johnson:{n}:{k}"),
            Hamming(d, q) => write!(f, "hamming:{d}:{q}"),
            Paley(q) => write!(f, "paley:{q}"),
            Rook(n) => write!(f, "rook:{n}"),
            Shrikhande => write!(f, "shrikhande"),
            Petersen => write!(f, "petersen"),
            Chang(i) => write!(f, "chang:{i}"),
            DisjointUnion(parts) => write!(f, "union({})", parts.iter().join(",")),
            ComplementOf(inner) => write!(f, "complement({inner})"),
            Cfi { base, twisted } => {
                let b = match base.as_ref() {
                    Complete(n) => format!("K{n}"),
                    Cycle(n) => format!("C{n}"),
                    Path(n) => format!("P{n}"),
                    other => format!("({other})"),
                };
                write!(f, "cfi:{b}{}", if *twisted { ":twisted" } else { "" })
            }
            RandomRegular { n, d, seed } => write!(f, "rr:{n}:{d}:{seed}"),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_expr(s.trim().strip_prefix("gen:").unwrap_or(s.trim())).map_err(|reason| {
            Error::GeneratorSyntax {
                expr: s.to_string(),
                reason,
            }
        })
    }
}

fn parse_expr(s: &str) -> std::result::Result<GeneratorSpec, String> {
    use GeneratorSpec::*;
    if let Some(body) = strip_call(s, "union") {
        let parts = split_top_level(body)?
            .into_iter()
            .map(parse_expr)
            .collect::<std::result::Result<Vec<_>, _>>()?;
        return Ok(DisjointUnion(parts));
    }
    if let Some(body) = strip_call(s, "complement") {
        return Ok(ComplementOf(Box::new(parse_expr(body)?)));
    }
    if let Some(rest) = s.strip_prefix("cfi:") {
        let (base, twisted) = match rest.strip_suffix(":twisted") {
            Some(b) => (b, true),
            None => (rest, false),
        };
        return Ok(Cfi {
            base: Box::new(parse_cfi_base(base)?),
            twisted,
        });
    }
    let mut it = s.split(':');
    let family = it.next().unwrap_or_default();
    let params: Vec<u64> = it
        .map(|p| {
            p.parse::<u64>()
                .map_err(|_| format!("bad integer parameter {p:?}"))
        })
        .collect::<std::result::Result<_, _>>()?;
    let want = |k: usize| -> std::result::Result<Vec<usize>, String> {
        if params.len() == k {
            Ok(params.iter().map(|&p| p as usize).collect())
        } else {
            Err(format!(
                "{family} takes {k} parameter(s), got {}",
                params.len()
            ))
        }
    };
    Ok(match family {
        "cycle" => Cycle(want(1)?[0]),
        "path" => Path(want(1)?[0]),
        "complete" => Complete(want(1)?[0]),
        "kbip" | "complete_bipartite" => {
            let p = want(2)?;
            CompleteBipartite(p[0], p[1])
        }
        "prism" if params.is_empty() => Prism(3),
        "prism" => Prism(want(1)?[0]),
        "kneser" => {
            let p = want(2)?;
            Kneser(p[0], p[1])
        }
        "johnson" => {
            let p = want(2)?;
            Johnson(p[0], p[1])
        }
        "hamming" => {
            let p = want(2)?;
            Hamming(p[0], p[1])
        }
        "paley" => Paley(want(1)?[0]),
        "rook" => Rook(want(1)?[0]),
        "shrikhande" => {
            want(0)?;
            Shrikhande
        }
        "petersen" => {
            want(0)?;
            Petersen
        }
        "chang" => Chang(want(1)?[0]),
        "rr" | "random_regular" => {
            if params.len() != 3 {
                return Err("random_regular takes n:d:seed".into());
            }
            RandomRegular {
                n: params[0] as usize,
                d: params[1] as usize,
                seed: params[2],
            }
        }
        other => return Err(format!("unknown family {other:?}")),
    })
}

fn parse_cfi_base(s: &str) -> std::result::Result<GeneratorSpec, String> {
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        return parse_expr(inner);
    }
    let (tag, num) = s.split_at(s.len().min(1));
    let n: usize = num
        .parse()
        .map_err(|_| format!("cfi base must be K<n>, C<n>, P<n> or (expr), got {s:?}"))?;
    match tag {
        "K" => Ok(GeneratorSpec::Complete(n)),
        "C" => Ok(GeneratorSpec::Cycle(n)),
        "P" => Ok(GeneratorSpec::Path(n)),
        _ => Err(format!("unknown cfi base {s:?}")),
    }
}

fn strip_call<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')
}

fn split_top_level(s: &str) -> std::result::Result<Vec<&str>, String> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err("unbalanced parentheses".into());
        }
    }
    if depth != 0 {
        return Err("unbalanced parentheses".into());
    }
    parts.push(&s[start..]);
    Ok(parts)
}

pub fn cycle(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle needs n >= 3")
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
}

pub fn complete(n: usize) -> Graph {
    Graph::from_predicate(n, |_, _| true)
}

pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    Graph::from_predicate(a + b, |u, v| (u < a) != (v < a))
}

/// `C_k □ K_2`.
pub fn prism(k: usize) -> Graph {
    cycle(k).cartesian_product(&complete(2))
}

/// Kneser graph `K(n, k)`: `k`-subsets of `0..n`, adjacent when disjoint.
pub fn kneser(n: usize, k: usize) -> Graph {
    let sets: Vec<u64> = subset_masks(n, k);
    Graph::from_predicate(sets.len(), |i, j| sets[i] & sets[j] == 0)
}

/// Johnson graph `J(n, k)`: `k`-subsets, adjacent when they share `k - 1` elements.
pub fn johnson(n: usize, k: usize) -> Graph {
    let sets: Vec<u64> = subset_masks(n, k);
    Graph::from_predicate(sets.len(), |i, j| {
        (sets[i] & sets[j]).count_ones() as usize + 1 == k
    })
}

/// Seidel switching of `T(8) = J(8, 2)` with respect to the pairs forming a
/// perfect matching, an 8-cycle, or a triangle plus a pentagon on `0..8`.
/// Index 0 is `T(8)` itself. All four are SRG(28, 12, 6, 4).
pub fn chang(index: usize) -> Graph {
    let switch: &[(usize, usize)] = match index {
        0 => &[],
        1 => &[(0, 1), (2, 3), (4, 5), (6, 7)],
        2 => &[
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 5),
            (5, 6),
            (6, 7),
            (0, 7),
        ],
        3 => &[
            (0, 1),
            (1, 2),
            (0, 2),
            (3, 4),
            (4, 5),
            (5, 6),
            (6, 7),
            (3, 7),
        ],
        _ => panic!("chang index {index} out of range"),
    };
    let sets = subset_masks(8, 2);
    let in_s: Vec<bool> = sets
        .iter()
        .map(|&m| switch.iter().any(|&(a, b)| m == (1 << a) | (1 << b)))
        .collect();
    Graph::from_predicate(sets.len(), |i, j| {
        let adjacent = (sets[i] & sets[j]).count_ones() == 1;
        adjacent != (in_s[i] != in_s[j])
    })
}

fn subset_masks(n: usize, k: usize) -> Vec<u64> {
    assert!(n <= 64);
    (0..n)
        .combinations(k)
        .map(|c| c.iter().fold(0u64, |m, &i| m | (1 << i)))
        .collect()
}

/// Hamming graph `H(d, q)`: words of length `d` over `0..q`, adjacent at distance 1.
pub fn hamming(d: usize, q: usize) -> Graph {
    let n = q.pow(d as u32);
    let digits = |mut x: usize| {
        let mut out = vec![0; d];
        for slot in out.iter_mut() {
            *slot = x % q;
            x /= q;
        }
        out
    };
    let words: Vec<Vec<usize>> = (0..n).map(digits).collect();
    Graph::from_predicate(n, |i, j| {
        words[i]
            .iter()
            .zip(&words[j])
            .filter(|(a, b)| a != b)
            .count()
            == 1
    })
}

/// Paley graph on `Z_q` for a prime `q = 1 (mod 4)`.
pub fn paley(q: usize) -> Graph {
    let mut residue = vec![false; q];
    for x in 1..q {
        residue[x * x % q] = true;
    }
    Graph::from_predicate(q, |u, v| residue[(v - u) % q])
}

/// Rook graph `L_2(n) = K_n □ K_n`.
pub fn rook(n: usize) -> Graph {
    complete(n).cartesian_product(&complete(n))
}

/// Cayley graph on `Z_4 × Z_4` with connection set `{±(1,0), ±(0,1), ±(1,1)}`.
pub fn shrikhande() -> Graph {
    let conn = [(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)];
    Graph::from_predicate(16, |u, v| {
        let (da, db) = ((v / 4 + 4 - u / 4) % 4, (v % 4 + 4 - u % 4) % 4);
        conn.contains(&(da, db))
    })
}

pub fn petersen() -> Graph {
    kneser(5, 2)
}

/// Cai–Fürer–Immerman pair over a connected base graph.
///
/// Each base vertex of degree `d` becomes `2^(d-1)` gadget vertices, one per
/// even-size subset `S` of its incident edges. For a base edge `e = {u, v}`,
/// gadget vertices `(u, S)` and `(v, T)` are adjacent iff
/// `[e ∈ S] xor [e ∈ T] xor twist(e) = 0`. The twisted member flips the
/// lowest-indexed base edge. Returns `(untwisted, twisted)`.
pub fn cfi_pair(base: &Graph) -> Result<(Graph, Graph)> {
    if base.m() == 0 || !base.is_connected() {
        return Err(Error::InvalidParameters {
            family: "cfi".into(),
            reason: "base graph must be connected with at least one edge".into(),
        });
    }
    if base.max_degree() > 16 {
        return Err(Error::InvalidParameters {
            family: "cfi".into(),
            reason: "base degree above 16 gives oversized gadgets".into(),
        });
    }
    let n = base.n();
    let mut offset = Vec::with_capacity(n);
    let mut masks: Vec<Vec<u32>> = Vec::with_capacity(n);
    let mut total = 0;
    for v in 0..n {
        let d = base.degree(v) as u32;
        let even: Vec<u32> = (0..1u32 << d).filter(|s| s.count_ones() % 2 == 0).collect();
        offset.push(total);
        total += even.len();
        masks.push(even);
    }
    let build = |twist_first: bool| {
        let mut edges = Vec::new();
        for (idx, (u, v)) in base.edges().enumerate() {
            let pu = base.neighbors(u).binary_search(&v).unwrap();
            let pv = base.neighbors(v).binary_search(&u).unwrap();
            let twist = twist_first && idx == 0;
            for (i, &s) in masks[u].iter().enumerate() {
                for (j, &t) in masks[v].iter().enumerate() {
                    let bu = (s >> pu) & 1 == 1;
                    let bv = (t >> pv) & 1 == 1;
                    if (bu ^ bv) == twist {
                        edges.push((offset[u] + i, offset[v] + j));
                    }
                }
            }
        }
        Graph::from_edges(total, edges).expect("gadget indices are in range")
    };
    Ok((build(false), build(true)))
}

/// Random `d`-regular graph on `n` vertices from the pairing model,
/// rejecting pairings with loops or repeated edges.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d >= n || !(n * d).is_multiple_of(2) {
        return Err(Error::InvalidParameters {
            family: "random_regular".into(),
            reason: format!("need d < n and n*d even (n={n}, d={d})"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..n * d).map(|p| p / d.max(1)).collect();
    'attempt: for _ in 0..RANDOM_REGULAR_RETRY_CAP {
        points.shuffle(&mut rng);
        let mut seen = std::collections::HashSet::with_capacity(n * d / 2);
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
        }
        return Graph::from_edges(n, seen);
    }
    Err(Error::RejectionBudget {
        attempts: RANDOM_REGULAR_RETRY_CAP,
    })
}

pub(crate) fn is_prime(q: usize) -> bool {
    q >= 2
        && (2..)
            .take_while(|p| p * p <= q)
            .all(|p| !q.is_multiple_of(p))
}

/// A named family of constructed graphs, in a fixed order.
#[derive(Debug, Clone)]
pub struct Family {
    pub name: &'static str,
    pub graphs: Vec<Graph>,
}

/// Names accepted by [`constructed_family`].
pub const CONSTRUCTED_FAMILIES: &[&str] = &[
    "rook-shrikhande",
    "petersen-prism",
    "paley13",
    "rook5",
    "prism-k33",
    "2c4-c8",
    "paley",
    "rook",
    "kneser",
    "johnson",
    "hamming",
    "miyazaki",
    "chang",
    "complement",
    "random-regular",
];

/// Specs for one of the constructed families.
pub fn family_specs(name: &str) -> Result<Vec<GeneratorSpec>> {
    use GeneratorSpec::*;
    let specs = match name {
        "rook-shrikhande" => vec![Rook(4), Shrikhande],
        "petersen-prism" => vec![Petersen, Prism(5)],
        "paley13" => vec![Paley(13)],
        "rook5" => vec![Rook(5)],
        "prism-k33" => vec![Prism(3), CompleteBipartite(3, 3)],
        "2c4-c8" => vec![DisjointUnion(vec![Cycle(4), Cycle(4)]), Cycle(8)],
        "paley" => [5, 13, 17, 29, 37, 41, 53, 61, 73]
            .into_iter()
            .map(Paley)
            .collect(),
        "rook" => (3..=7).map(Rook).collect(),
        "kneser" => vec![
            Kneser(5, 2),
            Kneser(6, 2),
            Kneser(7, 2),
            Kneser(7, 3),
            Kneser(8, 3),
        ],
        "johnson" => vec![
            Johnson(4, 2),
            Johnson(5, 2),
            Johnson(6, 2),
            Johnson(6, 3),
            Johnson(7, 2),
            Johnson(7, 3),
        ],
        "hamming" => vec![Hamming(2, 3), Hamming(3, 2), Hamming(3, 3), Hamming(4, 2)],
        "miyazaki" => (3..=10)
            .flat_map(|k| {
                [false, true].map(|twisted| Cfi {
                    base: Box::new(Cycle(k)),
                    twisted,
                })
            })
            .collect(),
        "chang" => (0..=3).map(Chang).collect(),
        "complement" => vec![
            ComplementOf(Box::new(Petersen)),
            ComplementOf(Box::new(Prism(5))),
        ],
        "random-regular" => random_regular_specs(),
        other => {
            return Err(Error::InvalidParameters {
                family: other.to_string(),
                reason: format!(
                    "unknown family; expected one of {}",
                    CONSTRUCTED_FAMILIES.join(", ")
                ),
            })
        }
    };
    Ok(specs)
}

fn random_regular_specs() -> Vec<GeneratorSpec> {
    // ten sizes, three seeded draws each
    let shapes = [
        (12, 3),
        (14, 3),
        (16, 3),
        (18, 3),
        (20, 3),
        (12, 4),
        (14, 4),
        (16, 4),
        (18, 4),
        (20, 4),
    ];
    shapes
        .iter()
        .flat_map(|&(n, d)| {
            (0..3u64).map(move |i| GeneratorSpec::RandomRegular {
                n,
                d,
                seed: 1_000 * n as u64 + 100 * d as u64 + i,
            })
        })
        .collect()
}

pub fn constructed_family(name: &str) -> Result<Family> {
    let name = CONSTRUCTED_FAMILIES
        .iter()
        .copied()
        .find(|&f| f == name)
        .ok_or_else(|| Error::InvalidParameters {
            family: name.to_string(),
            reason: format!(
                "unknown family; expected one of {}",
                CONSTRUCTED_FAMILIES.join(", ")
            ),
        })?;
    let graphs = family_specs(name)?
        .iter()
        .map(GeneratorSpec::generate)
        .collect::<Result<Vec<_>>>()?;
    Ok(Family { name, graphs })
}
