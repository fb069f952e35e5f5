//! Vertex-deletion DRESS: pooled fingerprints over all size-`k` deletions,
//! their quantized histogram, SHA-256 digests, tolerance comparison and
//! escalation to deeper deletion.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::dress::{dress_converge, SolverConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default equality tolerance for [`compare`], ten times the solver tolerance.
pub const DEFAULT_TAU: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DeltaConfig {
    /// Number of vertices deleted per subgraph.
    pub k: usize,
    pub solver: SolverConfig,
    /// Keep the per-deletion rows.
    pub retain_matrix: bool,
}

impl Default for DeltaConfig {
    fn default() -> Self {
        DeltaConfig {
            k: 1,
            solver: SolverConfig::default(),
            retain_matrix: false,
        }
    }
}

impl DeltaConfig {
    pub fn with_k(k: usize) -> Self {
        DeltaConfig {
            k,
            ..Default::default()
        }
    }
}

/// One sorted row per deleted subset, subsets in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct MultisetMatrix {
    pub subsets: Vec<Vec<usize>>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaFingerprint {
    pub k: usize,
    pub n: usize,
    /// Row lengths in subset order.
    pub row_lengths: Vec<usize>,
    /// All rows pooled and sorted ascending.
    pub values: Vec<f64>,
}

impl DeltaFingerprint {
    pub fn total_length(&self) -> usize {
        self.values.len()
    }
}

/// Bin index to count, bins of width `epsilon` starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHistogram {
    pub epsilon: f64,
    pub entries: BTreeMap<u64, u64>,
}

impl SparseHistogram {
    pub fn nonzero_bins(&self) -> usize {
        self.entries.len()
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FingerprintDigests {
    pub histogram_sha256: [u8; 32],
    pub multiset_sha256: [u8; 32],
}

impl FingerprintDigests {
    pub fn histogram_hex(&self) -> String {
        hex::encode(self.histogram_sha256)
    }

    pub fn multiset_hex(&self) -> String {
        hex::encode(self.multiset_sha256)
    }
}

/// Everything one Δ^k run produces.
#[derive(Debug, Clone)]
pub struct DeltaResult {
    pub fingerprint: DeltaFingerprint,
    pub matrix: Option<MultisetMatrix>,
    pub histogram: SparseHistogram,
    pub digests: FingerprintDigests,
    /// Largest iteration count over all deletions.
    pub max_iterations: usize,
}

/// Computes the Δ^k fingerprint of `g`.
///
/// Per-deletion solves run in parallel; rows are gathered by subset index
/// before pooling, so the output does not depend on scheduling.
pub fn delta_fingerprint(g: &Graph, cfg: &DeltaConfig) -> Result<DeltaResult> {
    cfg.solver.validate()?;
    let n = g.n();
    if cfg.k > n {
        return Err(Error::DepthTooLarge { k: cfg.k, n });
    }
    let subsets: Vec<Vec<usize>> = (0..n).combinations(cfg.k).collect();
    let solved: Vec<(Vec<f64>, usize)> = subsets
        .par_iter()
        .map(|s| {
            let sub = g.induced_delete(s)?;
            let ev = dress_converge(&sub, &cfg.solver).map_err(|e| Error::Deletion {
                subset: s.clone(),
                source: Box::new(e),
            })?;
            Ok((ev.fingerprint().values, ev.iterations))
        })
        .collect::<Result<_>>()?;

    let max_iterations = solved.iter().map(|(_, it)| *it).max().unwrap_or(0);
    let row_lengths: Vec<usize> = solved.iter().map(|(r, _)| r.len()).collect();
    let mut values: Vec<f64> = solved.iter().flat_map(|(r, _)| r.iter().copied()).collect();
    values.sort_by(f64::total_cmp);
    let fingerprint = DeltaFingerprint {
        k: cfg.k,
        n,
        row_lengths,
        values,
    };
    let histogram = histogram(&fingerprint, cfg.solver.tol);
    let digests = digests(&fingerprint, &histogram);
    let matrix = cfg.retain_matrix.then(|| MultisetMatrix {
        subsets,
        rows: solved.into_iter().map(|(r, _)| r).collect(),
    });
    Ok(DeltaResult {
        fingerprint,
        matrix,
        histogram,
        digests,
        max_iterations,
    })
}

/// Quantizes every value to bin `floor(v / epsilon)`.
pub fn histogram(fp: &DeltaFingerprint, epsilon: f64) -> SparseHistogram {
    let mut entries = BTreeMap::new();
    for &v in &fp.values {
        let bin = (v / epsilon).floor().max(0.0) as u64;
        *entries.entry(bin).or_insert(0) += 1;
    }
    SparseHistogram { epsilon, entries }
}

/// SHA-256 of the histogram (big-endian `u64` bin then `u64` count, ascending
/// bins) and of the sorted values (big-endian IEEE-754 binary64).
pub fn digests(fp: &DeltaFingerprint, hist: &SparseHistogram) -> FingerprintDigests {
    let mut h = Sha256::new();
    for (&bin, &count) in &hist.entries {
        h.update(bin.to_be_bytes());
        h.update(count.to_be_bytes());
    }
    let histogram_sha256 = h.finalize().into();

    let mut h = Sha256::new();
    for v in &fp.values {
        h.update(v.to_be_bytes());
    }
    let multiset_sha256 = h.finalize().into();
    FingerprintDigests {
        histogram_sha256,
        multiset_sha256,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Separated,
    Equal,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Separated => "SEPARATED",
            Verdict::Equal => "EQUAL",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub verdict: Verdict,
    /// Absent when the fingerprints have different lengths.
    pub linf: Option<f64>,
}

/// L∞ distance between equal-length sorted value lists.
pub fn linf_distance(a: &[f64], b: &[f64]) -> Option<f64> {
    (a.len() == b.len()).then(|| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    })
}

/// Separated iff the lengths differ or the aligned L∞ distance exceeds `tau`.
pub fn compare(a: &DeltaFingerprint, b: &DeltaFingerprint, tau: f64) -> Comparison {
    match linf_distance(&a.values, &b.values) {
        None => Comparison {
            verdict: Verdict::Separated,
            linf: None,
        },
        Some(d) => Comparison {
            verdict: if d > tau {
                Verdict::Separated
            } else {
                Verdict::Equal
            },
            linf: Some(d),
        },
    }
}

#[derive(Debug, Clone)]
pub enum Escalation {
    Separated {
        k: usize,
        comparison: Comparison,
        first: DeltaFingerprint,
        second: DeltaFingerprint,
    },
    Exhausted {
        k_max: usize,
        comparison: Comparison,
        first: DeltaFingerprint,
        second: DeltaFingerprint,
    },
}

impl Escalation {
    pub fn separating_k(&self) -> Option<usize> {
        match self {
            Escalation::Separated { k, .. } => Some(*k),
            Escalation::Exhausted { .. } => None,
        }
    }

    pub fn comparison(&self) -> Comparison {
        match self {
            Escalation::Separated { comparison, .. } | Escalation::Exhausted { comparison, .. } => {
                *comparison
            }
        }
    }
}

/// Compares at depth `cfg.k`, then `cfg.k + 1`, … up to `k_max`, stopping at
/// the first depth that separates.
pub fn escalate(
    g1: &Graph,
    g2: &Graph,
    cfg: &DeltaConfig,
    k_max: usize,
    tau: f64,
) -> Result<Escalation> {
    if k_max < cfg.k {
        return Err(Error::InvalidConfig(format!(
            "k_max {k_max} is below the starting depth {}",
            cfg.k
        )));
    }
    let mut k = cfg.k;
    loop {
        let level = DeltaConfig {
            k,
            retain_matrix: false,
            ..*cfg
        };
        let a = delta_fingerprint(g1, &level)?.fingerprint;
        let b = delta_fingerprint(g2, &level)?.fingerprint;
        let comparison = compare(&a, &b, tau);
        if comparison.verdict == Verdict::Separated {
            return Ok(Escalation::Separated {
                k,
                comparison,
                first: a,
                second: b,
            });
        }
        // deleting more vertices than the smaller graph has is impossible
        if k == k_max || k + 1 > g1.n().min(g2.n()) {
            return Ok(Escalation::Exhausted {
                k_max: k,
                comparison,
                first: a,
                second: b,
            });
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, cycle};

    fn fp(values: Vec<f64>) -> DeltaFingerprint {
        DeltaFingerprint {
            k: 0,
            n: 0,
            row_lengths: vec![values.len()],
            values,
        }
    }

    #[test]
    fn delta_of_triangle() {
        let cfg = DeltaConfig {
            retain_matrix: true,
            ..Default::default()
        };
        let r = delta_fingerprint(&complete(3), &cfg).unwrap();
        let m = r.matrix.unwrap();
        assert_eq!(m.subsets, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(m.rows.len(), 3);
        for row in &m.rows {
            assert_eq!(row.len(), 1);
            assert!((row[0] - 2.0).abs() < 1e-9);
        }
        assert_eq!(r.fingerprint.values.len(), 3);
        assert_eq!(r.fingerprint.row_lengths, vec![1, 1, 1]);
    }

    #[test]
    fn depth_zero_is_plain_dress() {
        let r = delta_fingerprint(&cycle(4), &DeltaConfig::with_k(0)).unwrap();
        assert_eq!(r.fingerprint.row_lengths, vec![4]);
        assert_eq!(r.histogram.entries, BTreeMap::from([(1_414_213, 4)]));
    }

    #[test]
    fn complete_graph_histogram() {
        let r = delta_fingerprint(&complete(5), &DeltaConfig::with_k(0)).unwrap();
        assert_eq!(r.histogram.entries, BTreeMap::from([(2_000_000, 10)]));
    }

    #[test]
    fn depth_too_large() {
        assert!(matches!(
            delta_fingerprint(&cycle(4), &DeltaConfig::with_k(5)),
            Err(Error::DepthTooLarge { k: 5, n: 4 })
        ));
    }

    #[test]
    fn empty_histogram_and_digests() {
        let e = fp(vec![]);
        let h = histogram(&e, 1e-6);
        assert!(h.entries.is_empty());
        let d = digests(&e, &h);
        let empty = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855";
        assert_eq!(d.histogram_hex(), empty);
        assert_eq!(d.multiset_hex(), empty);
    }

    #[test]
    fn compare_lengths_and_tolerance() {
        let a = fp(vec![1.0, 2.0]);
        assert_eq!(compare(&a, &a, DEFAULT_TAU).linf, Some(0.0));
        assert_eq!(compare(&a, &a, DEFAULT_TAU).verdict, Verdict::Equal);
        let b = fp(vec![1.0, 2.0, 2.0]);
        let c = compare(&a, &b, DEFAULT_TAU);
        assert_eq!(c.verdict, Verdict::Separated);
        assert_eq!(c.linf, None);
        let near = fp(vec![1.0 + 5e-6, 2.0]);
        assert_eq!(compare(&a, &near, DEFAULT_TAU).verdict, Verdict::Equal);
        let far = fp(vec![1.0 + 2e-5, 2.0]);
        assert_eq!(compare(&a, &far, DEFAULT_TAU).verdict, Verdict::Separated);
    }

    #[test]
    fn escalate_self_is_exhausted() {
        let g = cycle(6);
        let e = escalate(&g, &g, &DeltaConfig::default(), 2, DEFAULT_TAU).unwrap();
        assert!(matches!(e, Escalation::Exhausted { k_max: 2, .. }));
        assert_eq!(e.comparison().linf, Some(0.0));
    }

    #[test]
    fn escalate_rejects_inverted_range() {
        let g = cycle(6);
        assert!(escalate(&g, &g, &DeltaConfig::with_k(2), 1, DEFAULT_TAU).is_err());
    }
}
