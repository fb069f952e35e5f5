//! Family-level experiments: collision scans with escalation, minimum
//! separation margins and rounding stability.
//!
//! Graph indices in every report are 1-based positions in the input order
//! (file line order for graph6 families).

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::delta::{
    compare, delta_fingerprint, linf_distance, DeltaConfig, DeltaResult, Verdict, DEFAULT_TAU,
};
use crate::error::{Error, Result};
use crate::graph::Graph;

pub const REPORT_SCHEMA_VERSION: u32 = 1;
/// Families up to this size get a full pairwise tolerance audit.
pub const DEFAULT_AUDIT_LIMIT: usize = 500;
pub const DEFAULT_SAMPLE_THRESHOLD: usize = 200;
pub const DEFAULT_SAMPLE_PAIRS: usize = 2000;
pub const DEFAULT_SEED: u64 = 0x5eed_d8e5;
pub const DEFAULT_DIGITS: std::ops::RangeInclusive<u32> = 6..=14;

/// Fingerprints every graph of a family, in input order.
pub fn fingerprint_family(graphs: &[Graph], cfg: &DeltaConfig) -> Result<Vec<DeltaResult>> {
    graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            delta_fingerprint(g, cfg).map_err(|e| match e {
                Error::Deletion { .. } | Error::NotConverged { .. } => {
                    Error::Harness(format!("graph {}: {e}", i + 1))
                }
                other => other,
            })
        })
        .collect()
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut x = x;
        while self.0[x] != r {
            let next = self.0[x];
            self.0[x] = r;
            x = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller index becomes root, keeps groups ordered by first member
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi] = lo;
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CollisionGroup {
    /// 1-based graph indices.
    pub members: Vec<usize>,
    /// Largest pairwise L∞ distance inside the group at the scan depth.
    pub max_linf: f64,
    /// First depth at which all members separate, if any up to `escalated_to`.
    pub resolved_at: Option<usize>,
    pub escalated_to: usize,
    /// Non-zero histogram bins per member at the resolving (or last tried) depth.
    pub histogram_bins: Vec<usize>,
    pub min_linf_at_resolution: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub schema_version: u32,
    pub family: String,
    pub graphs: usize,
    pub unique: usize,
    pub pairs: u64,
    pub k: usize,
    pub tau: f64,
    pub collisions: Vec<CollisionGroup>,
    pub max_iterations: usize,
    pub audit: String,
    pub index_note: String,
}

impl FamilyReport {
    pub fn fully_separated_with_escalation(&self) -> bool {
        self.collisions.iter().all(|c| c.resolved_at.is_some())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    pub tau: f64,
    pub escalate_to: usize,
    pub audit_limit: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            tau: DEFAULT_TAU,
            escalate_to: 2,
            audit_limit: DEFAULT_AUDIT_LIMIT,
        }
    }
}

/// Finds within-family fingerprint collisions and escalates each group.
pub fn scan_family(
    family: &str,
    graphs: &[Graph],
    cfg: &DeltaConfig,
    opts: &ScanOptions,
) -> Result<FamilyReport> {
    let fps = fingerprint_family(graphs, cfg)?;
    scan_fingerprints(family, graphs, &fps, cfg, opts)
}

/// As [`scan_family`], reusing fingerprints already computed at depth `cfg.k`.
pub fn scan_fingerprints(
    family: &str,
    graphs: &[Graph],
    fps: &[DeltaResult],
    cfg: &DeltaConfig,
    opts: &ScanOptions,
) -> Result<FamilyReport> {
    let g = graphs.len();
    if g == 0 {
        return Err(Error::Harness(format!("family {family} is empty")));
    }
    assert_eq!(fps.len(), g);
    let mut uf = UnionFind::new(g);
    let equal = |a: usize, b: usize| {
        compare(&fps[a].fingerprint, &fps[b].fingerprint, opts.tau).verdict == Verdict::Equal
    };

    // digest buckets: bit-identical candidates
    let mut by_digest: HashMap<[u8; 32], Vec<usize>> = HashMap::new();
    for (i, r) in fps.iter().enumerate() {
        by_digest
            .entry(r.digests.multiset_sha256)
            .or_default()
            .push(i);
    }
    for members in by_digest.values() {
        for &b in &members[1..] {
            if equal(members[0], b) {
                uf.union(members[0], b);
            }
        }
    }

    let audit = if g <= opts.audit_limit {
        for a in 0..g {
            for b in (a + 1)..g {
                if fps[a].fingerprint.total_length() == fps[b].fingerprint.total_length()
                    && equal(a, b)
                {
                    uf.union(a, b);
                }
            }
        }
        "full pairwise tolerance audit".to_string()
    } else {
        // near-miss check: neighbours in lexicographic order and shared histogram digests
        let mut order: Vec<usize> = (0..g).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (&fps[a].fingerprint.values, &fps[b].fingerprint.values);
            x.len().cmp(&y.len()).then_with(|| {
                x.iter()
                    .zip(y)
                    .map(|(p, q)| p.total_cmp(q))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        });
        for w in order.windows(2) {
            if equal(w[0], w[1]) {
                uf.union(w[0], w[1]);
            }
        }
        let mut by_hist: HashMap<[u8; 32], Vec<usize>> = HashMap::new();
        for (i, r) in fps.iter().enumerate() {
            by_hist
                .entry(r.digests.histogram_sha256)
                .or_default()
                .push(i);
        }
        for members in by_hist.values() {
            for &b in &members[1..] {
                if equal(members[0], b) {
                    uf.union(members[0], b);
                }
            }
        }
        format!(
            "digest grouping plus sorted-neighbour check (family above {} graphs)",
            opts.audit_limit
        )
    };

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..g {
        let r = uf.find(i);
        groups.entry(r).or_default().push(i);
    }
    let unique = groups.len();
    let mut collisions = Vec::new();
    for members in groups.values().filter(|m| m.len() > 1) {
        let mut max_linf: f64 = 0.0;
        for (x, &a) in members.iter().enumerate() {
            for &b in &members[x + 1..] {
                if let Some(d) =
                    linf_distance(&fps[a].fingerprint.values, &fps[b].fingerprint.values)
                {
                    max_linf = max_linf.max(d);
                }
            }
        }
        collisions.push(escalate_group(graphs, members, max_linf, cfg, opts)?);
    }

    Ok(FamilyReport {
        schema_version: REPORT_SCHEMA_VERSION,
        family: family.to_string(),
        graphs: g,
        unique,
        pairs: (g as u64) * (g as u64 - 1) / 2,
        k: cfg.k,
        tau: opts.tau,
        collisions,
        max_iterations: fps.iter().map(|r| r.max_iterations).max().unwrap_or(0),
        audit,
        index_note: "file-order indices, 1-based".to_string(),
    })
}

fn escalate_group(
    graphs: &[Graph],
    members: &[usize],
    max_linf: f64,
    cfg: &DeltaConfig,
    opts: &ScanOptions,
) -> Result<CollisionGroup> {
    let mut group = CollisionGroup {
        members: members.iter().map(|&i| i + 1).collect(),
        max_linf,
        resolved_at: None,
        escalated_to: cfg.k,
        histogram_bins: Vec::new(),
        min_linf_at_resolution: None,
    };
    let min_n = members.iter().map(|&i| graphs[i].n()).min().unwrap_or(0);
    for k in (cfg.k + 1)..=opts.escalate_to.min(min_n) {
        let level = DeltaConfig {
            k,
            retain_matrix: false,
            ..*cfg
        };
        let fps: Vec<DeltaResult> = members
            .iter()
            .map(|&i| delta_fingerprint(&graphs[i], &level))
            .collect::<Result<_>>()?;
        group.escalated_to = k;
        group.histogram_bins = fps.iter().map(|r| r.histogram.nonzero_bins()).collect();
        let mut all_separated = true;
        let mut min_linf: Option<f64> = None;
        for a in 0..fps.len() {
            for b in (a + 1)..fps.len() {
                let c = compare(&fps[a].fingerprint, &fps[b].fingerprint, opts.tau);
                all_separated &= c.verdict == Verdict::Separated;
                if let Some(d) = c.linf {
                    min_linf = Some(min_linf.map_or(d, |m: f64| m.min(d)));
                }
            }
        }
        if all_separated {
            group.resolved_at = Some(k);
            group.min_linf_at_resolution = min_linf;
            break;
        }
    }
    Ok(group)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MarginMethod {
    Exact,
    Sampled,
}

#[derive(Debug, Clone)]
pub struct MarginOptions {
    pub sample_threshold: usize,
    pub sample_pairs: usize,
    pub seed: u64,
    /// 1-based pairs left out, e.g. a known collision.
    pub exclude: Vec<(usize, usize)>,
}

impl Default for MarginOptions {
    fn default() -> Self {
        MarginOptions {
            sample_threshold: DEFAULT_SAMPLE_THRESHOLD,
            sample_pairs: DEFAULT_SAMPLE_PAIRS,
            seed: DEFAULT_SEED,
            exclude: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MarginReport {
    pub schema_version: u32,
    pub family: String,
    pub graphs: usize,
    pub min_linf: f64,
    /// `min_linf / epsilon`.
    pub ratio: f64,
    pub epsilon: f64,
    pub method: MarginMethod,
    pub sample_size: Option<usize>,
    pub seed: Option<u64>,
    pub compared_pairs: usize,
    /// Pairs skipped because their fingerprints differ in length.
    pub skipped_unequal_length: usize,
    pub excluded_pairs: Vec<(usize, usize)>,
    /// 1-based pair attaining the minimum.
    pub argmin: (usize, usize),
}

pub fn margin_analysis(
    family: &str,
    graphs: &[Graph],
    cfg: &DeltaConfig,
    opts: &MarginOptions,
) -> Result<MarginReport> {
    let fps = fingerprint_family(graphs, cfg)?;
    margin_from_fingerprints(family, &fps, cfg.solver.tol, opts)
}

fn unrank_pair(g: usize, r: usize) -> (usize, usize) {
    // row i holds pairs (i, i+1..g); starts at i*(2g-i-1)/2
    let start = |i: usize| i * (2 * g - i - 1) / 2;
    let (mut lo, mut hi) = (0, g - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if start(mid) <= r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, lo + 1 + (r - start(lo)))
}

pub fn margin_from_fingerprints(
    family: &str,
    fps: &[DeltaResult],
    epsilon: f64,
    opts: &MarginOptions,
) -> Result<MarginReport> {
    let g = fps.len();
    if g < 2 {
        return Err(Error::Harness(format!(
            "family {family}: no comparable pair (fewer than 2 graphs)"
        )));
    }
    let total = g * (g - 1) / 2;
    let excluded: BTreeSet<(usize, usize)> = opts
        .exclude
        .iter()
        .map(|&(a, b)| (a.min(b) - 1, a.max(b) - 1))
        .collect();
    let (method, pairs): (MarginMethod, Vec<(usize, usize)>) =
        if g <= opts.sample_threshold || opts.sample_pairs >= total {
            (
                MarginMethod::Exact,
                (0..g)
                    .flat_map(|a| ((a + 1)..g).map(move |b| (a, b)))
                    .collect(),
            )
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let mut picked: Vec<(usize, usize)> = index::sample(&mut rng, total, opts.sample_pairs)
                .into_iter()
                .map(|r| unrank_pair(g, r))
                .collect();
            picked.sort_unstable();
            (MarginMethod::Sampled, picked)
        };

    let mut best: Option<(f64, (usize, usize))> = None;
    let (mut compared, mut skipped) = (0, 0);
    for (a, b) in pairs {
        if excluded.contains(&(a, b)) {
            continue;
        }
        match linf_distance(&fps[a].fingerprint.values, &fps[b].fingerprint.values) {
            None => skipped += 1,
            Some(d) => {
                compared += 1;
                if best.is_none_or(|(m, _)| d < m) {
                    best = Some((d, (a + 1, b + 1)));
                }
            }
        }
    }
    let (min_linf, argmin) = best.ok_or_else(|| {
        Error::Harness(format!(
            "family {family}: no comparable pair (all fingerprint lengths differ)"
        ))
    })?;
    Ok(MarginReport {
        schema_version: REPORT_SCHEMA_VERSION,
        family: family.to_string(),
        graphs: g,
        min_linf,
        ratio: min_linf / epsilon,
        epsilon,
        method,
        sample_size: (method == MarginMethod::Sampled).then_some(opts.sample_pairs),
        seed: (method == MarginMethod::Sampled).then_some(opts.seed),
        compared_pairs: compared,
        skipped_unequal_length: skipped,
        excluded_pairs: excluded.iter().map(|&(a, b)| (a + 1, b + 1)).collect(),
        argmin,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundingReport {
    pub schema_version: u32,
    pub family: String,
    pub graphs: usize,
    /// Unique fingerprint count per number of decimal digits kept.
    pub unique_by_digits: BTreeMap<u32, usize>,
}

/// Rounds `v` half away from zero to `digits` decimals, as a scaled integer.
pub fn round_scaled(v: f64, digits: u32) -> i64 {
    (v * 10f64.powi(digits as i32)).round() as i64
}

pub fn rounding_stability(
    family: &str,
    graphs: &[Graph],
    cfg: &DeltaConfig,
    digits: impl IntoIterator<Item = u32>,
) -> Result<RoundingReport> {
    let fps = fingerprint_family(graphs, cfg)?;
    rounding_from_fingerprints(family, &fps, digits)
}

pub fn rounding_from_fingerprints(
    family: &str,
    fps: &[DeltaResult],
    digits: impl IntoIterator<Item = u32>,
) -> Result<RoundingReport> {
    let mut unique_by_digits = BTreeMap::new();
    for d in digits {
        if d > 15 {
            return Err(Error::Harness(format!(
                "cannot round to {d} digits in binary64"
            )));
        }
        let distinct: BTreeSet<Vec<i64>> = fps
            .iter()
            .map(|r| {
                r.fingerprint
                    .values
                    .iter()
                    .map(|&v| round_scaled(v, d))
                    .collect()
            })
            .collect();
        unique_by_digits.insert(d, distinct.len());
    }
    Ok(RoundingReport {
        schema_version: REPORT_SCHEMA_VERSION,
        family: family.to_string(),
        graphs: fps.len(),
        unique_by_digits,
    })
}

/// Collapses sorted values into cluster representatives, starting a new
/// cluster whenever the gap to the previous value exceeds `tol`.
pub fn distinct_values(sorted: &[f64], tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    let mut prev: Option<f64> = None;
    for &v in sorted {
        if prev.is_none_or(|p| v - p > tol) {
            out.push(v);
        }
        prev = Some(v);
    }
    out
}
