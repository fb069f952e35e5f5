//! On-disk fingerprint containers.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! magic      8 bytes  "DDRESSFP"
//! version    u32      1
//! k          u32
//! n          u64
//! epsilon    f64      histogram bin width
//! rows       u64      number of deletion subsets
//! row_len    u64 × rows
//! total      u64      number of values
//! values     f64 × total
//! hist_hex   64 bytes lowercase hex SHA-256 of the histogram
//! multi_hex  64 bytes lowercase hex SHA-256 of the value multiset
//! ```
//!
//! Readers recompute both digests and reject a mismatch.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::delta::{digests, histogram, DeltaFingerprint, DeltaResult};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"DDRESSFP";
pub const CONTAINER_VERSION: u32 = 1;

fn bad(msg: impl Into<String>) -> Error {
    Error::Container(msg.into())
}

/// A fingerprint plus the histogram width its digests were computed with.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredFingerprint {
    pub fingerprint: DeltaFingerprint,
    pub epsilon: f64,
    pub histogram_hex: String,
    pub multiset_hex: String,
}

impl StoredFingerprint {
    pub fn from_result(r: &DeltaResult) -> Self {
        StoredFingerprint {
            fingerprint: r.fingerprint.clone(),
            epsilon: r.histogram.epsilon,
            histogram_hex: r.digests.histogram_hex(),
            multiset_hex: r.digests.multiset_hex(),
        }
    }

    fn verify(self) -> Result<Self> {
        let fp = &self.fingerprint;
        if fp.row_lengths.iter().sum::<usize>() != fp.values.len() {
            return Err(bad("row lengths do not sum to the value count"));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(bad(format!("invalid epsilon {}", self.epsilon)));
        }
        let d = digests(fp, &histogram(fp, self.epsilon));
        if d.histogram_hex() != self.histogram_hex {
            return Err(bad("histogram digest mismatch"));
        }
        if d.multiset_hex() != self.multiset_hex {
            return Err(bad("multiset digest mismatch"));
        }
        Ok(self)
    }
}

pub fn encode_binary(s: &StoredFingerprint) -> Vec<u8> {
    let fp = &s.fingerprint;
    let mut out = Vec::with_capacity(48 + 8 * (fp.row_lengths.len() + fp.values.len()) + 128);
    out.extend_from_slice(MAGIC);
    out.extend(CONTAINER_VERSION.to_le_bytes());
    out.extend((fp.k as u32).to_le_bytes());
    out.extend((fp.n as u64).to_le_bytes());
    out.extend(s.epsilon.to_le_bytes());
    out.extend((fp.row_lengths.len() as u64).to_le_bytes());
    for &l in &fp.row_lengths {
        out.extend((l as u64).to_le_bytes());
    }
    out.extend((fp.values.len() as u64).to_le_bytes());
    for v in &fp.values {
        out.extend(v.to_le_bytes());
    }
    out.extend_from_slice(s.histogram_hex.as_bytes());
    out.extend_from_slice(s.multiset_hex.as_bytes());
    out
}

struct Cursor<'a>(&'a [u8]);

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.0.len() < len {
            return Err(bad("truncated container"));
        }
        let (head, rest) = self.0.split_at(len);
        self.0 = rest;
        Ok(head)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u64(&mut self) -> Result<u64> {
        self.array().map(u64::from_le_bytes)
    }

    fn count(&mut self) -> Result<usize> {
        let c = self.u64()?;
        // each counted item occupies at least 8 bytes
        if c > (self.0.len() / 8) as u64 {
            return Err(bad(format!("count {c} exceeds remaining data")));
        }
        Ok(c as usize)
    }

    fn hex(&mut self) -> Result<String> {
        let raw = self.take(64)?;
        let s = std::str::from_utf8(raw).map_err(|_| bad("digest is not ASCII"))?;
        if !s
            .bytes()
            .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
        {
            return Err(bad("digest is not lowercase hex"));
        }
        Ok(s.to_string())
    }
}

pub fn decode_binary(bytes: &[u8]) -> Result<StoredFingerprint> {
    let mut c = Cursor(bytes);
    if c.take(8)? != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = u32::from_le_bytes(c.array()?);
    if version != CONTAINER_VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let k = u32::from_le_bytes(c.array()?) as usize;
    let n = c.u64()? as usize;
    let epsilon = f64::from_le_bytes(c.array()?);
    let rows = c.count()?;
    let row_lengths = (0..rows)
        .map(|_| c.u64().map(|l| l as usize))
        .collect::<Result<Vec<_>>>()?;
    let total = c.count()?;
    let values = (0..total)
        .map(|_| c.array().map(f64::from_le_bytes))
        .collect::<Result<Vec<_>>>()?;
    let histogram_hex = c.hex()?;
    let multiset_hex = c.hex()?;
    if !c.0.is_empty() {
        return Err(bad(format!("{} trailing bytes", c.0.len())));
    }
    StoredFingerprint {
        fingerprint: DeltaFingerprint {
            k,
            n,
            row_lengths,
            values,
        },
        epsilon,
        histogram_hex,
        multiset_hex,
    }
    .verify()
}

#[derive(Serialize, Deserialize)]
struct JsonContainer {
    schema_version: u32,
    k: usize,
    n: usize,
    epsilon: f64,
    row_lengths: Vec<usize>,
    values: Vec<f64>,
    histogram: Vec<(u64, u64)>,
    histogram_sha256: String,
    multiset_sha256: String,
}

pub fn encode_json(s: &StoredFingerprint) -> Result<String> {
    let fp = &s.fingerprint;
    let doc = JsonContainer {
        schema_version: CONTAINER_VERSION,
        k: fp.k,
        n: fp.n,
        epsilon: s.epsilon,
        row_lengths: fp.row_lengths.clone(),
        values: fp.values.clone(),
        histogram: histogram(fp, s.epsilon).entries.into_iter().collect(),
        histogram_sha256: s.histogram_hex.clone(),
        multiset_sha256: s.multiset_hex.clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(text)
}

pub fn decode_json(text: &str) -> Result<StoredFingerprint> {
    let doc: JsonContainer = serde_json::from_str(text)?;
    if doc.schema_version != CONTAINER_VERSION {
        return Err(bad(format!("unsupported version {}", doc.schema_version)));
    }
    StoredFingerprint {
        fingerprint: DeltaFingerprint {
            k: doc.k,
            n: doc.n,
            row_lengths: doc.row_lengths,
            values: doc.values,
        },
        epsilon: doc.epsilon,
        histogram_hex: doc.histogram_sha256,
        multiset_hex: doc.multiset_sha256,
    }
    .verify()
}

/// Reads either format, sniffing the magic bytes.
pub fn read_container(path: impl AsRef<Path>) -> Result<StoredFingerprint> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(MAGIC) {
        decode_binary(&bytes)
    } else {
        let text = std::str::from_utf8(&bytes)
            .map_err(|_| bad("neither binary container nor UTF-8 JSON"))?;
        decode_json(text)
    }
}
