//! graph6 encoding and family-file loading.
//!
//! A record is a size field followed by the upper-triangle adjacency bits
//! `x(0,1), x(0,2), x(1,2), x(0,3), …` packed six to a byte, most significant
//! bit first, each byte offset by 63. Sizes up to 62 take one byte (`n + 63`);
//! sizes up to 258047 take `~` plus three bytes of 6 bits each.
//! Reference: <https://users.cecs.anu.edu.au/~bdm/data/formats.txt>

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const MAX_VERTICES: usize = 258_047;
const HEADER: &[u8] = b">>graph6<<";

fn bad(msg: impl Into<String>) -> Error {
    Error::Graph6(msg.into())
}

/// Decodes one graph6 record. Trailing CR/LF is ignored.
pub fn decode_graph6(line: &[u8]) -> Result<Graph> {
    let mut data = line;
    while let Some((&last, rest)) = data.split_last() {
        if last == b'\n' || last == b'\r' {
            data = rest;
        } else {
            break;
        }
    }
    if let Some(rest) = data.strip_prefix(HEADER) {
        data = rest;
    }
    if let Some(pos) = data.iter().position(|b| !(63..=126).contains(b)) {
        return Err(bad(format!(
            "byte {:#04x} at offset {pos} is outside [63, 126]",
            data[pos]
        )));
    }
    let (n, body) = match data {
        [] => return Err(bad("empty record")),
        [126, 126, ..] => return Err(bad("8-byte size field (n > 258047) is unsupported")),
        [126, rest @ ..] => {
            if rest.len() < 3 {
                return Err(bad("truncated size field"));
            }
            let n = rest[..3]
                .iter()
                .fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize);
            if n < 63 {
                return Err(bad(format!("non-canonical long size field for n = {n}")));
            }
            (n, &rest[3..])
        }
        [first, rest @ ..] => ((first - 63) as usize, rest),
    };
    let nbits = n * n.saturating_sub(1) / 2;
    let want = nbits.div_ceil(6);
    if body.len() != want {
        return Err(bad(format!(
            "n = {n} needs {want} adjacency bytes, found {}",
            body.len()
        )));
    }
    let bit = |k: usize| ((body[k / 6] - 63) >> (5 - k % 6)) & 1 == 1;
    for k in nbits..want * 6 {
        if bit(k) {
            return Err(bad("nonzero padding bits"));
        }
    }
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bit(k) {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    Graph::from_edges(n, edges)
}

/// Encodes a graph as a graph6 record (no header, no newline).
pub fn encode_graph6(g: &Graph) -> Result<Vec<u8>> {
    let n = g.n();
    if n > MAX_VERTICES {
        return Err(bad(format!("n = {n} exceeds {MAX_VERTICES}")));
    }
    let nbits = n * n.saturating_sub(1) / 2;
    let mut out = Vec::with_capacity(4 + nbits.div_ceil(6));
    if n <= 62 {
        out.push(n as u8 + 63);
    } else {
        out.push(126);
        out.extend([12, 6, 0].map(|s| ((n >> s) & 63) as u8 + 63));
    }
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    Ok(out)
}

pub fn encode_graph6_string(g: &Graph) -> Result<String> {
    // every byte is printable ASCII
    Ok(String::from_utf8(encode_graph6(g)?).expect("graph6 bytes are ASCII"))
}

/// Graphs of one family file, in file order.
#[derive(Debug, Clone)]
pub struct FamilyFile {
    pub path: PathBuf,
    pub graphs: Vec<Graph>,
    /// 1-based line number of each graph.
    pub source_line_numbers: Vec<usize>,
    /// Lines rejected under `skip_bad`, with the reason.
    pub skipped: Vec<(usize, String)>,
}

impl FamilyFile {
    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// File stem, used as the family name in reports.
    pub fn family_name(&self) -> String {
        self.path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.path.display().to_string())
    }
}

/// Loads one graph6 record per line. Blank lines are skipped. With
/// `skip_bad`, undecodable lines are logged and dropped instead of failing.
pub fn load_family(path: impl AsRef<Path>, skip_bad: bool) -> Result<FamilyFile> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut family = FamilyFile {
        path: path.to_path_buf(),
        graphs: Vec::new(),
        source_line_numbers: Vec::new(),
        skipped: Vec::new(),
    };
    for (idx, raw) in bytes.split(|&b| b == b'\n').enumerate() {
        let lineno = idx + 1;
        let line = raw.strip_suffix(b"\r").unwrap_or(raw);
        let line = line.strip_prefix(HEADER).unwrap_or(line);
        if line.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        let line = line.trim_ascii_end();
        match decode_graph6(line) {
            Ok(mut g) => {
                g.set_name(Some(format!("G{}", family.graphs.len() + 1)));
                family.graphs.push(g);
                family.source_line_numbers.push(lineno);
            }
            Err(e) if skip_bad => {
                log::warn!("{}:{lineno}: skipping bad record: {e}", path.display());
                family.skipped.push((lineno, e.to_string()));
            }
            Err(e) => {
                return Err(Error::FamilyLine {
                    path: path.to_path_buf(),
                    line: lineno,
                    reason: e.to_string(),
                })
            }
        }
    }
    Ok(family)
}

/// Writes one record per line.
pub fn write_family<'a>(
    path: impl AsRef<Path>,
    graphs: impl IntoIterator<Item = &'a Graph>,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    for g in graphs {
        out.extend(encode_graph6(g)?);
        out.push(b'\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
