//! Input specifiers shared by the subcommands.
//!
//! * `gen:<expr>` builds a graph from the generator mini-language;
//! * `family:<name>` names a built-in constructed family;
//! * `<path>` reads a graph6 file, `<path>@<i>` picks its i-th graph (1-based).

use std::path::{Path, PathBuf};

use dressfp::generators::{constructed_family, GeneratorSpec};
use dressfp::graph6::load_family;
use dressfp::{Error, Graph, Result};

pub struct Loaded {
    pub name: String,
    pub graphs: Vec<Graph>,
}

fn split_index(spec: &str) -> Option<(&str, usize)> {
    let (path, idx) = spec.rsplit_once('@')?;
    let idx = idx.parse().ok()?;
    // a file literally named "x@3" wins over the indexed form
    if Path::new(spec).exists() {
        return None;
    }
    Some((path, idx))
}

pub fn load_many(spec: &str, skip_bad: bool) -> Result<Loaded> {
    if spec.starts_with("gen:") {
        let g = spec.parse::<GeneratorSpec>()?.generate()?;
        return Ok(Loaded {
            name: spec.trim_start_matches("gen:").to_string(),
            graphs: vec![g],
        });
    }
    if let Some(name) = spec.strip_prefix("family:") {
        let f = constructed_family(name)?;
        return Ok(Loaded {
            name: f.name.to_string(),
            graphs: f.graphs,
        });
    }
    if let Some((path, idx)) = split_index(spec) {
        let file = load_family(path, skip_bad)?;
        let name = format!("{}@{idx}", file.family_name());
        let g = pick(file.graphs, idx, path)?;
        return Ok(Loaded {
            name,
            graphs: vec![g],
        });
    }
    let file = load_family(PathBuf::from(spec), skip_bad)?;
    Ok(Loaded {
        name: file.family_name(),
        graphs: file.graphs,
    })
}

fn pick(graphs: Vec<Graph>, idx: usize, path: &str) -> Result<Graph> {
    let len = graphs.len();
    if idx == 0 || idx > len {
        return Err(Error::InvalidConfig(format!(
            "{path} holds {len} graphs; index {idx} is out of range (indices are 1-based)"
        )));
    }
    Ok(graphs.into_iter().nth(idx - 1).expect("index checked"))
}

/// Loads exactly one graph.
pub fn load_one(spec: &str, skip_bad: bool) -> Result<Graph> {
    let loaded = load_many(spec, skip_bad)?;
    match loaded.graphs.len() {
        1 => Ok(loaded.graphs.into_iter().next().unwrap()),
        n => Err(Error::InvalidConfig(format!(
            "{spec} holds {n} graphs; select one with {spec}@<i>"
        ))),
    }
}
