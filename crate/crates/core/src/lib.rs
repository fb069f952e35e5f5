//! DRESS edge fingerprints, their vertex-deletion extension, Weisfeiler–Leman
//! reference oracles and a family benchmark harness.

pub mod bench;
pub mod container;
pub mod delta;
pub mod dress;
pub mod error;
pub mod generators;
pub mod graph;
pub mod graph6;
pub mod report;
pub mod wl;

pub use error::{Error, Result};
pub use graph::Graph;
