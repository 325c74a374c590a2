//! Fixtures shared by the benchmarks.

use std::path::PathBuf;

use rcbbo_core::project::{read_json, Project};

/// Loads a bundled project, attaching the bundled unit costs.
pub fn bundled(name: &str) -> Project {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let mut p = Project::load(&dir.join(name)).expect("bundled project loads");
    if p.costs.is_none() {
        p.costs = Some(read_json(&dir.join("costs.json")).expect("bundled costs load"));
    }
    p
}
