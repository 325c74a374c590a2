//! Discrete cost optimization of reinforced-concrete frames with
//! biogeography-based optimization, static soil-structure interaction and a
//! parameter-tuning harness.

pub mod bbo;
pub mod cost;
pub mod error;
pub mod evaluate;
pub mod foundation;
pub mod model;
pub mod objective;
pub mod project;
pub mod rc;
pub mod solver;
pub mod sssi;
pub mod tuning;

pub use error::{Error, Result};
