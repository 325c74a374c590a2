//! Discretized benchmark functions for tuning experiments.

use std::f64::consts::{E, PI};

use crate::model::{DesignCandidate, DesignVariableSpec};
use crate::objective::DiscreteObjective;

/// Half-width of the usual Ackley domain.
pub const ACKLEY_BOUND: f64 = 32.768;

/// Ackley function, zero at the origin.
pub fn ackley(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sq = x.iter().map(|v| v * v).sum::<f64>() / n;
    let cos = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
    let v = -20.0 * (-0.2 * sq.sqrt()).exp() - cos.exp() + 20.0 + E;
    // the constant terms cancel to rounding noise at the origin
    if v.abs() < 1e-12 {
        0.0
    } else {
        v
    }
}

/// Bin centres of `bins` equal bins over `[−bound, bound]`. With an odd
/// count the middle centre is exactly zero and the grid is symmetric.
pub fn symmetric_grid(bins: usize, bound: f64) -> Vec<f64> {
    let w = 2.0 * bound / bins as f64;
    let mid = (bins as f64 - 1.0) / 2.0;
    (0..bins).map(|i| (i as f64 - mid) * w).collect()
}

/// Ackley on a `dims`-dimensional grid of `bins` values per axis.
pub struct DiscreteAckley {
    spec: DesignVariableSpec,
}

impl DiscreteAckley {
    pub fn new(dims: usize, bins: usize) -> Self {
        let grid = symmetric_grid(bins, ACKLEY_BOUND);
        DiscreteAckley {
            spec: DesignVariableSpec::generic((0..dims).map(|i| (format!("x{}", i + 1), grid.clone())).collect()),
        }
    }
}

impl DiscreteObjective for DiscreteAckley {
    fn spec(&self) -> &DesignVariableSpec {
        &self.spec
    }

    fn evaluate_candidate(&self, candidate: &DesignCandidate) -> f64 {
        ackley(&candidate.values)
    }
}
