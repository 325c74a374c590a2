//! Objectives over the discrete design space and their genome adaptors.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::bbo::Objective;
use crate::model::{DesignCandidate, DesignVariableSpec};

/// A function of a discrete candidate.
pub trait DiscreteObjective: Sync {
    fn spec(&self) -> &DesignVariableSpec;

    fn evaluate_candidate(&self, candidate: &DesignCandidate) -> f64;
}

impl<T: DiscreteObjective + ?Sized> DiscreteObjective for &T {
    fn spec(&self) -> &DesignVariableSpec {
        (**self).spec()
    }

    fn evaluate_candidate(&self, candidate: &DesignCandidate) -> f64 {
        (**self).evaluate_candidate(candidate)
    }
}

/// Decodes genomes and counts every evaluation of the inner objective.
pub struct SpaceObjective<D> {
    inner: D,
    calls: AtomicU64,
}

impl<D: DiscreteObjective> SpaceObjective<D> {
    pub fn new(inner: D) -> Self {
        SpaceObjective {
            inner,
            calls: AtomicU64::new(0),
        }
    }

    pub fn inner(&self) -> &D {
        &self.inner
    }

    /// Evaluations of the inner objective so far.
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn decode(&self, genome: &[f64]) -> DesignCandidate {
        self.inner
            .spec()
            .decode(genome)
            .expect("genome length follows the spec dimension")
    }
}

impl<D: DiscreteObjective> Objective for SpaceObjective<D> {
    fn dimension(&self) -> usize {
        self.inner.spec().len()
    }

    fn evaluate(&self, genome: &[f64]) -> f64 {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.evaluate_candidate(&self.decode(genome))
    }

    fn evaluate_batch(&self, genomes: &[Vec<f64>]) -> Vec<f64> {
        genomes.par_iter().map(|g| self.evaluate(g)).collect()
    }
}
