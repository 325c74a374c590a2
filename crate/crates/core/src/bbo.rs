//! Biogeography-based optimization over genomes in `[0, 1]^n`.
//!
//! Habitats are ranked by HSI (lower is better) and receive rank-linear
//! emigration `μ = 1 − r/(N−1)` and immigration `λ = 1 − μ`. Each species of
//! each habitat immigrates with probability `λ` from an emigrant picked by a
//! roulette wheel on `μ`, then mutates with probability `MutProb`. The best
//! `ceil(KeepRate·N)` old habitats survive and the rest of the population is
//! filled with the best transformed habitats.
//!
//! All random draws happen on one thread in a fixed order; only objective
//! evaluations run in parallel, so a run is a pure function of its seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Function minimized by BBO.
pub trait Objective: Sync {
    fn dimension(&self) -> usize;

    fn evaluate(&self, genome: &[f64]) -> f64;

    /// Evaluates a generation; results are in input order.
    fn evaluate_batch(&self, genomes: &[Vec<f64>]) -> Vec<f64> {
        genomes.par_iter().map(|g| self.evaluate(g)).collect()
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn evaluate(&self, genome: &[f64]) -> f64 {
        (**self).evaluate(genome)
    }

    fn evaluate_batch(&self, genomes: &[Vec<f64>]) -> Vec<f64> {
        (**self).evaluate_batch(genomes)
    }
}

/// HSI given to habitats whose evaluation returned a non-finite value.
pub const FAILED_HSI: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BboParams {
    pub pop_size: usize,
    pub keep_rate: f64,
    pub alpha: f64,
    pub mut_prob: f64,
    /// Mutation step on the unit genome.
    pub sigma: f64,
    pub sigma_damping: f64,
    pub max_iterations: usize,
    /// Stop early after this many iterations without improvement.
    pub stall_iterations: Option<usize>,
    pub seed: u64,
}

impl Default for BboParams {
    fn default() -> Self {
        BboParams {
            pop_size: 80,
            keep_rate: 0.40,
            alpha: 0.99,
            mut_prob: 0.5,
            sigma: 0.05,
            sigma_damping: 0.99,
            max_iterations: 200,
            stall_iterations: None,
            seed: 0,
        }
    }
}

impl BboParams {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 {
            return Err(Error::config("popsize", "must be at least 2"));
        }
        if !(0.0..1.0).contains(&self.keep_rate) {
            return Err(Error::config("keeprate", "must lie in [0, 1)"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::config("alpha", "must lie in (0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.mut_prob) {
            return Err(Error::config("mutprob", "must lie in [0, 1]"));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::config("sigma", "must be positive"));
        }
        if !(self.sigma_damping > 0.0 && self.sigma_damping <= 1.0) {
            return Err(Error::config("sigma_damping", "must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Number of habitats carried over unchanged.
    pub fn keep_count(&self) -> usize {
        ((self.keep_rate * self.pop_size as f64).ceil() as usize).min(self.pop_size)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Habitat {
    pub species: Vec<f64>,
    pub hsi: f64,
}

/// Rates `(λ, μ)` by rank for a population of `n`, best first.
pub fn assign_rates(n: usize) -> Vec<(f64, f64)> {
    if n <= 1 {
        return vec![(0.0, 1.0); n];
    }
    let last = (n - 1) as f64;
    (0..n)
        .map(|r| {
            let mu = 1.0 - r as f64 / last;
            (1.0 - mu, mu)
        })
        .collect()
}

/// Blends a species toward an emigrant's value, clamped to `[0, 1]`.
pub fn migrate(species: f64, emigrant: f64, alpha: f64) -> f64 {
    (species + alpha * (emigrant - species)).clamp(0.0, 1.0)
}

/// Adds a scaled standard-normal step, clamped to `[0, 1]`.
pub fn mutate<R: Rng + ?Sized>(species: f64, sigma: f64, rng: &mut R) -> f64 {
    let n: f64 = rng.sample(StandardNormal);
    (species + sigma * n).clamp(0.0, 1.0)
}

/// Roulette wheel over `weights`, skipping index `exclude`. `None` when no
/// other habitat has a positive weight.
pub fn roulette<R: Rng + ?Sized>(weights: &[f64], exclude: usize, rng: &mut R) -> Option<usize> {
    let total: f64 = weights
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != exclude)
        .map(|(_, w)| w.max(0.0))
        .sum();
    if !(total > 0.0) {
        return None;
    }
    let r = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (i, w) in weights.iter().enumerate() {
        if i == exclude || *w <= 0.0 {
            continue;
        }
        acc += w;
        last = Some(i);
        if r < acc {
            return Some(i);
        }
    }
    last
}

fn sanitize(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        FAILED_HSI
    }
}

fn sort_population(pop: &mut [Habitat]) {
    // stable sort keeps the original order among ties
    pop.sort_by(|a, b| a.hsi.total_cmp(&b.hsi));
}

/// Search state between iterations.
pub struct Bbo<'o, O: Objective + ?Sized> {
    objective: &'o O,
    params: BboParams,
    rng: ChaCha8Rng,
    population: Vec<Habitat>,
    sigma: f64,
    evaluations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub best: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub best: Habitat,
    /// Iteration 0 is the initial population.
    pub history: Vec<IterationStats>,
    /// Objective calls made by the search.
    pub evaluations: u64,
}

impl RunResult {
    pub fn best_history(&self) -> Vec<f64> {
        self.history.iter().map(|h| h.best).collect()
    }
}

impl<'o, O: Objective + ?Sized> Bbo<'o, O> {
    /// Draws and evaluates the initial population.
    pub fn new(objective: &'o O, params: BboParams) -> Result<Self> {
        params.validate()?;
        let dim = objective.dimension();
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let genomes: Vec<Vec<f64>> = (0..params.pop_size)
            .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
            .collect();
        let hsi = objective.evaluate_batch(&genomes);
        let mut population: Vec<Habitat> = genomes
            .into_iter()
            .zip(hsi)
            .map(|(species, h)| Habitat { species, hsi: sanitize(h) })
            .collect();
        sort_population(&mut population);
        Ok(Bbo {
            objective,
            params,
            rng,
            population,
            sigma: params.sigma,
            evaluations: params.pop_size as u64,
        })
    }

    /// Sorted best first.
    pub fn population(&self) -> &[Habitat] {
        &self.population
    }

    pub fn best(&self) -> &Habitat {
        &self.population[0]
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn stats(&self, iteration: usize) -> IterationStats {
        let n = self.population.len() as f64;
        IterationStats {
            iteration,
            best: self.population[0].hsi,
            mean: self.population.iter().map(|h| h.hsi).sum::<f64>() / n,
        }
    }

    /// One generation: migration, mutation, evaluation, elitism.
    pub fn step(&mut self) {
        let n = self.population.len();
        let rates = assign_rates(n);
        let mu: Vec<f64> = rates.iter().map(|r| r.1).collect();
        let dim = self.objective.dimension();

        let mut offspring: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let lambda = rates[i].0;
            let mut x = self.population[i].species.clone();
            for k in 0..dim {
                if self.rng.random::<f64>() <= lambda {
                    if let Some(j) = roulette(&mu, i, &mut self.rng) {
                        x[k] = migrate(self.population[i].species[k], self.population[j].species[k], self.params.alpha);
                    }
                }
                if self.rng.random::<f64>() <= self.params.mut_prob {
                    x[k] = mutate(x[k], self.sigma, &mut self.rng);
                }
            }
            offspring.push(x);
        }

        let hsi = self.objective.evaluate_batch(&offspring);
        self.evaluations += n as u64;
        let mut fresh: Vec<Habitat> = offspring
            .into_iter()
            .zip(hsi)
            .map(|(species, h)| Habitat { species, hsi: sanitize(h) })
            .collect();
        sort_population(&mut fresh);

        let keep = self.params.keep_count();
        let mut next: Vec<Habitat> = self.population[..keep].to_vec();
        next.extend(fresh.into_iter().take(n - keep));
        sort_population(&mut next);
        self.population = next;
        self.sigma *= self.params.sigma_damping;
    }

    /// Iterates to the stop criterion.
    pub fn run(mut self) -> RunResult {
        let mut history = vec![self.stats(0)];
        let mut since_improvement = 0;
        for it in 1..=self.params.max_iterations {
            let before = self.best().hsi;
            self.step();
            history.push(self.stats(it));
            if self.best().hsi < before {
                since_improvement = 0;
            } else {
                since_improvement += 1;
            }
            if self.params.stall_iterations.is_some_and(|w| since_improvement >= w) {
                break;
            }
        }
        RunResult {
            best: self.population[0].clone(),
            history,
            evaluations: self.evaluations,
        }
    }
}

/// Runs BBO from a fresh random population.
pub fn run<O: Objective + ?Sized>(objective: &O, params: BboParams) -> Result<RunResult> {
    Ok(Bbo::new(objective, params)?.run())
}
