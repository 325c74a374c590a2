//! Utility landscapes over one or two BBO parameters.
//!
//! Every cell fixes the axis parameters, runs BBO several times with the
//! remaining parameters drawn at random per run, and condenses the runs into
//! an average curve and its utilities.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{average_curve, run_seed, UtilityReport, DEFAULT_INTERVALS, DEFAULT_RUNS, DEFAULT_Z};
use crate::bbo::{self, BboParams, Objective};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    PopSize,
    KeepRate,
    Alpha,
    MutProb,
}

impl Param {
    pub const ALL: [Param; 4] = [Param::PopSize, Param::KeepRate, Param::Alpha, Param::MutProb];

    pub fn as_str(&self) -> &'static str {
        match self {
            Param::PopSize => "popsize",
            Param::KeepRate => "keeprate",
            Param::Alpha => "alpha",
            Param::MutProb => "mutprob",
        }
    }

    pub fn get(&self, p: &BboParams) -> f64 {
        match self {
            Param::PopSize => p.pop_size as f64,
            Param::KeepRate => p.keep_rate,
            Param::Alpha => p.alpha,
            Param::MutProb => p.mut_prob,
        }
    }

    pub fn set(&self, p: &mut BboParams, v: f64) {
        match self {
            Param::PopSize => p.pop_size = v.round() as usize,
            Param::KeepRate => p.keep_rate = v,
            Param::Alpha => p.alpha = v,
            Param::MutProb => p.mut_prob = v,
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::config("axis", format!("unknown parameter `{s}`")))
    }
}

/// Values drawn for parameters that are neither axes nor fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RandomRanges {
    pub pop_size: Vec<usize>,
    pub alpha: Vec<f64>,
    pub mut_prob: Vec<f64>,
    /// Uniform interval.
    pub keep_rate: (f64, f64),
}

impl Default for RandomRanges {
    fn default() -> Self {
        RandomRanges {
            pop_size: vec![60, 80, 100, 120, 140],
            alpha: vec![0.90, 0.95, 0.99],
            mut_prob: vec![0.30, 0.40, 0.50],
            keep_rate: (0.2, 0.6),
        }
    }
}

impl RandomRanges {
    fn draw<R: Rng>(&self, param: Param, rng: &mut R) -> f64 {
        match param {
            Param::PopSize => self.pop_size[rng.random_range(0..self.pop_size.len())] as f64,
            Param::Alpha => self.alpha[rng.random_range(0..self.alpha.len())],
            Param::MutProb => self.mut_prob[rng.random_range(0..self.mut_prob.len())],
            Param::KeepRate => {
                let (lo, hi) = self.keep_rate;
                lo + (hi - lo) * rng.random::<f64>()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if self.pop_size.is_empty() || self.alpha.is_empty() || self.mut_prob.is_empty() {
            return Err(Error::config("ranges", "random parameter lists must not be empty"));
        }
        let (lo, hi) = self.keep_rate;
        if !(0.0 <= lo && lo <= hi && hi < 1.0) {
            return Err(Error::config("ranges.keep_rate", "must be an interval within [0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeAxis {
    pub param: Param,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeConfig {
    pub axes: Vec<LandscapeAxis>,
    #[serde(default)]
    pub fixed: BTreeMap<Param, f64>,
    pub runs_per_cell: usize,
    /// Template for sigma, damping, horizon; its tuned parameters are ignored.
    pub base: BboParams,
    pub intervals: usize,
    pub z: f64,
    pub seed: u64,
    pub ranges: RandomRanges,
    /// Final value counted as a success.
    pub success_threshold: f64,
}

impl LandscapeConfig {
    pub fn new(axes: Vec<LandscapeAxis>, seed: u64) -> Self {
        LandscapeConfig {
            axes,
            fixed: BTreeMap::new(),
            runs_per_cell: DEFAULT_RUNS,
            base: BboParams::default(),
            intervals: DEFAULT_INTERVALS,
            z: DEFAULT_Z,
            seed,
            ranges: RandomRanges::default(),
            success_threshold: 1e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::config("axes", "one or two axes are required"));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(Error::config("axes", "axis parameters must be distinct"));
        }
        for a in &self.axes {
            if a.values.is_empty() {
                return Err(Error::config(format!("axes.{}", a.param), "needs at least one value"));
            }
            if self.fixed.contains_key(&a.param) {
                return Err(Error::config(format!("fixed.{}", a.param), "is also an axis"));
            }
        }
        if self.runs_per_cell < 1 {
            return Err(Error::config("runs_per_cell", "must be at least 1"));
        }
        if self.intervals < 1 {
            return Err(Error::config("intervals", "must be at least 1"));
        }
        if !(self.z >= 1.0) {
            return Err(Error::config("z", "must be at least 1"));
        }
        self.ranges.validate()
    }

    pub fn cell_count(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Axis values of cell `index`, first axis slowest.
    pub fn cell_coords(&self, index: usize) -> Vec<f64> {
        let mut rem = index;
        let mut coords = vec![0.0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            coords[k] = a.values[rem % a.values.len()];
            rem /= a.values.len();
        }
        coords
    }

    /// Parameters of one run: axes, then fixed values, then random draws.
    pub fn run_params(&self, cell: usize, run: usize) -> BboParams {
        let seed = run_seed(self.seed, cell as u64, run as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_7A2A_u64);
        let mut p = BboParams { seed, ..self.base };
        let coords = self.cell_coords(cell);
        for param in Param::ALL {
            // draw for every parameter so the stream does not depend on the axes
            let random = self.ranges.draw(param, &mut rng);
            let v = if let Some(k) = self.axes.iter().position(|a| a.param == param) {
                coords[k]
            } else if let Some(v) = self.fixed.get(&param) {
                *v
            } else {
                random
            };
            param.set(&mut p, v);
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub index: usize,
    pub coords: Vec<f64>,
    pub utility: UtilityReport,
    pub curve: Vec<f64>,
    /// Share of runs whose final value is below the success threshold.
    pub success_rate: f64,
    /// Mean evaluations to reach success over successful runs.
    pub aes: Option<f64>,
    /// Mean BBO evaluations per run.
    pub evaluations: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landscape {
    pub config: LandscapeConfig,
    pub cells: Vec<CellResult>,
    pub best_ut: f64,
    pub best_cell: usize,
}

fn run_cell<O: Objective + ?Sized>(objective: &O, cfg: &LandscapeConfig, cell: usize) -> Result<CellResult> {
    let runs: Vec<bbo::RunResult> = (0..cfg.runs_per_cell)
        .into_par_iter()
        .map(|r| bbo::run(objective, cfg.run_params(cell, r)))
        .collect::<Result<_>>()?;
    let histories: Vec<Vec<f64>> = runs.iter().map(|r| r.best_history()).collect();
    let curve = average_curve(&histories, cfg.intervals)?;
    let utility = UtilityReport::from_curve(&curve, cfg.z)?;
    let mut hits = Vec::new();
    for (r, run) in runs.iter().enumerate() {
        if let Some(it) = run.history.iter().position(|h| h.best < cfg.success_threshold) {
            let pop = cfg.run_params(cell, r).pop_size as f64;
            hits.push(pop * (it as f64 + 1.0));
        }
    }
    let n = runs.len() as f64;
    Ok(CellResult {
        index: cell,
        coords: cfg.cell_coords(cell),
        utility,
        curve: curve.values,
        success_rate: hits.len() as f64 / n,
        aes: (!hits.is_empty()).then(|| hits.iter().sum::<f64>() / hits.len() as f64),
        evaluations: runs.iter().map(|r| r.evaluations as f64).sum::<f64>() / n,
    })
}

/// Computes every cell and the scaled utilities against the campaign best.
pub fn landscape<O: Objective + ?Sized>(objective: &O, cfg: &LandscapeConfig) -> Result<Landscape> {
    cfg.validate()?;
    let mut cells: Vec<CellResult> = (0..cfg.cell_count())
        .map(|c| run_cell(objective, cfg, c))
        .collect::<Result<_>>()?;
    let (best_cell, best_ut) = cells
        .iter()
        .map(|c| c.utility.f_c)
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    for c in &mut cells {
        c.utility.scale(best_ut)?;
    }
    Ok(Landscape {
        config: cfg.clone(),
        cells,
        best_ut,
        best_cell,
    })
}
