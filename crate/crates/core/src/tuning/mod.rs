//! Parameter tuning: average performance curves, utilities A, B and C, the
//! scaled utility, utility landscapes, the evaluation cache and benchmark
//! objectives.

pub mod benchmark;
pub mod cache;
pub mod landscape;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Intervals of the average curve; the curve has one more point.
pub const DEFAULT_INTERVALS: usize = 14;
/// Weight of utility A in utility C.
pub const DEFAULT_Z: f64 = 4.0;
/// Runs averaged per configuration.
pub const DEFAULT_RUNS: usize = 30;

/// Average best-HSI curve sampled at `n + 1` checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceCurve {
    pub values: Vec<f64>,
    /// Runs averaged.
    pub runs: usize,
    /// Iterations between checkpoints.
    pub interval: f64,
}

impl PerformanceCurve {
    pub fn intervals(&self) -> usize {
        self.values.len().saturating_sub(1)
    }
}

/// Pointwise mean of equally long series.
pub fn mean_series(histories: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = histories
        .first()
        .ok_or_else(|| Error::Input("at least one history is required".into()))?;
    let len = first.len();
    if len == 0 {
        return Err(Error::Input("histories must not be empty".into()));
    }
    if let Some(h) = histories.iter().find(|h| h.len() != len) {
        return Err(Error::Input(format!(
            "histories have different horizons ({} and {})",
            len,
            h.len()
        )));
    }
    let n = histories.len() as f64;
    Ok((0..len)
        .map(|i| histories.iter().map(|h| h[i]).sum::<f64>() / n)
        .collect())
}

/// Mean of the histories at `intervals + 1` equally spaced checkpoints,
/// each taken at the nearest recorded iteration.
pub fn average_curve(histories: &[Vec<f64>], intervals: usize) -> Result<PerformanceCurve> {
    if intervals == 0 {
        return Err(Error::config("intervals", "must be at least 1"));
    }
    let mean = mean_series(histories)?;
    let horizon = (mean.len() - 1) as f64;
    let values = (0..=intervals)
        .map(|i| {
            let idx = (i as f64 * horizon / intervals as f64).round() as usize;
            mean[idx.min(mean.len() - 1)]
        })
        .collect();
    Ok(PerformanceCurve {
        values,
        runs: histories.len(),
        interval: horizon / intervals as f64,
    })
}

/// Last point of the curve.
pub fn utility_a(curve: &[f64]) -> f64 {
    *curve.last().expect("curve is not empty")
}

/// Trapezoid area under the curve divided by the number of intervals.
pub fn utility_b(curve: &[f64]) -> f64 {
    let n = curve.len() - 1;
    if n == 0 {
        return curve[0];
    }
    curve.windows(2).map(|w| (w[0] + w[1]) / 2.0).sum::<f64>() / n as f64
}

/// `(Z·F_A + F_B)/(1 + Z)`.
pub fn utility_c(f_a: f64, f_b: f64, z: f64) -> Result<f64> {
    if !(z >= 1.0) {
        return Err(Error::config("z", format!("weight must be at least 1, got {z}")));
    }
    if z.is_infinite() {
        return Ok(f_a);
    }
    Ok((z * f_a + f_b) / (1.0 + z))
}

/// `(1 − (CUtil − BestUt)/CUtil)·100`.
pub fn scaled_utility(c_util: f64, best_ut: f64) -> Result<f64> {
    if best_ut > c_util {
        return Err(Error::Input(format!(
            "best utility {best_ut} exceeds the scaled utility {c_util}"
        )));
    }
    if c_util == best_ut {
        return Ok(100.0);
    }
    if !(c_util > 0.0) {
        return Err(Error::Input(format!("utility must be positive, got {c_util}")));
    }
    Ok((1.0 - (c_util - best_ut) / c_util) * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityReport {
    pub f_a: f64,
    pub f_b: f64,
    pub f_c: f64,
    pub z: f64,
    /// Filled once the best utility of the campaign is known.
    pub best_ut: Option<f64>,
    pub sc_ut: Option<f64>,
}

impl UtilityReport {
    pub fn from_curve(curve: &PerformanceCurve, z: f64) -> Result<Self> {
        let f_a = utility_a(&curve.values);
        let f_b = utility_b(&curve.values);
        Ok(UtilityReport {
            f_a,
            f_b,
            f_c: utility_c(f_a, f_b, z)?,
            z,
            best_ut: None,
            sc_ut: None,
        })
    }

    pub fn scale(&mut self, best_ut: f64) -> Result<()> {
        self.sc_ut = Some(scaled_utility(self.f_c, best_ut)?);
        self.best_ut = Some(best_ut);
        Ok(())
    }
}

/// SplitMix64 finalizer, used to derive independent seeds.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of run `run` of cell `cell` under `master`.
pub fn run_seed(master: u64, cell: u64, run: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ cell) ^ run)
}
