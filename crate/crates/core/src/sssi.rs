//! Static soil-structure interaction: the fixed-point iteration between frame
//! analysis on spring supports and the secant stiffness of each footing.
//!
//! Step 1 is the analysis on rigid supports; it gives the first pressures and
//! the initial coefficients `k(1)`. Step `d ≥ 2` analyses the frame on the
//! springs `k(d−1)` and derives `k(d)` from the new pressures. The iteration
//! stops once no coefficient changes by more than the tolerance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foundation::{settlement, stiffness_coefficient};
use crate::model::{Combination, SettlementParams, StructuralModel};
use crate::rc::CheckResult;
use crate::solver::{FrameSolver, InternalForces, MemberSection, NodeRestraint, Restraint, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SssiConfig {
    /// Relative change of the coefficients accepted as converged.
    pub tol: f64,
    pub max_iter: usize,
    /// Steps after which the new coefficients are averaged with the old.
    pub damping_after: usize,
}

impl Default for SssiConfig {
    fn default() -> Self {
        SssiConfig {
            tol: 0.05,
            max_iter: 20,
            damping_after: 10,
        }
    }
}

impl SssiConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol <= 1.0) {
            return Err(Error::config("sssi.tol", "must lie in (0, 1]"));
        }
        if self.max_iter < 1 {
            return Err(Error::config("sssi.max_iter", "must be at least 1"));
        }
        Ok(())
    }
}

/// A footing seen by the iteration: fixed plan, bearing pressure and
/// hyperbola parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SpringFooting {
    pub node: usize,
    /// Side along global x (m).
    pub l: f64,
    /// Side along global y (m).
    pub b: f64,
    /// q*_br with 2nd limit state values (kPa).
    pub q_br: f64,
    pub params: SettlementParams,
}

impl SpringFooting {
    pub fn area(&self) -> f64 {
        self.l * self.b
    }

    /// Lumped springs of a rigid footing on a Winkler bed of coefficient `k`:
    /// vertical `k·A`, rocking `k·I` about each plan axis. Horizontal
    /// translations and twist are held.
    pub fn restraint(&self, k: f64) -> NodeRestraint {
        let k = k.max(0.0);
        NodeRestraint {
            node: self.node,
            dofs: [
                Restraint::Fixed,
                Restraint::Fixed,
                Restraint::Spring(k * self.area()),
                Restraint::Spring(k * self.l * self.b.powi(3) / 12.0),
                Restraint::Spring(k * self.b * self.l.powi(3) / 12.0),
                Restraint::Fixed,
            ],
        }
    }
}

/// Stiffness for the next step: zero when the footing lifted off
/// (`settlement < 0`), the secant coefficient of the current pressure
/// otherwise.
pub fn update_stiffness(pressure: f64, settlement: f64, params: &SettlementParams, q_br: f64) -> Result<f64> {
    if settlement < 0.0 || pressure <= 0.0 {
        return Ok(0.0);
    }
    stiffness_coefficient(pressure, params.s_bar, params.r_star, q_br)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoundationState {
    pub node: String,
    /// Step index, starting at 1 for the rigid-support analysis.
    pub iteration: usize,
    /// Coefficient used in this step's analysis (kPa/m); zero at step 1.
    pub k: f64,
    /// Vertical spring `k·L·B` (kN/m).
    pub spring: f64,
    /// Net contact pressure (kPa).
    pub pressure: f64,
    /// Settlement (m), positive downwards.
    pub settlement: f64,
    /// Coefficient derived from this step's pressure (kPa/m).
    pub k_next: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SssiOutcome {
    /// One result per combination, from the last analysis.
    #[serde(skip)]
    pub forces: Vec<InternalForces>,
    /// State of every footing at the last step.
    pub states: Vec<FoundationState>,
    /// Every footing state of every step, step-major.
    pub trace: Vec<FoundationState>,
    pub iterations: usize,
    pub converged: bool,
    /// Largest relative change at the last step.
    pub change: f64,
    pub tol: f64,
}

impl SssiOutcome {
    /// Non-convergence as a penalized check.
    pub fn convergence_check(&self) -> CheckResult {
        let c = CheckResult::new("sssi_convergence", self.change, self.tol);
        if self.converged {
            CheckResult {
                pass: true,
                ratio: c.ratio.min(1.0),
                ..c
            }
        } else {
            c.fail_with(format!("no convergence in {} steps", self.iterations), self.change / self.tol)
        }
    }
}

fn relative_change(old: f64, new: f64) -> f64 {
    let scale = old.abs().max(new.abs());
    if scale == 0.0 {
        0.0
    } else {
        (new - old).abs() / scale
    }
}

/// Coefficients `k(1)` from the reactions of the rigid-support analysis.
pub fn initial_states(
    model: &StructuralModel,
    footings: &[SpringFooting],
    reference: &InternalForces,
) -> Result<Vec<FoundationState>> {
    footings
        .iter()
        .map(|f| {
            let n = reference.reaction_at(f.node).map_or(0.0, |r| r[2]);
            let p = n / f.area();
            let (s, k) = if p > 0.0 {
                (
                    settlement(p, f.params.s_bar, f.params.r_star, f.q_br)?,
                    stiffness_coefficient(p, f.params.s_bar, f.params.r_star, f.q_br)?,
                )
            } else {
                (0.0, 0.0)
            };
            Ok(FoundationState {
                node: model.nodes[f.node].id.clone(),
                iteration: 1,
                k: 0.0,
                spring: 0.0,
                pressure: p,
                settlement: s,
                k_next: k,
            })
        })
        .collect()
}

/// Runs the iteration from the rigid-support reference result.
///
/// `rigid` holds restraints of supports without footings; `reference` picks
/// the combination whose pressures drive the coefficients.
#[allow(clippy::too_many_arguments)]
pub fn iterate(
    model: &StructuralModel,
    sections: &[MemberSection],
    rigid: &[NodeRestraint],
    footings: &[SpringFooting],
    combinations: &[Combination],
    reference: usize,
    initial: &InternalForces,
    cfg: &SssiConfig,
    options: SolverOptions,
) -> Result<SssiOutcome> {
    cfg.validate()?;
    if reference >= combinations.len() {
        return Err(Error::config("sssi.reference", "reference combination out of range"));
    }
    let mut states = initial_states(model, footings, initial)?;
    let mut trace = states.clone();
    let mut forces = Vec::new();
    let mut change = f64::INFINITY;
    let mut converged = false;
    let mut step = 1;

    while step < cfg.max_iter.max(2) {
        step += 1;
        let k_used: Vec<f64> = states.iter().map(|s| s.k_next).collect();
        let mut restraints = rigid.to_vec();
        restraints.extend(footings.iter().zip(&k_used).map(|(f, &k)| f.restraint(k)));
        let solver = FrameSolver::new(model, sections, &restraints, options)?;
        forces = combinations.iter().map(|c| solver.solve_combination(c)).collect();
        let reference_result: &InternalForces = &forces[reference];

        let mut next = Vec::with_capacity(footings.len());
        change = 0.0;
        for ((f, prev), &k) in footings.iter().zip(&states).zip(&k_used) {
            let s = -reference_result.displacements[f.node][2];
            let n = reference_result.reaction_at(f.node).map_or(0.0, |r| r[2]);
            let p = n / f.area();
            let mut k_new = update_stiffness(p, s, &f.params, f.q_br)?;
            if step > cfg.damping_after {
                k_new = 0.5 * (k_new + k);
            }
            let c = if k > 0.0 && k_new > 0.0 {
                relative_change(k, k_new)
            } else {
                relative_change(prev.settlement, s)
            };
            change = change.max(c);
            next.push(FoundationState {
                node: prev.node.clone(),
                iteration: step,
                k,
                spring: k * f.area(),
                pressure: p,
                settlement: s,
                k_next: k_new,
            });
        }
        trace.extend(next.iter().cloned());
        states = next;
        if change < cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(SssiOutcome {
        forces,
        states,
        trace,
        iterations: step,
        converged,
        change,
        tol: cfg.tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uplift_releases_the_spring() {
        let p = SettlementParams {
            r_star: 200.0,
            s_bar: 0.01,
        };
        assert_eq!(update_stiffness(150.0, -0.001, &p, 400.0).unwrap(), 0.0);
        assert_eq!(update_stiffness(200.0, 0.01, &p, 400.0).unwrap(), 20_000.0);
        assert!(matches!(
            update_stiffness(400.0, 0.01, &p, 400.0),
            Err(Error::BearingFailure { .. })
        ));
    }

    #[test]
    fn footing_springs() {
        let f = SpringFooting {
            node: 0,
            l: 2.0,
            b: 1.0,
            q_br: 400.0,
            params: SettlementParams {
                r_star: 200.0,
                s_bar: 0.01,
            },
        };
        let r = f.restraint(1000.0);
        assert_eq!(r.dofs[2], Restraint::Spring(2000.0));
        assert_eq!(r.dofs[3], Restraint::Spring(1000.0 * 2.0 / 12.0));
        assert_eq!(r.dofs[4], Restraint::Spring(1000.0 * 8.0 / 12.0));
        assert_eq!(r.dofs[0], Restraint::Fixed);
    }
}
