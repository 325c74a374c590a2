//! Full evaluation of one candidate: analysis (optionally with SSSI), member
//! and footing design, quantity takeoff, cost and penalty.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cost::{self, CostBreakdown, QuantityTakeoff, UnitCosts, SENTINEL_COST};
use crate::error::{Error, Result};
use crate::foundation::{size_footing, ColumnBaseForces, FootingContext, FootingDesign};
use crate::model::{CombinationKind, DesignCandidate, DesignVariableSpec, MemberRole, SupportKind};
use crate::objective::DiscreteObjective;
use crate::project::Project;
use crate::rc::{self, BeamDemand, BeamDesign, CheckResult, ColumnDemand, ColumnDesign};
use crate::solver::{FrameSolver, InternalForces, MemberSection, NodeRestraint};
use crate::sssi::{self, SpringFooting, SssiOutcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementCheck {
    pub element: String,
    #[serde(flatten)]
    pub check: CheckResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamReport {
    pub id: String,
    pub b: f64,
    pub h: f64,
    pub length: f64,
    pub demand: BeamDemand,
    pub design: BeamDesign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnReport {
    pub id: String,
    pub b: f64,
    pub h: f64,
    pub length: f64,
    pub design: ColumnDesign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FootingReport {
    pub node: String,
    pub rectangularity: f64,
    pub design: FootingDesign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub candidate: DesignCandidate,
    pub sssi_enabled: bool,
    pub fc: f64,
    pub direct_cost: f64,
    pub penalized_cost: f64,
    /// `Σ max(0, ratio − 1)` over failed checks.
    pub violation: f64,
    pub feasible: bool,
    /// Reason the candidate could not be evaluated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostBreakdown>,
    pub checks: Vec<ElementCheck>,
    pub beams: Vec<BeamReport>,
    pub columns: Vec<ColumnReport>,
    pub footings: Vec<FootingReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sssi: Option<SssiOutcome>,
    /// One result per combination, from the final analysis.
    #[serde(skip)]
    pub forces: Vec<InternalForces>,
}

impl Evaluation {
    fn failed(candidate: &DesignCandidate, sssi_enabled: bool, fc: f64, reason: String) -> Self {
        Evaluation {
            candidate: candidate.clone(),
            sssi_enabled,
            fc,
            direct_cost: 0.0,
            penalized_cost: SENTINEL_COST,
            violation: f64::INFINITY,
            feasible: false,
            failure: Some(reason),
            cost: None,
            checks: Vec::new(),
            beams: Vec::new(),
            columns: Vec::new(),
            footings: Vec::new(),
            sssi: None,
            forces: Vec::new(),
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &ElementCheck> {
        self.checks.iter().filter(|c| !c.check.pass)
    }
}

/// Evaluates candidates of one project.
pub struct Evaluator<'p> {
    project: &'p Project,
    costs: &'p UnitCosts,
    sssi: bool,
}

struct Footprint {
    support: usize,
    node: usize,
    /// Column plan size along x and y.
    column: (f64, f64),
}

impl<'p> Evaluator<'p> {
    pub fn new(project: &'p Project, sssi: bool) -> Result<Self> {
        project.validate(true)?;
        let costs = project.costs.as_ref().expect("validated project has costs");
        Ok(Evaluator { project, costs, sssi })
    }

    pub fn project(&self) -> &Project {
        self.project
    }

    pub fn sssi_enabled(&self) -> bool {
        self.sssi
    }

    pub fn evaluate(&self, candidate: &DesignCandidate) -> Evaluation {
        let fc = self.project.spec.grade(candidate);
        match self.run(candidate, fc) {
            Ok(e) => e,
            Err(e) => Evaluation::failed(candidate, self.sssi, fc, e.to_string()),
        }
    }

    fn sections(&self, candidate: &DesignCandidate, fc: f64) -> Result<HashMap<String, MemberSection>> {
        let mut out = HashMap::new();
        for m in &self.project.model.members {
            if out.contains_key(&m.group) {
                continue;
            }
            let (b, h) = self
                .project
                .spec
                .section_dims(candidate, &m.group)
                .ok_or_else(|| Error::config(format!("spec.groups.{}", m.group), "no section variables"))?;
            out.insert(m.group.clone(), MemberSection::new(b, h, fc)?);
        }
        Ok(out)
    }

    fn footprints(&self, by_group: &HashMap<String, MemberSection>) -> Vec<Footprint> {
        let model = &self.project.model;
        let index = model.node_index();
        model
            .supports
            .iter()
            .enumerate()
            .filter(|(_, s)| s.kind == SupportKind::Spring)
            .map(|(i, s)| {
                let col = model
                    .members
                    .iter()
                    .find(|m| m.role == MemberRole::Column && (m.start == s.node || m.end == s.node))
                    .expect("validated footing has a column");
                let sec = by_group[&col.group];
                Footprint {
                    support: i,
                    node: index[s.node.as_str()],
                    column: (sec.h, sec.b),
                }
            })
            .collect()
    }

    fn design_footings(
        &self,
        candidate: &DesignCandidate,
        fc: f64,
        prints: &[Footprint],
        forces: &[InternalForces],
    ) -> Result<Vec<FootingReport>> {
        let project = self.project;
        let Some(soil) = project.soil.as_ref() else {
            return Ok(Vec::new());
        };
        let combos = project.model.effective_combinations();
        let mut out = Vec::with_capacity(prints.len());
        for fp in prints {
            let support = &project.model.supports[fp.support];
            let mut first = Vec::new();
            let mut second = Vec::new();
            for (c, f) in combos.iter().zip(forces) {
                let r = f.reaction_at(fp.node).unwrap_or([0.0; 6]);
                let base = ColumnBaseForces::from_reaction(&r);
                match c.kind {
                    CombinationKind::Strength => first.push(base),
                    CombinationKind::Service | CombinationKind::Wind => second.push(base),
                }
            }
            let r = project.spec.rectangularity(candidate, support.footing_group.as_deref());
            let ctx = FootingContext {
                soil,
                params: soil.settlement_params(&support.node),
                cfg: &project.config.foundation,
                rc: &project.config.rc,
                fc,
                column: fp.column,
            };
            out.push(FootingReport {
                node: support.node.clone(),
                rectangularity: r,
                design: size_footing(&ctx, r, &first, &second)?,
            });
        }
        Ok(out)
    }

    fn run(&self, candidate: &DesignCandidate, fc: f64) -> Result<Evaluation> {
        let project = self.project;
        let model = &project.model;
        let cfg = &project.config;
        let combos = model.effective_combinations();
        let by_group = self.sections(candidate, fc)?;
        let per_member: Vec<MemberSection> = model.members.iter().map(|m| by_group[&m.group]).collect();
        let index = model.node_index();
        let all_fixed: Vec<NodeRestraint> = model
            .supports
            .iter()
            .map(|s| NodeRestraint::fixed(index[s.node.as_str()]))
            .collect();

        let solver = FrameSolver::new(model, &per_member, &all_fixed, cfg.solver)?;
        let rigid_forces: Vec<InternalForces> = combos.iter().map(|c| solver.solve_combination(c)).collect();
        let prints = self.footprints(&by_group);

        let (forces, footings, sssi_outcome) = if self.sssi && !prints.is_empty() {
            let initial = self.design_footings(candidate, fc, &prints, &rigid_forces)?;
            let soil = project.soil.as_ref().expect("validated footing has soil");
            let springs: Vec<SpringFooting> = prints
                .iter()
                .zip(&initial)
                .map(|(fp, rep)| SpringFooting {
                    node: fp.node,
                    l: rep.design.footing.l,
                    b: rep.design.footing.b,
                    q_br: rep.design.checks.geotechnical.q_br_second,
                    params: soil.settlement_params(&model.nodes[fp.node].id),
                })
                .collect();
            let rigid: Vec<NodeRestraint> = model
                .supports
                .iter()
                .filter(|s| s.kind == SupportKind::Fixed)
                .map(|s| NodeRestraint::fixed(index[s.node.as_str()]))
                .collect();
            let reference = combos
                .iter()
                .position(|c| c.kind == CombinationKind::Service)
                .unwrap_or(0);
            let outcome = sssi::iterate(
                model,
                &per_member,
                &rigid,
                &springs,
                &combos,
                reference,
                &rigid_forces[reference],
                &cfg.sssi,
                cfg.solver,
            )?;
            let forces = outcome.forces.clone();
            let footings = self.design_footings(candidate, fc, &prints, &forces)?;
            (forces, footings, Some(outcome))
        } else {
            let footings = self.design_footings(candidate, fc, &prints, &rigid_forces)?;
            (rigid_forces, footings, None)
        };

        let strength: Vec<&InternalForces> = combos
            .iter()
            .zip(&forces)
            .filter(|(c, _)| c.kind == CombinationKind::Strength)
            .map(|(_, f)| f)
            .collect();
        let service: Vec<&InternalForces> = combos
            .iter()
            .zip(&forces)
            .filter(|(c, _)| c.kind == CombinationKind::Service)
            .map(|(_, f)| f)
            .collect();
        let wind: Vec<&InternalForces> = combos
            .iter()
            .zip(&forces)
            .filter(|(c, _)| c.kind == CombinationKind::Wind)
            .map(|(_, f)| f)
            .collect();
        let lateral = if wind.is_empty() { service.clone() } else { wind };

        let mut checks = Vec::new();
        let mut takeoff = QuantityTakeoff::default();
        let mut beams = Vec::new();
        let mut columns = Vec::new();
        for (i, m) in model.members.iter().enumerate() {
            let sec = per_member[i];
            let length = model.member_length(m).unwrap_or(0.0);
            match m.role {
                MemberRole::Beam => {
                    let mut demand = BeamDemand::default();
                    for f in &strength {
                        for s in &f.members[i].stations {
                            demand.m_pos = demand.m_pos.max(s.moment_z);
                            demand.m_neg = demand.m_neg.max(-s.moment_z);
                            demand.v_max = demand.v_max.max(s.shear_y.abs());
                        }
                    }
                    let design = rc::design_beam(&sec, &demand, &cfg.rc);
                    for c in &design.checks {
                        checks.push(ElementCheck {
                            element: m.id.clone(),
                            check: c.clone(),
                        });
                    }
                    takeoff.elements.push(cost::beam_quantities(
                        &m.id,
                        sec.b,
                        sec.h,
                        length,
                        fc,
                        &design.layout,
                        cfg.rc.cover,
                    ));
                    beams.push(BeamReport {
                        id: m.id.clone(),
                        b: sec.b,
                        h: sec.h,
                        length,
                        demand,
                        design,
                    });
                }
                MemberRole::Column => {
                    let demands: Vec<ColumnDemand> = strength
                        .iter()
                        .flat_map(|f| f.members[i].stations.iter())
                        .map(|s| ColumnDemand {
                            pu: -s.axial,
                            m_strong: s.moment_z.abs(),
                            m_weak: s.moment_y.abs(),
                            vu: s.shear_y.hypot(s.shear_z),
                        })
                        .collect();
                    let design = rc::design_column(&sec, &demands, &cfg.rc);
                    for c in &design.checks {
                        checks.push(ElementCheck {
                            element: m.id.clone(),
                            check: c.clone(),
                        });
                    }
                    takeoff.elements.push(cost::column_quantities(
                        &m.id,
                        sec.b,
                        sec.h,
                        length,
                        fc,
                        &design.layout,
                        cfg.rc.cover,
                    ));
                    columns.push(ColumnReport {
                        id: m.id.clone(),
                        b: sec.b,
                        h: sec.h,
                        length,
                        design,
                    });
                }
            }
        }
        for c in rc::check_serviceability(&service, &lateral, model) {
            let element = c.name.split_once(':').map_or("building", |(_, id)| id).to_string();
            checks.push(ElementCheck { element, check: c });
        }
        for f in &footings {
            for c in f.design.checks.all() {
                checks.push(ElementCheck {
                    element: f.node.clone(),
                    check: c.clone(),
                });
            }
            takeoff.elements.push(cost::footing_quantities(
                &f.node,
                &f.design.footing,
                cfg.foundation.bar_cover,
                cfg.foundation.clearance,
            ));
        }
        if let Some(o) = &sssi_outcome {
            checks.push(ElementCheck {
                element: "sssi".into(),
                check: o.convergence_check(),
            });
        }

        let breakdown = cost::direct_cost(&takeoff, self.costs)?;
        let violation = cost::total_violation(checks.iter().map(|c| &c.check));
        let penalized = cost::penalize(breakdown.total, checks.iter().map(|c| &c.check), cfg.penalty);
        let feasible = checks.iter().all(|c| c.check.pass) && footings.iter().all(|f| f.design.feasible);
        Ok(Evaluation {
            candidate: candidate.clone(),
            sssi_enabled: self.sssi,
            fc,
            direct_cost: breakdown.total,
            penalized_cost: penalized,
            violation,
            feasible,
            failure: None,
            cost: Some(breakdown),
            checks,
            beams,
            columns,
            footings,
            sssi: sssi_outcome,
            forces,
        })
    }
}

impl DiscreteObjective for Evaluator<'_> {
    fn spec(&self) -> &DesignVariableSpec {
        &self.project.spec
    }

    fn evaluate_candidate(&self, candidate: &DesignCandidate) -> f64 {
        self.evaluate(candidate).penalized_cost
    }
}
