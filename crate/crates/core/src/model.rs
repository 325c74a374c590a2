//! Structural and soil data model, the discrete design space, and the
//! mapping from real-valued genomes onto discrete designs.
//!
//! Units are SI throughout: metres, kN, kN/m, kPa, and MPa for concrete
//! grades.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spacing of the construction grid for member dimensions (m).
pub const DIMENSION_STEP: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    /// Global coordinates (m); z points up.
    pub coords: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemberRole {
    Beam,
    Column,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub id: String,
    pub start: String,
    pub end: String,
    pub role: MemberRole,
    pub group: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportKind {
    /// Rigid support with no footing to design.
    Fixed,
    /// Shallow footing; rigid when SSSI is off, soil springs when it is on.
    Spring,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub node: String,
    pub kind: SupportKind,
    /// Foundation group supplying the rectangularity variable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub footing_group: Option<String>,
}

/// Uniform load over the whole member, global components (kN/m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberLoad {
    pub member: String,
    pub q: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalLoad {
    pub node: String,
    /// Global force components (kN).
    pub force: [f64; 3],
    /// Global moment components (kN·m).
    #[serde(default)]
    pub moment: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadCase {
    pub name: String,
    #[serde(default)]
    pub member_loads: Vec<MemberLoad>,
    #[serde(default)]
    pub nodal_loads: Vec<NodalLoad>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombinationKind {
    /// Ultimate limit state: member design, 1st limit state of footings.
    Strength,
    /// Serviceability: beam deflections, 2nd limit state of footings, SSSI.
    Service,
    /// Lateral service combination for the top drift limit.
    Wind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Combination {
    pub name: String,
    pub kind: CombinationKind,
    /// Load-case name to factor.
    pub factors: BTreeMap<String, f64>,
    /// Factor applied to the generated self-weight.
    #[serde(default = "one")]
    pub self_weight: f64,
}

fn one() -> f64 {
    1.0
}

impl Combination {
    /// Combinations used when a model does not declare any: 1.2D + 1.6L,
    /// D + L, and D + W when a `wind` case exists. Case names `dead`, `live`
    /// and `wind` are looked up; missing cases simply contribute nothing.
    pub fn defaults(case_names: &[&str]) -> Vec<Combination> {
        let has = |n: &str| case_names.contains(&n);
        let factors = |pairs: &[(&str, f64)]| {
            pairs
                .iter()
                .filter(|(n, _)| has(n))
                .map(|(n, f)| (n.to_string(), *f))
                .collect::<BTreeMap<_, _>>()
        };
        let mut out = vec![
            Combination {
                name: "strength".into(),
                kind: CombinationKind::Strength,
                factors: factors(&[("dead", 1.2), ("live", 1.6)]),
                self_weight: 1.2,
            },
            Combination {
                name: "service".into(),
                kind: CombinationKind::Service,
                factors: factors(&[("dead", 1.0), ("live", 1.0)]),
                self_weight: 1.0,
            },
        ];
        if has("wind") {
            out.push(Combination {
                name: "strength_wind".into(),
                kind: CombinationKind::Strength,
                factors: factors(&[("dead", 1.2), ("live", 1.0), ("wind", 1.6)]),
                self_weight: 1.2,
            });
            out.push(Combination {
                name: "wind".into(),
                kind: CombinationKind::Wind,
                factors: factors(&[("dead", 1.0), ("wind", 1.0)]),
                self_weight: 1.0,
            });
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralModel {
    pub nodes: Vec<Node>,
    pub members: Vec<Member>,
    pub supports: Vec<Support>,
    #[serde(default)]
    pub load_cases: Vec<LoadCase>,
    #[serde(default)]
    pub combinations: Vec<Combination>,
    /// Total building height H (m).
    pub height: f64,
}

/// One violated model invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelIssue {
    pub item: String,
    pub message: String,
}

impl fmt::Display for ModelIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.item, self.message)
    }
}

impl StructuralModel {
    pub fn node_index(&self) -> HashMap<&str, usize> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect()
    }

    pub fn member_index(&self) -> HashMap<&str, usize> {
        self.members
            .iter()
            .enumerate()
            .map(|(i, m)| (m.id.as_str(), i))
            .collect()
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn member_length(&self, member: &Member) -> Option<f64> {
        let a = self.node(&member.start)?.coords;
        let b = self.node(&member.end)?.coords;
        Some(distance(&a, &b))
    }

    /// Declared combinations, or [`Combination::defaults`] when none are given.
    pub fn effective_combinations(&self) -> Vec<Combination> {
        if self.combinations.is_empty() {
            let names: Vec<&str> = self.load_cases.iter().map(|c| c.name.as_str()).collect();
            Combination::defaults(&names)
        } else {
            self.combinations.clone()
        }
    }

    /// Nodes at the top level of the building (maximum z).
    pub fn top_nodes(&self) -> Vec<usize> {
        let zmax = self
            .nodes
            .iter()
            .map(|n| n.coords[2])
            .fold(f64::NEG_INFINITY, f64::max);
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| (n.coords[2] - zmax).abs() < 1e-9)
            .map(|(i, _)| i)
            .collect()
    }

    /// Every violated invariant; empty iff the model is well formed.
    pub fn validate(&self) -> Vec<ModelIssue> {
        let mut issues = Vec::new();
        let mut push = |item: String, message: &str| {
            issues.push(ModelIssue {
                item,
                message: message.to_string(),
            })
        };

        let mut seen = HashSet::new();
        for n in &self.nodes {
            if !seen.insert(n.id.as_str()) {
                push(format!("node {}", n.id), "duplicate node id");
            }
            if n.coords.iter().any(|c| !c.is_finite()) {
                push(format!("node {}", n.id), "non-finite coordinate");
            }
        }
        let nodes: HashSet<&str> = self.nodes.iter().map(|n| n.id.as_str()).collect();

        let mut seen = HashSet::new();
        for m in &self.members {
            let item = format!("member {}", m.id);
            if !seen.insert(m.id.as_str()) {
                push(item.clone(), "duplicate member id");
            }
            let mut ends_ok = true;
            for end in [&m.start, &m.end] {
                if !nodes.contains(end.as_str()) {
                    push(item.clone(), &format!("end node `{end}` does not exist"));
                    ends_ok = false;
                }
            }
            if ends_ok && self.member_length(m).unwrap_or(0.0) <= 1e-9 {
                push(item.clone(), "zero length");
            }
            if m.group.trim().is_empty() {
                push(item.clone(), "member has no group");
            }
        }

        let mut seen = HashSet::new();
        for s in &self.supports {
            let item = format!("support {}", s.node);
            if !nodes.contains(s.node.as_str()) {
                push(item.clone(), "support node does not exist");
            }
            if !seen.insert(s.node.as_str()) {
                push(item, "duplicate support");
            }
        }

        if !(self.height > 0.0 && self.height.is_finite()) {
            push("height".into(), "building height H must be positive");
        }

        let members: HashSet<&str> = self.members.iter().map(|m| m.id.as_str()).collect();
        for case in &self.load_cases {
            for l in &case.member_loads {
                if !members.contains(l.member.as_str()) {
                    push(
                        format!("load case {}", case.name),
                        &format!("unknown member `{}`", l.member),
                    );
                }
            }
            for l in &case.nodal_loads {
                if !nodes.contains(l.node.as_str()) {
                    push(
                        format!("load case {}", case.name),
                        &format!("unknown node `{}`", l.node),
                    );
                }
            }
        }
        let cases: HashSet<&str> = self.load_cases.iter().map(|c| c.name.as_str()).collect();
        for combo in &self.combinations {
            for name in combo.factors.keys() {
                if !cases.contains(name.as_str()) {
                    push(
                        format!("combination {}", combo.name),
                        &format!("unknown load case `{name}`"),
                    );
                }
            }
        }
        issues
    }
}

pub(crate) fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2) + (b[2] - a[2]).powi(2)).sqrt()
}

// ---------------------------------------------------------------------------
// Soil
// ---------------------------------------------------------------------------

/// Calculation values of the soil strength parameters for one limit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoilStrength {
    /// Unit weight γ (kN/m³).
    pub gamma: f64,
    /// Cohesion c (kPa).
    pub cohesion: f64,
    /// Friction angle φ (degrees).
    pub phi_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoilLayer {
    pub thickness: f64,
    /// 1st limit state values (95 % design probability).
    pub first: SoilStrength,
    /// 2nd limit state values (85 % design probability).
    pub second: SoilStrength,
}

/// Per-footing overrides of the linearity limit and reference settlement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettlementParams {
    /// Linearity limit stress R* (kPa).
    pub r_star: f64,
    /// Settlement S̄ at p = R* (m).
    pub s_bar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoilProfile {
    pub layers: Vec<SoilLayer>,
    pub r_star: f64,
    pub s_bar: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub water_table: Option<f64>,
    /// Keyed by support node id.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub overrides: BTreeMap<String, SettlementParams>,
}

impl SoilProfile {
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::config("soil.layers", "at least one layer is required"));
        }
        for (i, layer) in self.layers.iter().enumerate() {
            if !(layer.thickness > 0.0) {
                return Err(Error::config(
                    format!("soil.layers[{i}].thickness"),
                    "must be positive",
                ));
            }
            for (tag, s) in [("first", &layer.first), ("second", &layer.second)] {
                let field = |f: &str| format!("soil.layers[{i}].{tag}.{f}");
                if !(s.gamma > 0.0) {
                    return Err(Error::config(field("gamma"), "must be positive"));
                }
                if !(s.cohesion >= 0.0) {
                    return Err(Error::config(field("cohesion"), "must be non-negative"));
                }
                if !(0.0..=50.0).contains(&s.phi_deg) {
                    return Err(Error::config(field("phi_deg"), "must lie in [0, 50] degrees"));
                }
            }
        }
        let check = |field: String, p: &SettlementParams| -> Result<()> {
            if !(p.r_star > 0.0) {
                return Err(Error::config(format!("{field}.r_star"), "must be positive"));
            }
            if !(p.s_bar > 0.0) {
                return Err(Error::config(format!("{field}.s_bar"), "must be positive"));
            }
            Ok(())
        };
        check(
            "soil".into(),
            &SettlementParams {
                r_star: self.r_star,
                s_bar: self.s_bar,
            },
        )?;
        for (node, p) in &self.overrides {
            check(format!("soil.overrides.{node}"), p)?;
        }
        Ok(())
    }

    /// Layer containing the given depth below ground (the last layer extends
    /// indefinitely).
    pub fn layer_at(&self, depth: f64) -> &SoilLayer {
        let mut top = 0.0;
        for layer in &self.layers {
            if depth < top + layer.thickness {
                return layer;
            }
            top += layer.thickness;
        }
        self.layers.last().expect("validated soil has layers")
    }

    /// Effective overburden stress at `depth` with the 1st-LS (`use_first`)
    /// or 2nd-LS unit weights, buoyant below the water table.
    pub fn overburden(&self, depth: f64, use_first: bool) -> f64 {
        const GAMMA_W: f64 = 9.81;
        let mut q = 0.0;
        let mut top = 0.0;
        for layer in &self.layers {
            if top >= depth {
                break;
            }
            let bottom = (top + layer.thickness).min(depth);
            let gamma = if use_first {
                layer.first.gamma
            } else {
                layer.second.gamma
            };
            match self.water_table {
                Some(w) if w < bottom => {
                    let dry = (w - top).max(0.0);
                    let wet = bottom - top - dry;
                    q += gamma * dry + (gamma - GAMMA_W).max(0.0) * wet;
                }
                _ => q += gamma * (bottom - top),
            }
            top += layer.thickness;
        }
        if top < depth {
            let last = self.layers.last().expect("validated soil has layers");
            let gamma = if use_first {
                last.first.gamma
            } else {
                last.second.gamma
            };
            q += gamma * (depth - top);
        }
        q
    }

    pub fn settlement_params(&self, node: &str) -> SettlementParams {
        self.overrides.get(node).copied().unwrap_or(SettlementParams {
            r_star: self.r_star,
            s_bar: self.s_bar,
        })
    }
}

// ---------------------------------------------------------------------------
// Design variables
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableKind {
    /// Cross-section dimension (m), a positive multiple of 0.05 m.
    Dimension,
    /// Footing plan ratio L/B.
    Rectangularity,
    /// Concrete compressive strength f'c (MPa).
    ConcreteGrade,
    /// Unconstrained real value (benchmark problems).
    Generic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignVariable {
    pub name: String,
    pub kind: VariableKind,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupRole {
    Beam,
    Column,
    Foundation,
}

/// Binds a model group to the variables that size it. Two groups naming
/// the same variable share its value (aliasing).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupBinding {
    pub group: String,
    pub role: GroupRole,
    /// Section width b (beams: horizontal; columns: along global y).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<String>,
    /// Section height h (beams: vertical; columns: along global x).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rectangularity: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignVariableSpec {
    pub variables: Vec<DesignVariable>,
    #[serde(default)]
    pub groups: Vec<GroupBinding>,
    /// Variable holding the concrete grade; `fixed_grade` is used otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concrete_grade: Option<String>,
    #[serde(default = "default_grade")]
    pub fixed_grade: f64,
}

fn default_grade() -> f64 {
    25.0
}

fn is_grid_multiple(v: f64) -> bool {
    let k = (v / DIMENSION_STEP).round();
    k >= 1.0 && (k * DIMENSION_STEP - v).abs() < 1e-9
}

impl DesignVariableSpec {
    /// Spec with unbound generic variables, for benchmark objectives.
    pub fn generic(lists: Vec<(String, Vec<f64>)>) -> Self {
        DesignVariableSpec {
            variables: lists
                .into_iter()
                .map(|(name, values)| DesignVariable {
                    name,
                    kind: VariableKind::Generic,
                    values,
                })
                .collect(),
            groups: Vec::new(),
            concrete_grade: None,
            fixed_grade: default_grade(),
        }
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn list_lengths(&self) -> Vec<usize> {
        self.variables.iter().map(|v| v.values.len()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn validate(&self) -> Result<()> {
        if self.variables.is_empty() {
            return Err(Error::Spec("no design variables".into()));
        }
        let mut names = HashSet::new();
        for v in &self.variables {
            if !names.insert(v.name.as_str()) {
                return Err(Error::Spec(format!("duplicate variable `{}`", v.name)));
            }
            if v.values.is_empty() {
                return Err(Error::Spec(format!("variable `{}` has no candidates", v.name)));
            }
            for &x in &v.values {
                let ok = match v.kind {
                    VariableKind::Dimension => is_grid_multiple(x),
                    VariableKind::Rectangularity | VariableKind::ConcreteGrade => x > 0.0,
                    VariableKind::Generic => x.is_finite(),
                };
                if !ok {
                    return Err(Error::Spec(format!(
                        "variable `{}`: invalid candidate {x} for kind {:?}",
                        v.name, v.kind
                    )));
                }
            }
        }
        let expect_kind = |name: &Option<String>, kind: VariableKind, what: &str, group: &str| {
            let name = name
                .as_ref()
                .ok_or_else(|| Error::Spec(format!("group `{group}` needs a {what} variable")))?;
            let var = self
                .variables
                .iter()
                .find(|v| &v.name == name)
                .ok_or_else(|| Error::Spec(format!("group `{group}`: unknown variable `{name}`")))?;
            if var.kind != kind {
                return Err(Error::Spec(format!(
                    "group `{group}`: variable `{name}` is {:?}, expected {kind:?}",
                    var.kind
                )));
            }
            Ok(())
        };
        for g in &self.groups {
            match g.role {
                GroupRole::Beam | GroupRole::Column => {
                    expect_kind(&g.width, VariableKind::Dimension, "width", &g.group)?;
                    expect_kind(&g.height, VariableKind::Dimension, "height", &g.group)?;
                }
                GroupRole::Foundation => {
                    expect_kind(
                        &g.rectangularity,
                        VariableKind::Rectangularity,
                        "rectangularity",
                        &g.group,
                    )?;
                }
            }
        }
        if let Some(name) = &self.concrete_grade {
            let var = self
                .variables
                .iter()
                .find(|v| &v.name == name)
                .ok_or_else(|| Error::Spec(format!("unknown concrete grade variable `{name}`")))?;
            if var.kind != VariableKind::ConcreteGrade {
                return Err(Error::Spec(format!("`{name}` is not a concrete grade variable")));
            }
        } else if !(self.fixed_grade > 0.0) {
            return Err(Error::Spec("fixed_grade must be positive".into()));
        }
        Ok(())
    }

    /// Number of distinct candidates; saturates at `u128::MAX`.
    pub fn candidate_count(&self) -> u128 {
        self.variables
            .iter()
            .fold(1u128, |acc, v| acc.saturating_mul(v.values.len() as u128))
    }

    /// Maps a genome onto the discrete space: component `g` is clamped to
    /// [0, 1] and selects entry `floor(g·m)` (capped at `m − 1`).
    pub fn decode(&self, genome: &[f64]) -> Result<DesignCandidate> {
        if genome.len() != self.variables.len() {
            return Err(Error::Spec(format!(
                "genome has {} components, spec has {} variables",
                genome.len(),
                self.variables.len()
            )));
        }
        let indices: Vec<usize> = genome
            .iter()
            .zip(&self.variables)
            .map(|(&g, v)| bin_index(g, v.values.len()))
            .collect();
        Ok(self.candidate_from_indices(indices, genome.to_vec()))
    }

    /// Genome at the centre of every bin of `indices`.
    pub fn encode_center(&self, indices: &[usize]) -> Vec<f64> {
        indices
            .iter()
            .zip(&self.variables)
            .map(|(&i, v)| (i as f64 + 0.5) / v.values.len() as f64)
            .collect()
    }

    pub fn candidate_from_indices(&self, indices: Vec<usize>, genome: Vec<f64>) -> DesignCandidate {
        let values = indices
            .iter()
            .zip(&self.variables)
            .map(|(&i, v)| v.values[i])
            .collect();
        DesignCandidate {
            indices,
            values,
            genome,
        }
    }

    /// All candidates in lexicographic index order (last variable fastest).
    pub fn enumerate(&self) -> CandidateIter<'_> {
        CandidateIter {
            spec: self,
            next: if self.variables.iter().any(|v| v.values.is_empty()) {
                None
            } else {
                Some(vec![0; self.variables.len()])
            },
        }
    }

    fn binding(&self, group: &str) -> Option<&GroupBinding> {
        self.groups.iter().find(|g| g.group == group)
    }

    fn lookup(&self, candidate: &DesignCandidate, name: &str) -> Option<f64> {
        self.index_of(name).map(|i| candidate.values[i])
    }

    /// Section (b, h) of a beam or column group.
    pub fn section_dims(&self, candidate: &DesignCandidate, group: &str) -> Option<(f64, f64)> {
        let g = self.binding(group)?;
        let b = self.lookup(candidate, g.width.as_deref()?)?;
        let h = self.lookup(candidate, g.height.as_deref()?)?;
        Some((b, h))
    }

    /// Footing rectangularity of a foundation group (1.0 when unbound).
    pub fn rectangularity(&self, candidate: &DesignCandidate, group: Option<&str>) -> f64 {
        group
            .and_then(|g| self.binding(g))
            .and_then(|g| g.rectangularity.as_deref())
            .and_then(|name| self.lookup(candidate, name))
            .unwrap_or(1.0)
    }

    pub fn grade(&self, candidate: &DesignCandidate) -> f64 {
        self.concrete_grade
            .as_deref()
            .and_then(|name| self.lookup(candidate, name))
            .unwrap_or(self.fixed_grade)
    }

    /// CSV header matching [`DesignCandidate::csv_row`].
    pub fn csv_header(&self) -> String {
        self.variables
            .iter()
            .map(|v| v.name.as_str())
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub(crate) fn bin_index(g: f64, m: usize) -> usize {
    let g = if g.is_nan() { 0.0 } else { g.clamp(0.0, 1.0) };
    ((g * m as f64).floor() as usize).min(m - 1)
}

/// One point of the discrete design space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignCandidate {
    /// Index into each candidate list, in spec order.
    pub indices: Vec<usize>,
    /// Chosen values, in spec order.
    pub values: Vec<f64>,
    /// Genome the candidate was decoded from (empty when enumerated).
    #[serde(default)]
    pub genome: Vec<f64>,
}

impl DesignCandidate {
    /// Canonical identity: the index vector, independent of the genome.
    pub fn key(&self) -> &[usize] {
        &self.indices
    }

    pub fn csv_row(&self) -> String {
        self.values
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub struct CandidateIter<'a> {
    spec: &'a DesignVariableSpec,
    next: Option<Vec<usize>>,
}

impl Iterator for CandidateIter<'_> {
    type Item = DesignCandidate;

    fn next(&mut self) -> Option<DesignCandidate> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let lens = self.spec.list_lengths();
        let mut k = succ.len();
        let mut advanced = false;
        while k > 0 {
            k -= 1;
            succ[k] += 1;
            if succ[k] < lens[k] {
                advanced = true;
                break;
            }
            succ[k] = 0;
        }
        if advanced {
            self.next = Some(succ);
        }
        Some(self.spec.candidate_from_indices(current, Vec::new()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec3() -> DesignVariableSpec {
        DesignVariableSpec::generic(vec![
            ("a".into(), vec![0.30, 0.35, 0.40]),
            ("b".into(), vec![1.0, 1.2, 1.4, 1.6]),
        ])
    }

    #[test]
    fn decode_bounds_and_midpoint() {
        let s = spec3();
        assert_eq!(s.decode(&[0.0, 0.0]).unwrap().values[0], 0.30);
        assert_eq!(s.decode(&[1.0, 0.0]).unwrap().values[0], 0.40);
        assert_eq!(s.decode(&[0.0, 0.5]).unwrap().values[1], 1.4);
        // clamping
        assert_eq!(s.decode(&[-3.0, 7.0]).unwrap().indices, vec![0, 3]);
        assert_eq!(s.decode(&[f64::NAN, 0.99]).unwrap().indices, vec![0, 3]);
    }

    #[test]
    fn decode_length_mismatch() {
        assert!(matches!(spec3().decode(&[0.1]), Err(Error::Spec(_))));
    }

    #[test]
    fn enumeration_counts() {
        let one = DesignVariableSpec::generic(vec![("x".into(), vec![1., 2., 3., 4., 5.])]);
        assert_eq!(one.enumerate().count(), 5);
        assert_eq!(one.candidate_count(), 5);
        let s = spec3();
        assert_eq!(s.enumerate().count(), 12);
        let all: Vec<_> = s.enumerate().map(|c| c.indices).collect();
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[11], vec![2, 3]);
    }

    #[test]
    fn table_one_sized_space() {
        let s = DesignVariableSpec::generic(vec![
            ("b".into(), vec![0.0; 9]),
            ("hb".into(), vec![0.0; 6]),
            ("hc".into(), vec![0.0; 6]),
        ]);
        assert_eq!(s.enumerate().count(), 324);
    }

    fn portal() -> StructuralModel {
        StructuralModel {
            nodes: vec![
                Node {
                    id: "1".into(),
                    coords: [0.0, 0.0, 0.0],
                },
                Node {
                    id: "2".into(),
                    coords: [6.0, 0.0, 0.0],
                },
            ],
            members: vec![Member {
                id: "m".into(),
                start: "1".into(),
                end: "2".into(),
                role: MemberRole::Beam,
                group: "g".into(),
            }],
            supports: vec![],
            load_cases: vec![],
            combinations: vec![],
            height: 3.0,
        }
    }

    #[test]
    fn validate_reports() {
        assert!(portal().validate().is_empty());

        let mut m = portal();
        m.members[0].end = "9".into();
        assert_eq!(m.validate().len(), 1);

        let mut m = portal();
        m.height = 0.0;
        let issues = m.validate();
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].item, "height");
    }

    #[test]
    fn dimension_grid_rule() {
        let mut s = DesignVariableSpec::generic(vec![("b".into(), vec![0.30, 0.35])]);
        s.variables[0].kind = VariableKind::Dimension;
        assert!(s.validate().is_ok());
        s.variables[0].values.push(0.33);
        assert!(s.validate().is_err());
        s.variables[0].values = vec![];
        assert!(s.validate().is_err());
    }

    #[test]
    fn aliasing_through_shared_variable() {
        let s = DesignVariableSpec {
            variables: vec![
                DesignVariable {
                    name: "b".into(),
                    kind: VariableKind::Dimension,
                    values: vec![0.25, 0.30],
                },
                DesignVariable {
                    name: "hb".into(),
                    kind: VariableKind::Dimension,
                    values: vec![0.50],
                },
                DesignVariable {
                    name: "hc".into(),
                    kind: VariableKind::Dimension,
                    values: vec![0.40],
                },
            ],
            groups: vec![
                GroupBinding {
                    group: "beams".into(),
                    role: GroupRole::Beam,
                    width: Some("b".into()),
                    height: Some("hb".into()),
                    rectangularity: None,
                },
                GroupBinding {
                    group: "cols".into(),
                    role: GroupRole::Column,
                    width: Some("b".into()),
                    height: Some("hc".into()),
                    rectangularity: None,
                },
            ],
            concrete_grade: None,
            fixed_grade: 25.0,
        };
        s.validate().unwrap();
        let c = s.decode(&[0.9, 0.0, 0.0]).unwrap();
        assert_eq!(s.section_dims(&c, "beams"), Some((0.30, 0.50)));
        assert_eq!(s.section_dims(&c, "cols"), Some((0.30, 0.40)));
        assert_eq!(s.grade(&c), 25.0);
    }
}
