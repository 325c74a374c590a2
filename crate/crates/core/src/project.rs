//! The project document: structure, soil, design space, unit costs and
//! design settings in one JSON file.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cost::UnitCosts;
use crate::error::{Error, Result};
use crate::foundation::FoundationConfig;
use crate::model::{DesignVariableSpec, GroupRole, MemberRole, SoilProfile, StructuralModel, SupportKind, VariableKind};
use crate::rc::RcConfig;
use crate::solver::SolverOptions;
use crate::sssi::SssiConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DesignConfig {
    pub rc: RcConfig,
    pub foundation: FoundationConfig,
    pub sssi: SssiConfig,
    pub solver: SolverOptions,
    /// Penalty factor P.
    pub penalty: f64,
}

impl Default for DesignConfig {
    fn default() -> Self {
        DesignConfig {
            rc: RcConfig::default(),
            foundation: FoundationConfig::default(),
            sssi: SssiConfig::default(),
            solver: SolverOptions::default(),
            penalty: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Project {
    pub model: StructuralModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub soil: Option<SoilProfile>,
    pub spec: DesignVariableSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub costs: Option<UnitCosts>,
    #[serde(default)]
    pub config: DesignConfig,
}

/// Reads and parses a JSON file, naming the file in errors.
pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

impl Project {
    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))
    }

    /// Concrete grades a candidate can take.
    pub fn grades(&self) -> Vec<f64> {
        match self
            .spec
            .concrete_grade
            .as_deref()
            .and_then(|n| self.spec.variables.iter().find(|v| v.name == n))
        {
            Some(v) => v.values.clone(),
            None => vec![self.spec.fixed_grade],
        }
    }

    pub fn has_footings(&self) -> bool {
        self.model.supports.iter().any(|s| s.kind == SupportKind::Spring)
    }

    /// Checks the structure, soil, design space and their cross references.
    /// Unit costs are only required when `need_costs` is set.
    pub fn validate(&self, need_costs: bool) -> Result<()> {
        let issues = self.model.validate();
        if !issues.is_empty() {
            let text: Vec<String> = issues.iter().map(|i| i.to_string()).collect();
            return Err(Error::Model(text.join("; ")));
        }
        self.spec.validate()?;
        if let Some(soil) = &self.soil {
            soil.validate()?;
        }

        let groups: BTreeSet<&str> = self.model.members.iter().map(|m| m.group.as_str()).collect();
        for g in groups {
            let role = self
                .model
                .members
                .iter()
                .find(|m| m.group == g)
                .map(|m| m.role)
                .expect("group has members");
            let binding = self
                .spec
                .groups
                .iter()
                .find(|b| b.group == g)
                .ok_or_else(|| Error::config(format!("spec.groups.{g}"), "member group has no variable binding"))?;
            let expected = match role {
                MemberRole::Beam => GroupRole::Beam,
                MemberRole::Column => GroupRole::Column,
            };
            if binding.role != expected {
                return Err(Error::config(
                    format!("spec.groups.{g}.role"),
                    format!("members are {role:?} but the binding says {:?}", binding.role),
                ));
            }
            if self.model.members.iter().any(|m| m.group == g && m.role != role) {
                return Err(Error::config(format!("model.group.{g}"), "mixes beams and columns"));
            }
        }

        for s in &self.model.supports {
            if s.kind != SupportKind::Spring {
                continue;
            }
            if self.soil.is_none() {
                return Err(Error::config("soil", format!("support {} has a footing but no soil is given", s.node)));
            }
            let touches_column = self
                .model
                .members
                .iter()
                .any(|m| m.role == MemberRole::Column && (m.start == s.node || m.end == s.node));
            if !touches_column {
                return Err(Error::config(
                    format!("model.supports.{}", s.node),
                    "a footing needs a column framing into its node",
                ));
            }
            if let Some(g) = &s.footing_group {
                let ok = self
                    .spec
                    .groups
                    .iter()
                    .any(|b| &b.group == g && b.role == GroupRole::Foundation);
                if !ok {
                    return Err(Error::config(
                        format!("model.supports.{}.footing_group", s.node),
                        format!("`{g}` is not a foundation group of the spec"),
                    ));
                }
            }
        }
        if self
            .spec
            .variables
            .iter()
            .any(|v| v.kind == VariableKind::Generic)
        {
            return Err(Error::config("spec.variables", "structural projects cannot use generic variables"));
        }

        self.config.sssi.validate()?;
        if !(self.config.penalty >= 0.0) {
            return Err(Error::config("config.penalty", "must be non-negative"));
        }
        if need_costs {
            let costs = self
                .costs
                .as_ref()
                .ok_or_else(|| Error::config("costs", "unit costs are required (embed them or pass a cost file)"))?;
            costs.validate()?;
            costs.require_grades(&self.grades())?;
        }
        Ok(())
    }
}
