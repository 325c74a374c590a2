//! Quantity takeoff, direct cost from unit costs, and the penalty rule.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foundation::Footing;
use crate::rc::{bar_area, BarGroup, CheckResult, ColumnLayout, ReinforcementLayout, Stirrups};

/// Density of reinforcing steel (kg/m³).
pub const STEEL_DENSITY: f64 = 7850.0;

/// Cost assigned to candidates that could not be evaluated at all.
pub const SENTINEL_COST: f64 = 1e9;

/// Unit costs of one element family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementUnitCosts {
    /// $/m² of formwork.
    pub formwork: f64,
    /// $/kg of stirrups, cutting and bending.
    pub stirrup_elaboration: f64,
    /// $/kg of stirrups, assembly and placement.
    pub stirrup_placement: f64,
    /// $/kg of longitudinal bars, cutting and bending.
    pub bar_elaboration: f64,
    /// $/kg of longitudinal bars, assembly and placement.
    pub bar_placement: f64,
    /// $/m³ of concrete production, keyed by grade in MPa (e.g. `"25"`).
    pub concrete_elaboration: BTreeMap<String, f64>,
    /// $/m³ of concrete placement.
    pub concrete_placement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitCosts {
    pub beams: ElementUnitCosts,
    pub columns: ElementUnitCosts,
    pub foundations: ElementUnitCosts,
    /// $/m³ excavated.
    pub excavation: f64,
    /// $/m³ backfilled.
    pub refill: f64,
}

fn grade_key(fc: f64) -> String {
    if fc.fract() == 0.0 {
        format!("{}", fc as i64)
    } else {
        format!("{fc}")
    }
}

impl ElementUnitCosts {
    fn validate(&self, prefix: &str) -> Result<()> {
        let scalars = [
            ("formwork", self.formwork),
            ("stirrup_elaboration", self.stirrup_elaboration),
            ("stirrup_placement", self.stirrup_placement),
            ("bar_elaboration", self.bar_elaboration),
            ("bar_placement", self.bar_placement),
            ("concrete_placement", self.concrete_placement),
        ];
        for (name, v) in scalars {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::config(format!("{prefix}.{name}"), "must be a finite non-negative number"));
            }
        }
        for (grade, v) in &self.concrete_elaboration {
            if !(*v >= 0.0) || !v.is_finite() {
                return Err(Error::config(
                    format!("{prefix}.concrete_elaboration.{grade}"),
                    "must be a finite non-negative number",
                ));
            }
        }
        Ok(())
    }

    fn concrete(&self, fc: f64, prefix: &str) -> Result<f64> {
        let key = grade_key(fc);
        self.concrete_elaboration.get(&key).copied().ok_or_else(|| {
            Error::config(
                format!("{prefix}.concrete_elaboration.{key}"),
                format!("no unit cost for concrete grade {key} MPa"),
            )
        })
    }
}

impl UnitCosts {
    pub fn validate(&self) -> Result<()> {
        self.beams.validate("costs.beams")?;
        self.columns.validate("costs.columns")?;
        self.foundations.validate("costs.foundations")?;
        for (name, v) in [("excavation", self.excavation), ("refill", self.refill)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::config(format!("costs.{name}"), "must be a finite non-negative number"));
            }
        }
        Ok(())
    }

    /// Fails when any element family lacks a price for one of `grades`.
    pub fn require_grades(&self, grades: &[f64]) -> Result<()> {
        for &fc in grades {
            self.beams.concrete(fc, "costs.beams")?;
            self.columns.concrete(fc, "costs.columns")?;
            self.foundations.concrete(fc, "costs.foundations")?;
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> UnitCosts {
        let s = |e: &ElementUnitCosts| ElementUnitCosts {
            formwork: e.formwork * factor,
            stirrup_elaboration: e.stirrup_elaboration * factor,
            stirrup_placement: e.stirrup_placement * factor,
            bar_elaboration: e.bar_elaboration * factor,
            bar_placement: e.bar_placement * factor,
            concrete_elaboration: e.concrete_elaboration.iter().map(|(k, v)| (k.clone(), v * factor)).collect(),
            concrete_placement: e.concrete_placement * factor,
        };
        UnitCosts {
            beams: s(&self.beams),
            columns: s(&self.columns),
            foundations: s(&self.foundations),
            excavation: self.excavation * factor,
            refill: self.refill * factor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Beam,
    Column,
    Foundation,
}

impl ElementKind {
    pub fn family(&self) -> &'static str {
        match self {
            ElementKind::Beam => "beams",
            ElementKind::Column => "columns",
            ElementKind::Foundation => "foundations",
        }
    }
}

/// Measured quantities of one element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementQuantities {
    pub id: String,
    pub kind: ElementKind,
    pub fc: f64,
    /// m³
    pub concrete: f64,
    /// m²
    pub formwork: f64,
    /// kg
    pub bar_mass: f64,
    /// kg
    pub stirrup_mass: f64,
    /// m³
    pub excavation: f64,
    /// m³
    pub refill: f64,
}

impl ElementQuantities {
    fn empty(id: &str, kind: ElementKind, fc: f64) -> Self {
        ElementQuantities {
            id: id.to_string(),
            kind,
            fc,
            concrete: 0.0,
            formwork: 0.0,
            bar_mass: 0.0,
            stirrup_mass: 0.0,
            excavation: 0.0,
            refill: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct QuantityTakeoff {
    pub elements: Vec<ElementQuantities>,
}

/// Mass of `count` bars of one diameter over `length` (kg).
pub fn bar_mass(bars: &BarGroup, length: f64) -> f64 {
    bars.area() * length * STEEL_DENSITY
}

/// Closed-hoop length around a `b`×`h` section: perimeter inside the cover
/// plus two hooks of ten diameters.
fn hoop_length(b: f64, h: f64, cover: f64, st: &Stirrups) -> f64 {
    let d = st.diameter_mm / 1000.0;
    2.0 * ((b - 2.0 * cover).max(0.0) + (h - 2.0 * cover).max(0.0)) + 20.0 * d
}

fn stirrup_mass(length: f64, b: f64, h: f64, cover: f64, st: &Stirrups) -> f64 {
    let count = (length / st.spacing + 1e-9).floor() + 1.0;
    // `legs` counts vertical legs, one closed hoop per pair
    let hoops = (st.legs as f64 / 2.0).max(1.0);
    count * hoops * hoop_length(b, h, cover, st) * bar_area(st.diameter_mm) * STEEL_DENSITY
}

/// Top bars extend over `0.3·L` from each support.
pub const TOP_BAR_ZONE: f64 = 0.3;
/// Lap splice of column bars, in bar diameters.
pub const COLUMN_LAP: f64 = 40.0;

pub fn beam_quantities(id: &str, b: f64, h: f64, length: f64, fc: f64, layout: &ReinforcementLayout, cover: f64) -> ElementQuantities {
    let mut q = ElementQuantities::empty(id, ElementKind::Beam, fc);
    q.concrete = b * h * length;
    q.formwork = (2.0 * h + b) * length;
    q.bar_mass = bar_mass(&layout.bottom, length) + bar_mass(&layout.top, 2.0 * TOP_BAR_ZONE * length);
    q.stirrup_mass = stirrup_mass(length, b, h, cover, &layout.stirrups);
    q
}

pub fn column_quantities(id: &str, b: f64, h: f64, length: f64, fc: f64, layout: &ColumnLayout, cover: f64) -> ElementQuantities {
    let mut q = ElementQuantities::empty(id, ElementKind::Column, fc);
    q.concrete = b * h * length;
    q.formwork = 2.0 * (b + h) * length;
    let bars = BarGroup {
        diameter_mm: layout.diameter_mm,
        count: layout.bar_count(),
    };
    q.bar_mass = bar_mass(&bars, length + COLUMN_LAP * layout.diameter_mm / 1000.0);
    q.stirrup_mass = stirrup_mass(length, b, h, cover, &layout.stirrups);
    q
}

pub fn footing_quantities(id: &str, footing: &Footing, bar_cover: f64, clearance: f64) -> ElementQuantities {
    let mut q = ElementQuantities::empty(id, ElementKind::Foundation, footing.fc);
    q.concrete = footing.concrete_volume() + footing.stub_volume();
    let (cx, cy) = footing.column;
    let stub_height = (footing.depth - footing.thickness).max(0.0);
    q.formwork = 2.0 * (footing.l + footing.b) * footing.thickness + 2.0 * (cx + cy) * stub_height;
    q.bar_mass = bar_mass(&footing.bars_l, (footing.l - 2.0 * bar_cover).max(0.0))
        + bar_mass(&footing.bars_b, (footing.b - 2.0 * bar_cover).max(0.0));
    q.excavation = footing.excavation_volume(clearance);
    q.refill = footing.refill_volume(clearance);
    q
}

/// Cost category of the breakdown CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Formwork,
    Steel,
    Concrete,
    Earthwork,
}

impl Category {
    pub fn as_str(&self) -> &'static str {
        match self {
            Category::Formwork => "formwork",
            Category::Steel => "steel",
            Category::Concrete => "concrete",
            Category::Earthwork => "earthwork",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostTerm {
    /// `beams`, `columns` or `foundations`.
    pub family: String,
    pub term: String,
    pub category: Category,
    pub quantity: f64,
    pub unit_cost: f64,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub terms: Vec<CostTerm>,
    pub total: f64,
}

impl CostBreakdown {
    pub fn family_total(&self, family: &str) -> f64 {
        self.terms.iter().filter(|t| t.family == family).map(|t| t.amount).fold(0.0, |a, b| a + b)
    }

    pub fn category_total(&self, category: Category) -> f64 {
        self.terms.iter().filter(|t| t.category == category).map(|t| t.amount).fold(0.0, |a, b| a + b)
    }

    /// Beams plus columns.
    pub fn superstructure(&self) -> f64 {
        self.family_total("beams") + self.family_total("columns")
    }
}

/// Direct cost, one term per element family and cost item; concrete
/// production is split by grade.
pub fn direct_cost(takeoff: &QuantityTakeoff, costs: &UnitCosts) -> Result<CostBreakdown> {
    let mut terms = Vec::new();
    for kind in [ElementKind::Beam, ElementKind::Column, ElementKind::Foundation] {
        let family = kind.family();
        let unit = match kind {
            ElementKind::Beam => &costs.beams,
            ElementKind::Column => &costs.columns,
            ElementKind::Foundation => &costs.foundations,
        };
        let els: Vec<&ElementQuantities> = takeoff.elements.iter().filter(|e| e.kind == kind).collect();
        // fold from +0: an empty float sum is -0 and would print as such
        let sum = |f: &dyn Fn(&ElementQuantities) -> f64| els.iter().map(|e| f(e)).fold(0.0, |a, b| a + b);
        let mut push = |term: String, category: Category, quantity: f64, unit_cost: f64| {
            terms.push(CostTerm {
                family: family.to_string(),
                term,
                category,
                quantity,
                unit_cost,
                amount: quantity * unit_cost,
            });
        };
        let formwork = sum(&|e| e.formwork);
        let stirrups = sum(&|e| e.stirrup_mass);
        let bars = sum(&|e| e.bar_mass);
        let concrete = sum(&|e| e.concrete);
        push("formwork".into(), Category::Formwork, formwork, unit.formwork);
        push("stirrup_elaboration".into(), Category::Steel, stirrups, unit.stirrup_elaboration);
        push("stirrup_placement".into(), Category::Steel, stirrups, unit.stirrup_placement);
        push("bar_elaboration".into(), Category::Steel, bars, unit.bar_elaboration);
        push("bar_placement".into(), Category::Steel, bars, unit.bar_placement);

        let mut by_grade: BTreeMap<String, (f64, f64)> = BTreeMap::new();
        for e in &els {
            let key = grade_key(e.fc);
            let price = unit.concrete(e.fc, &format!("costs.{family}"))?;
            let entry = by_grade.entry(key).or_insert((0.0, price));
            entry.0 += e.concrete;
        }
        for (grade, (volume, price)) in by_grade {
            push(format!("concrete_elaboration_{grade}"), Category::Concrete, volume, price);
        }
        push("concrete_placement".into(), Category::Concrete, concrete, unit.concrete_placement);

        if kind == ElementKind::Foundation {
            push("excavation".into(), Category::Earthwork, sum(&|e| e.excavation), costs.excavation);
            push("refill".into(), Category::Earthwork, sum(&|e| e.refill), costs.refill);
        }
    }
    let total = terms.iter().map(|t| t.amount).fold(0.0, |a, b| a + b);
    Ok(CostBreakdown { terms, total })
}

/// Summed relative violation `Σ max(0, ratio − 1)` over failed checks.
pub fn total_violation<'a>(checks: impl IntoIterator<Item = &'a CheckResult>) -> f64 {
    checks
        .into_iter()
        .filter(|c| !c.pass)
        .map(|c| if c.ratio.is_nan() { f64::INFINITY } else { (c.ratio - 1.0).max(0.0) })
        .fold(0.0, |a, b| a + b)
}

/// `F·(1 + P·Σ max(0, ratio − 1))`, or [`SENTINEL_COST`] when a ratio is
/// unbounded or the cost is not finite.
pub fn penalize<'a>(cost: f64, checks: impl IntoIterator<Item = &'a CheckResult>, factor: f64) -> f64 {
    let v = total_violation(checks);
    if !v.is_finite() || !cost.is_finite() {
        return SENTINEL_COST;
    }
    (cost * (1.0 + factor * v)).min(SENTINEL_COST)
}
