//! Reinforced-concrete section checks and reinforcement selection.
//!
//! Units: section sizes in m, bar diameters in mm, f'c and fy in MPa,
//! forces in kN, moments in kN·m. A stress in MPa times an area in m² is
//! MN, hence the `1000.0` factors.
//!
//! The concrete shear term is `Vc = 170·√f'c·bw·d` with f'c in MPa and
//! bw, d in m, giving kN (equivalently `0.17·√f'c` MPa over `bw·d`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::solver::{InternalForces, MemberSection};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RcConfig {
    /// Yield strength of longitudinal and transverse steel (MPa).
    pub fy: f64,
    /// Steel modulus (MPa).
    pub es: f64,
    pub phi_flexure: f64,
    pub phi_shear: f64,
    pub phi_compression: f64,
    /// Longitudinal bar diameters (mm).
    pub bar_catalog: Vec<f64>,
    /// Stirrup diameters (mm).
    pub stirrup_catalog: Vec<f64>,
    /// Clear cover to stirrups (m).
    pub cover: f64,
    /// Absolute minimum clear spacing between bars (m).
    pub min_clear_spacing: f64,
    /// Minimum steel ratio of beams, top plus bottom, over b·h.
    pub rho_min_beam: f64,
    /// Minimum steel ratio of columns over b·h.
    pub rho_min_column: f64,
    /// Net tensile strain required for tension-controlled flexure.
    pub eps_t_min: f64,
    /// Stirrup spacing grid (m).
    pub stirrup_step: f64,
    pub max_bars_per_face: usize,
}

impl Default for RcConfig {
    fn default() -> Self {
        RcConfig {
            fy: 420.0,
            es: 200_000.0,
            phi_flexure: 0.9,
            phi_shear: 0.75,
            phi_compression: 0.65,
            bar_catalog: vec![10.0, 13.0, 16.0, 19.0, 22.0, 25.0],
            stirrup_catalog: vec![10.0],
            cover: 0.04,
            min_clear_spacing: 0.025,
            rho_min_beam: 0.003,
            rho_min_column: 0.01,
            eps_t_min: 0.005,
            stirrup_step: 0.05,
            max_bars_per_face: 12,
        }
    }
}

/// Outcome of one limit-state check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub demand: f64,
    pub capacity: f64,
    pub ratio: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    /// Builds a check from demand and capacity magnitudes; a zero demand
    /// always passes, a zero capacity under load fails with infinite ratio.
    pub fn new(name: impl Into<String>, demand: f64, capacity: f64) -> Self {
        let ratio = if demand <= 0.0 {
            0.0
        } else if capacity <= 0.0 {
            f64::INFINITY
        } else {
            demand / capacity
        };
        CheckResult {
            name: name.into(),
            demand,
            capacity,
            ratio,
            pass: ratio <= 1.0 + 1e-9,
            note: None,
        }
    }

    /// Forces failure, keeping the ratio above one.
    pub fn fail_with(mut self, note: impl Into<String>, ratio: f64) -> Self {
        self.ratio = self.ratio.max(ratio).max(1.0 + 1e-6);
        self.pass = false;
        self.note = Some(note.into());
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

pub fn bar_area(diameter_mm: f64) -> f64 {
    let d = diameter_mm / 1000.0;
    PI * d * d / 4.0
}

/// `count` bars of one diameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarGroup {
    pub diameter_mm: f64,
    pub count: usize,
}

impl BarGroup {
    pub fn area(&self) -> f64 {
        self.count as f64 * bar_area(self.diameter_mm)
    }

    pub fn diameter(&self) -> f64 {
        self.diameter_mm / 1000.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stirrups {
    pub diameter_mm: f64,
    /// Spacing along the member (m).
    pub spacing: f64,
    pub legs: usize,
}

impl Stirrups {
    /// Shear steel area within one spacing, Av (m²).
    pub fn area(&self) -> f64 {
        self.legs as f64 * bar_area(self.diameter_mm)
    }
}

/// Beam reinforcement: bottom and top faces plus stirrups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReinforcementLayout {
    pub bottom: BarGroup,
    pub top: BarGroup,
    pub stirrups: Stirrups,
    pub fy: f64,
}

impl ReinforcementLayout {
    /// Effective depth of the bottom steel (m).
    pub fn d(&self, section: &MemberSection, cover: f64) -> f64 {
        section.h - cover - self.stirrups.diameter_mm / 1000.0 - self.bottom.diameter() / 2.0
    }

    /// Depth of the top steel from the top fibre (m).
    pub fn d_prime(&self, cover: f64) -> f64 {
        cover + self.stirrups.diameter_mm / 1000.0 + self.top.diameter() / 2.0
    }
}

/// Column reinforcement: `bars_per_face` bars on each of the four faces,
/// corners shared, so `4·(n − 1)` bars in total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnLayout {
    pub diameter_mm: f64,
    pub bars_per_face: usize,
    pub stirrups: Stirrups,
    pub fy: f64,
}

impl ColumnLayout {
    pub fn bar_count(&self) -> usize {
        4 * (self.bars_per_face - 1)
    }

    pub fn total_area(&self) -> f64 {
        self.bar_count() as f64 * bar_area(self.diameter_mm)
    }

    /// Steel layers `(area, depth from compression face)` for bending that
    /// stresses the `depth` dimension.
    fn layers(&self, depth: f64, cover: f64) -> Vec<(f64, f64)> {
        let n = self.bars_per_face;
        let a = bar_area(self.diameter_mm);
        let edge = cover + self.stirrups.diameter_mm / 1000.0 + self.diameter_mm / 2000.0;
        (0..n)
            .map(|i| {
                let y = edge + (depth - 2.0 * edge) * i as f64 / (n - 1) as f64;
                let count = if i == 0 || i == n - 1 { n } else { 2 };
                (count as f64 * a, y)
            })
            .collect()
    }
}

/// Bending axis of a column check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    /// Bending that stresses the section height h (moment about local z).
    Strong,
    /// Bending that stresses the width b (moment about local y).
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Face {
    /// Sagging: bottom bars in tension.
    Bottom,
    /// Hogging: top bars in tension.
    Top,
}

/// Whitney block factor β1.
pub fn beta1(fc: f64) -> f64 {
    (0.85 - 0.05 * (fc - 28.0) / 7.0).clamp(0.65, 0.85)
}

/// Rectangular section with discrete steel layers, for strain compatibility.
struct LayeredSection {
    width: f64,
    depth: f64,
    fc: f64,
    fy: f64,
    es: f64,
    /// `(area, depth from compression face)`
    layers: Vec<(f64, f64)>,
}

struct StrainState {
    axial: f64,
    moment: f64,
    eps_t: f64,
}

impl LayeredSection {
    const EPS_CU: f64 = 0.003;

    /// Nominal axial force (compression positive, kN) and moment about the
    /// mid-depth (kN·m) for neutral-axis depth `c`.
    fn state(&self, c: f64) -> StrainState {
        let a = (beta1(self.fc) * c).min(self.depth);
        let cc = 0.85 * self.fc * a * self.width * 1000.0;
        let mut p = cc;
        let mut m = cc * (self.depth / 2.0 - a / 2.0);
        let mut dt: f64 = 0.0;
        for &(area, y) in &self.layers {
            let eps = Self::EPS_CU * (c - y) / c;
            let fs = (self.es * eps).clamp(-self.fy, self.fy);
            let force = area * fs * 1000.0;
            p += force;
            m += force * (self.depth / 2.0 - y);
            dt = dt.max(y);
        }
        StrainState {
            axial: p,
            moment: m,
            eps_t: Self::EPS_CU * (dt - c) / c,
        }
    }

    fn squash_load(&self) -> f64 {
        let steel: f64 = self.layers.iter().map(|(a, _)| a).sum();
        (0.85 * self.fc * self.width * self.depth + steel * self.fy) * 1000.0
    }

    fn tension_capacity(&self) -> f64 {
        self.layers.iter().map(|(a, _)| a).sum::<f64>() * self.fy * 1000.0
    }

    /// Neutral axis depth where `target(state) = 0`, `target` increasing in c.
    fn solve_c(&self, target: impl Fn(&StrainState) -> f64) -> Option<f64> {
        let mut lo = 1e-9 * self.depth;
        let mut hi = 10.0 * self.depth;
        if target(&self.state(lo)) > 0.0 || target(&self.state(hi)) < 0.0 {
            return None;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if target(&self.state(mid)) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-13 * self.depth {
                break;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

fn phi_for_strain(eps_t: f64, cfg: &RcConfig) -> f64 {
    let eps_y = cfg.fy / cfg.es;
    if eps_t >= cfg.eps_t_min {
        cfg.phi_flexure
    } else if eps_t <= eps_y {
        cfg.phi_compression
    } else {
        cfg.phi_compression
            + (cfg.phi_flexure - cfg.phi_compression) * (eps_t - eps_y) / (cfg.eps_t_min - eps_y)
    }
}

fn beam_layers(section: &MemberSection, layout: &ReinforcementLayout, face: Face, cfg: &RcConfig) -> LayeredSection {
    let d = layout.d(section, cfg.cover);
    let dp = layout.d_prime(cfg.cover);
    let (tension, compression) = match face {
        Face::Bottom => (layout.bottom, layout.top),
        Face::Top => (layout.top, layout.bottom),
    };
    // depths measured from the compression face
    let (dt, dc) = match face {
        Face::Bottom => (d, dp),
        Face::Top => (section.h - dp, section.h - d),
    };
    let mut layers = vec![(tension.area(), dt)];
    if compression.count > 0 {
        layers.push((compression.area(), dc));
    }
    LayeredSection {
        width: section.b,
        depth: section.h,
        fc: section.fc,
        fy: layout.fy,
        es: cfg.es,
        layers,
    }
}

/// Nominal flexural strength and net tensile strain of a beam face.
fn beam_nominal(section: &MemberSection, layout: &ReinforcementLayout, face: Face, cfg: &RcConfig) -> (f64, f64) {
    let tension = match face {
        Face::Bottom => layout.bottom,
        Face::Top => layout.top,
    };
    if tension.count == 0 || tension.area() <= 0.0 {
        return (0.0, f64::INFINITY);
    }
    let sec = beam_layers(section, layout, face, cfg);
    match sec.solve_c(|s| s.axial) {
        Some(c) => {
            let st = sec.state(c);
            (st.moment, st.eps_t)
        }
        None => (0.0, f64::INFINITY),
    }
}

/// Flexure of a beam face: `Mu ≤ φMn` with the rectangular stress block,
/// tension-controlled behaviour required.
pub fn check_beam_flexure(
    section: &MemberSection,
    layout: &ReinforcementLayout,
    mu: f64,
    face: Face,
    cfg: &RcConfig,
) -> CheckResult {
    let name = match face {
        Face::Bottom => "beam_flexure_bottom",
        Face::Top => "beam_flexure_top",
    };
    let (mn, eps_t) = beam_nominal(section, layout, face, cfg);
    let check = CheckResult::new(name, mu.abs(), cfg.phi_flexure * mn);
    if mu.abs() > 0.0 && eps_t < cfg.eps_t_min {
        let r = check.ratio;
        return check.fail_with(
            format!("over-reinforced: net tensile strain {eps_t:.5} below {}", cfg.eps_t_min),
            r,
        );
    }
    check
}

/// Shear: `Vu ≤ φ(Vs + Vc)` with `Vs = Av·fy·d/s`.
pub fn check_beam_shear(
    section: &MemberSection,
    stirrups: &Stirrups,
    d: f64,
    vu: f64,
    cfg: &RcConfig,
) -> CheckResult {
    let vc = 170.0 * section.fc.sqrt() * section.b * d;
    let vs = stirrups.area() * cfg.fy * d / stirrups.spacing * 1000.0;
    let check = CheckResult::new("shear", vu.abs(), cfg.phi_shear * (vs + vc));
    let s_max = d / 2.0;
    if stirrups.spacing > s_max + 1e-12 {
        let r = stirrups.spacing / s_max;
        return check.fail_with(format!("stirrup spacing {:.3} m exceeds d/2 = {s_max:.3} m", stirrups.spacing), r);
    }
    check
}

fn column_section(section: &MemberSection, layout: &ColumnLayout, axis: Axis, cfg: &RcConfig) -> LayeredSection {
    let (width, depth) = match axis {
        Axis::Strong => (section.b, section.h),
        Axis::Weak => (section.h, section.b),
    };
    LayeredSection {
        width,
        depth,
        fc: section.fc,
        fy: layout.fy,
        es: cfg.es,
        layers: layout.layers(depth, cfg.cover),
    }
}

/// Design strength `(φPn, φMn)` at the strain state whose design axial
/// strength equals `pu`, or `None` when `pu` is outside the diagram.
fn column_capacity_at(sec: &LayeredSection, pu: f64, cfg: &RcConfig) -> Option<(f64, f64, f64)> {
    let c = sec.solve_c(|s| phi_for_strain(s.eps_t, cfg) * s.axial - pu)?;
    let st = sec.state(c);
    let phi = phi_for_strain(st.eps_t, cfg);
    Some((phi * st.axial, phi * st.moment, phi))
}

/// Column check under `(Pu, Mu)` about one axis, compression positive.
pub fn check_column(
    section: &MemberSection,
    layout: &ColumnLayout,
    pu: f64,
    mu: f64,
    axis: Axis,
    cfg: &RcConfig,
) -> CheckResult {
    let sec = column_section(section, layout, axis, cfg);
    let name = match axis {
        Axis::Strong => "column_strong",
        Axis::Weak => "column_weak",
    };
    let p_max = cfg.phi_compression * sec.squash_load();
    let t_max = cfg.phi_flexure * sec.tension_capacity();
    if pu > p_max {
        return CheckResult::new(name, pu, p_max).fail_with("axial load exceeds pure-compression capacity", pu / p_max);
    }
    if pu < -t_max {
        return CheckResult::new(name, -pu, t_max).fail_with("axial tension exceeds steel capacity", -pu / t_max.max(1e-12));
    }
    match column_capacity_at(&sec, pu, cfg) {
        Some((_, phi_mn, _)) => CheckResult::new(name, mu.abs(), phi_mn.max(0.0)),
        None => CheckResult::new(name, mu.abs(), 0.0).fail_with("no strain state matches the axial load", 1.0 + pu.abs()),
    }
}

/// Discretized design interaction diagram `(φPn, φMn)` from pure
/// compression to pure tension.
pub fn interaction_diagram(
    section: &MemberSection,
    layout: &ColumnLayout,
    axis: Axis,
    points: usize,
    cfg: &RcConfig,
) -> Vec<(f64, f64)> {
    let sec = column_section(section, layout, axis, cfg);
    let n = points.max(3);
    let mut out = Vec::with_capacity(n);
    out.push((cfg.phi_compression * sec.squash_load(), 0.0));
    let inner = n - 2;
    for i in 0..inner {
        // neutral axis from 1.5·depth down to 2 % of depth
        let t = i as f64 / (inner - 1).max(1) as f64;
        let c = sec.depth * (1.5 - 1.48 * t);
        let st = sec.state(c);
        let phi = phi_for_strain(st.eps_t, cfg);
        out.push((phi * st.axial, phi * st.moment));
    }
    out.push((-cfg.phi_flexure * sec.tension_capacity(), 0.0));
    out
}

/// Geometric limits of one reinforced face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceConstraints {
    /// Width available to the bars (m).
    pub width: f64,
    pub cover: f64,
    pub stirrup_diameter_mm: f64,
    pub min_count: usize,
    pub max_count: usize,
    /// Upper bound on centre spacing (footing mats).
    pub max_spacing: Option<f64>,
}

impl FaceConstraints {
    pub fn beam(width: f64, cfg: &RcConfig) -> Self {
        FaceConstraints {
            width,
            cover: cfg.cover,
            stirrup_diameter_mm: cfg.stirrup_catalog.first().copied().unwrap_or(10.0),
            min_count: 2,
            max_count: cfg.max_bars_per_face,
            max_spacing: None,
        }
    }

    pub fn fits(&self, bars: &BarGroup, min_clear: f64) -> bool {
        if bars.count < self.min_count || bars.count > self.max_count {
            return false;
        }
        let db = bars.diameter();
        let inner = self.width - 2.0 * self.cover - 2.0 * self.stirrup_diameter_mm / 1000.0;
        if bars.count == 1 {
            return inner >= db;
        }
        let gaps = (bars.count - 1) as f64;
        let clear = (inner - bars.count as f64 * db) / gaps;
        if clear + 1e-12 < min_clear.max(db) {
            return false;
        }
        match self.max_spacing {
            Some(s) => clear + db <= s + 1e-12,
            None => true,
        }
    }
}

/// No arrangement from the catalog fits the face.
#[derive(Debug, Clone, PartialEq)]
pub struct NoArrangement {
    pub required: f64,
    /// Largest-area arrangement that fits, if any.
    pub best_available: Option<BarGroup>,
}

/// Every catalog arrangement that fits, by area, then fewer bars, then
/// smaller diameter.
pub fn arrangements(face: &FaceConstraints, cfg: &RcConfig) -> Vec<BarGroup> {
    let mut out = Vec::new();
    for &dia in &cfg.bar_catalog {
        for count in face.min_count.max(1)..=face.max_count {
            let g = BarGroup {
                diameter_mm: dia,
                count,
            };
            if face.fits(&g, cfg.min_clear_spacing) {
                out.push(g);
            }
        }
    }
    out.sort_by(|a, b| {
        a.area()
            .total_cmp(&b.area())
            .then(a.count.cmp(&b.count))
            .then(a.diameter_mm.total_cmp(&b.diameter_mm))
    });
    out
}

/// Smallest-area catalog arrangement with area ≥ `required`; ties go to
/// fewer bars, then the smaller diameter.
pub fn select_reinforcement(
    required: f64,
    face: &FaceConstraints,
    cfg: &RcConfig,
) -> std::result::Result<BarGroup, NoArrangement> {
    let all = arrangements(face, cfg);
    all.iter()
        .find(|g| g.area() >= required - 1e-15)
        .copied()
        .ok_or(NoArrangement {
            required,
            best_available: all.last().copied(),
        })
}

/// Singly-reinforced steel area for `mu` (kN·m), or `None` when the
/// concrete block cannot develop it.
pub fn required_flexural_steel(b: f64, d: f64, fc: f64, mu: f64, cfg: &RcConfig) -> Option<f64> {
    if mu <= 0.0 {
        return Some(0.0);
    }
    let k = 0.85 * fc * b * d * 1000.0; // kN
    let disc = 1.0 - 2.0 * mu / (cfg.phi_flexure * k * d);
    if disc < 0.0 {
        return None;
    }
    Some(k * (1.0 - disc.sqrt()) / (cfg.fy * 1000.0))
}

// ---------------------------------------------------------------------------
// Member design
// ---------------------------------------------------------------------------

/// Strength demands of one beam, enveloped over stations and combinations.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BeamDemand {
    /// Largest sagging moment (kN·m, ≥ 0).
    pub m_pos: f64,
    /// Largest hogging moment magnitude (kN·m, ≥ 0).
    pub m_neg: f64,
    pub v_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamDesign {
    pub layout: ReinforcementLayout,
    pub checks: Vec<CheckResult>,
}

/// Smallest passing stirrup set, or the densest one when none passes.
pub fn design_stirrups(section: &MemberSection, d: f64, vu: f64, cfg: &RcConfig) -> (Stirrups, CheckResult) {
    let step = cfg.stirrup_step;
    let s_max = ((d / 2.0) / step + 1e-9).floor().max(1.0) * step;
    let mut options = Vec::new();
    for &dia in &cfg.stirrup_catalog {
        let mut s = s_max;
        while s >= step - 1e-12 {
            options.push(Stirrups {
                diameter_mm: dia,
                spacing: s,
                legs: 2,
            });
            s -= step;
        }
    }
    options.sort_by(|a, b| {
        (a.area() / a.spacing)
            .total_cmp(&(b.area() / b.spacing))
            .then(a.diameter_mm.total_cmp(&b.diameter_mm))
    });
    let mut best: Option<(Stirrups, CheckResult)> = None;
    for st in options {
        let chk = check_beam_shear(section, &st, d, vu, cfg);
        if chk.pass {
            return (st, chk);
        }
        if best.as_ref().is_none_or(|(_, b)| chk.ratio < b.ratio) {
            best = Some((st, chk));
        }
    }
    best.expect("stirrup catalog is not empty")
}

fn design_face(
    section: &MemberSection,
    base: ReinforcementLayout,
    face: Face,
    mu: f64,
    as_min: f64,
    cfg: &RcConfig,
) -> (BarGroup, CheckResult) {
    let constraints = FaceConstraints::beam(section.b, cfg);
    let all = arrangements(&constraints, cfg);
    let with = |g: BarGroup| {
        let mut l = base;
        match face {
            Face::Bottom => l.bottom = g,
            Face::Top => l.top = g,
        }
        l
    };
    let mut best: Option<(BarGroup, CheckResult)> = None;
    for g in all.iter().filter(|g| g.area() >= as_min - 1e-15) {
        let chk = check_beam_flexure(section, &with(*g), mu, face, cfg);
        if chk.pass {
            return (*g, chk);
        }
        if best.as_ref().is_none_or(|(_, b)| chk.ratio < b.ratio) {
            best = Some((*g, chk));
        }
    }
    match best {
        Some(b) => b,
        None => {
            // nothing fits the width: constructive violation on the minimum layout
            let g = BarGroup {
                diameter_mm: cfg.bar_catalog[0],
                count: 2,
            };
            let chk = check_beam_flexure(section, &with(g), mu, face, cfg);
            let r = chk.ratio;
            (g, chk.fail_with("no bar arrangement fits the section width", r.max(2.0)))
        }
    }
}

/// Selects bottom, top and shear reinforcement for one beam.
pub fn design_beam(section: &MemberSection, demand: &BeamDemand, cfg: &RcConfig) -> BeamDesign {
    let min_bars = BarGroup {
        diameter_mm: cfg.bar_catalog[0],
        count: 2,
    };
    let stirrup_dia = cfg.stirrup_catalog.first().copied().unwrap_or(10.0);
    let mut layout = ReinforcementLayout {
        bottom: min_bars,
        top: min_bars,
        stirrups: Stirrups {
            diameter_mm: stirrup_dia,
            spacing: cfg.stirrup_step,
            legs: 2,
        },
        fy: cfg.fy,
    };
    let as_min = 0.5 * cfg.rho_min_beam * section.b * section.h;
    let (bottom, c_bot) = design_face(section, layout, Face::Bottom, demand.m_pos, as_min, cfg);
    layout.bottom = bottom;
    let (top, c_top) = design_face(section, layout, Face::Top, demand.m_neg, as_min, cfg);
    layout.top = top;
    // bottom capacity is unaffected by the top choice only through the
    // compression steel, which can only help; re-check for the record
    let c_bot = if c_bot.pass {
        check_beam_flexure(section, &layout, demand.m_pos, Face::Bottom, cfg)
    } else {
        c_bot
    };
    let d = layout.d(section, cfg.cover);
    let (stirrups, c_shear) = design_stirrups(section, d, demand.v_max, cfg);
    layout.stirrups = stirrups;
    BeamDesign {
        layout,
        checks: vec![c_bot, c_top, c_shear.with_name("beam_shear")],
    }
}

/// One axial-moment demand pair at a column station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnDemand {
    /// Axial force, compression positive (kN).
    pub pu: f64,
    /// Strong-axis moment (kN·m).
    pub m_strong: f64,
    /// Weak-axis moment (kN·m).
    pub m_weak: f64,
    /// Resultant shear (kN).
    pub vu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnDesign {
    pub layout: ColumnLayout,
    pub checks: Vec<CheckResult>,
}

fn column_layouts(section: &MemberSection, cfg: &RcConfig) -> Vec<ColumnLayout> {
    let stirrup = cfg.stirrup_catalog.first().copied().unwrap_or(10.0);
    let narrow = section.b.min(section.h);
    let face = FaceConstraints {
        width: narrow,
        cover: cfg.cover,
        stirrup_diameter_mm: stirrup,
        min_count: 2,
        max_count: cfg.max_bars_per_face,
        max_spacing: None,
    };
    let mut out: Vec<ColumnLayout> = arrangements(&face, cfg)
        .into_iter()
        .map(|g| ColumnLayout {
            diameter_mm: g.diameter_mm,
            bars_per_face: g.count,
            stirrups: Stirrups {
                diameter_mm: stirrup,
                spacing: cfg.stirrup_step,
                legs: 2,
            },
            fy: cfg.fy,
        })
        .collect();
    out.sort_by(|a, b| {
        a.total_area()
            .total_cmp(&b.total_area())
            .then(a.bar_count().cmp(&b.bar_count()))
            .then(a.diameter_mm.total_cmp(&b.diameter_mm))
    });
    out
}

fn column_checks(section: &MemberSection, layout: &ColumnLayout, demands: &[ColumnDemand], cfg: &RcConfig) -> Vec<CheckResult> {
    let worst = |axis: Axis| {
        demands
            .iter()
            .map(|d| {
                let m = match axis {
                    Axis::Strong => d.m_strong,
                    Axis::Weak => d.m_weak,
                };
                check_column(section, layout, d.pu, m, axis, cfg)
            })
            .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
            .unwrap_or_else(|| CheckResult::new("column", 0.0, 1.0))
    };
    vec![worst(Axis::Strong), worst(Axis::Weak)]
}

/// Smallest catalog column layout meeting the minimum ratio and every demand.
pub fn design_column(section: &MemberSection, demands: &[ColumnDemand], cfg: &RcConfig) -> ColumnDesign {
    let as_min = cfg.rho_min_column * section.b * section.h;
    let layouts = column_layouts(section, cfg);
    let mut best: Option<(ColumnLayout, Vec<CheckResult>, f64)> = None;
    for layout in layouts.iter().filter(|l| l.total_area() >= as_min - 1e-15) {
        let checks = column_checks(section, layout, demands, cfg);
        let worst = checks.iter().map(|c| c.ratio).fold(0.0, f64::max);
        if checks.iter().all(|c| c.pass) {
            best = Some((*layout, checks, worst));
            break;
        }
        if best.as_ref().is_none_or(|(_, _, w)| worst < *w) {
            best = Some((*layout, checks, worst));
        }
    }
    let (mut layout, mut checks) = match best {
        Some((l, c, _)) => (l, c),
        None => {
            // the minimum ratio cannot be placed in this section
            let l = layouts.last().copied().unwrap_or(ColumnLayout {
                diameter_mm: cfg.bar_catalog[0],
                bars_per_face: 2,
                stirrups: Stirrups {
                    diameter_mm: 10.0,
                    spacing: cfg.stirrup_step,
                    legs: 2,
                },
                fy: cfg.fy,
            });
            let mut c = column_checks(section, &l, demands, cfg);
            let ratio = as_min / l.total_area().max(1e-12);
            c.push(CheckResult::new("column_min_steel", as_min, l.total_area()).fail_with("minimum column steel does not fit", ratio));
            (l, c)
        }
    };
    let narrow = MemberSection {
        b: section.b.min(section.h),
        h: section.b.max(section.h),
        ..*section
    };
    let d = narrow.h - cfg.cover - layout.stirrups.diameter_mm / 1000.0 - layout.diameter_mm / 2000.0;
    let vu = demands.iter().map(|d| d.vu.abs()).fold(0.0, f64::max);
    let (stirrups, shear) = design_stirrups(&narrow, d, vu, cfg);
    layout.stirrups = stirrups;
    checks.push(shear.with_name("column_shear"));
    ColumnDesign { layout, checks }
}

/// Beam deflection limit `L/180`.
pub fn deflection_limit(span: f64) -> f64 {
    span / 180.0
}

/// Top drift limit `H/450`.
pub fn drift_limit(height: f64) -> f64 {
    height / 450.0
}

/// Deflection of every beam (largest over the service results) against
/// `L/180`, and the top drift of the lateral results against `H/450`.
pub fn check_serviceability(
    service: &[&InternalForces],
    lateral: &[&InternalForces],
    model: &crate::model::StructuralModel,
) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for (i, m) in model.members.iter().enumerate() {
        if m.role != crate::model::MemberRole::Beam {
            continue;
        }
        let span = model.member_length(m).unwrap_or(0.0);
        let delta = service
            .iter()
            .map(|f| f.members[i].max_deflection)
            .fold(0.0, f64::max);
        out.push(CheckResult::new(format!("deflection:{}", m.id), delta, deflection_limit(span)));
    }
    let drift = lateral.iter().map(|f| f.top_drift).fold(0.0, f64::max);
    out.push(CheckResult::new("top_drift", drift, drift_limit(model.height)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn layout(bottom: BarGroup, top: BarGroup) -> ReinforcementLayout {
        ReinforcementLayout {
            bottom,
            top,
            stirrups: Stirrups {
                diameter_mm: 10.0,
                spacing: 0.2,
                legs: 2,
            },
            fy: 420.0,
        }
    }

    #[test]
    fn check_result_boundary() {
        assert!(CheckResult::new("x", 1.0, 1.0).pass);
        assert!(!CheckResult::new("x", 1.0 + 1e-6, 1.0).pass);
        assert!(CheckResult::new("x", 0.0, 0.0).pass);
        let c = CheckResult::new("x", 1.0, 0.0);
        assert!(!c.pass && c.ratio.is_infinite());
    }

    #[test]
    fn bar_areas() {
        assert_relative_eq!(bar_area(16.0) * 1e4, 2.0106, epsilon = 1e-4);
        // 1.6 cm² lies between one ø13 and one ø16
        assert!(bar_area(13.0) * 1e4 < 1.6 && 1.6 < bar_area(16.0) * 1e4);
    }

    #[test]
    fn zero_moment_and_zero_steel() {
        let s = MemberSection::new(0.3, 0.5, 25.0).unwrap();
        let cfg = RcConfig::default();
        let none = BarGroup {
            diameter_mm: 16.0,
            count: 0,
        };
        let two = BarGroup {
            diameter_mm: 16.0,
            count: 2,
        };
        let c = check_beam_flexure(&s, &layout(none, none), 10.0, Face::Bottom, &cfg);
        assert_eq!(c.capacity, 0.0);
        assert!(!c.pass);
        assert!(check_beam_flexure(&s, &layout(two, two), 0.0, Face::Bottom, &cfg).pass);
    }

    #[test]
    fn over_reinforced_is_named() {
        let s = MemberSection::new(0.2, 0.3, 20.0).unwrap();
        let heavy = BarGroup {
            diameter_mm: 25.0,
            count: 4,
        };
        let c = check_beam_flexure(&s, &layout(heavy, BarGroup { diameter_mm: 10.0, count: 0 }), 1.0, Face::Bottom, &RcConfig::default());
        assert!(!c.pass);
        assert!(c.note.unwrap().contains("over-reinforced"));
    }

    #[test]
    fn spacing_limit_on_shear() {
        let s = MemberSection::new(0.3, 0.5, 25.0).unwrap();
        let st = Stirrups {
            diameter_mm: 10.0,
            spacing: 0.3,
            legs: 2,
        };
        let c = check_beam_shear(&s, &st, 0.45, 1.0, &RcConfig::default());
        assert!(!c.pass);
        assert!(c.note.unwrap().contains("d/2"));
    }

    #[test]
    fn limits() {
        assert_relative_eq!(deflection_limit(6.0), 0.033333, epsilon = 1e-6);
        assert_relative_eq!(drift_limit(9.0), 0.02, epsilon = 1e-15);
    }

    #[test]
    fn selection_rules() {
        let cfg = RcConfig::default();
        let face = FaceConstraints::beam(0.30, &cfg);
        let g = select_reinforcement(8.0e-4, &face, &cfg).unwrap();
        assert_eq!((g.diameter_mm, g.count), (16.0, 4));
        let g = select_reinforcement(0.0, &face, &cfg).unwrap();
        assert_eq!((g.diameter_mm, g.count), (10.0, 2));
        let narrow = FaceConstraints::beam(0.10, &cfg);
        assert!(select_reinforcement(1e-4, &narrow, &cfg).is_err());
    }

    #[test]
    fn diagram_endpoints() {
        let s = MemberSection::new(0.4, 0.4, 25.0).unwrap();
        let cfg = RcConfig::default();
        let l = ColumnLayout {
            diameter_mm: 16.0,
            bars_per_face: 3,
            stirrups: Stirrups {
                diameter_mm: 10.0,
                spacing: 0.15,
                legs: 2,
            },
            fy: 420.0,
        };
        let d = interaction_diagram(&s, &l, Axis::Strong, 50, &cfg);
        assert_eq!(d.len(), 50);
        let po = 0.85 * 25.0 * 0.16 * 1000.0 + l.total_area() * 420.0 * 1000.0;
        assert_relative_eq!(d[0].0, 0.65 * po, max_relative = 1e-12);
        assert!(d.last().unwrap().0 < 0.0);
        // every interior diagram point is on the boundary of the check
        for &(p, m) in &d[1..d.len() - 1] {
            let c = check_column(&s, &l, p, m, Axis::Strong, &cfg);
            assert_relative_eq!(c.ratio, 1.0, max_relative = 1e-6);
        }
    }
}
