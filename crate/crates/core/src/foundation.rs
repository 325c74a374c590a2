//! Shallow footings: bearing capacity, the hyperbolic pressure-settlement
//! law and its secant stiffness, geotechnical and structural checks, and
//! footing sizing.
//!
//! Footing plan: `L` along global x, `B` along global y, rectangularity
//! `r = L/B`. Pressures in kPa, forces in kN, lengths in m.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SettlementParams, SoilProfile, SoilStrength};
use crate::rc::{self, BarGroup, CheckResult, FaceConstraints, RcConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FoundationConfig {
    /// Founding depth D below ground (m).
    pub depth: f64,
    /// Working clearance around the footing in the excavation (m).
    pub clearance: f64,
    /// Settlement limit s_lim (m).
    pub s_lim: f64,
    /// Average unit weight of footing plus backfill (kN/m³).
    pub fill_unit_weight: f64,
    /// Plan-size grid (m).
    pub size_step: f64,
    pub min_width: f64,
    /// Largest plan side tried before declaring the candidate infeasible (m).
    pub max_size: f64,
    pub min_thickness: f64,
    pub max_thickness: f64,
    /// Distance from the slab soffit to the bar centroid (m).
    pub bar_cover: f64,
    pub sf_overturn_first: f64,
    pub sf_overturn_second: f64,
    /// Cohesion factor in the sliding check.
    pub sliding_cohesion_factor: f64,
    pub max_bar_spacing: f64,
    pub rho_min: f64,
}

impl Default for FoundationConfig {
    fn default() -> Self {
        FoundationConfig {
            depth: 1.5,
            clearance: 0.3,
            s_lim: 0.08,
            fill_unit_weight: 20.0,
            size_step: 0.05,
            min_width: 0.6,
            max_size: 5.0,
            min_thickness: 0.3,
            max_thickness: 1.5,
            bar_cover: 0.075,
            sf_overturn_first: 1.5,
            sf_overturn_second: 3.0,
            sliding_cohesion_factor: 0.75,
            max_bar_spacing: 0.30,
            rho_min: 0.0018,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitState {
    /// Bearing capacity design values (95 %).
    First,
    /// Deformation design values (85 %).
    Second,
}

/// Footing geometry seen by the bearing-capacity formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BearingGeometry {
    /// Effective width B' (m).
    pub b_eff: f64,
    /// Effective length L' (m); `None` for a strip.
    pub l_eff: Option<f64>,
    /// Founding depth D (m).
    pub depth: f64,
    /// Plan width B used by the depth factors (m).
    pub width: f64,
    /// Vertical load V and horizontal load H (kN) for inclination factors.
    pub vertical: f64,
    pub horizontal: f64,
    /// Extra surcharge at founding level on top of the overburden (kPa).
    pub surcharge: f64,
}

impl BearingGeometry {
    pub fn centred(b: f64, l: Option<f64>, depth: f64) -> Self {
        BearingGeometry {
            b_eff: b,
            l_eff: l,
            depth,
            width: b,
            vertical: 1.0,
            horizontal: 0.0,
            surcharge: 0.0,
        }
    }
}

/// Bearing capacity factors `(Nc, Nq, Nγ)` for friction angle `phi` (rad).
pub fn bearing_factors(phi: f64) -> (f64, f64, f64) {
    let t = phi.tan();
    let nq = (PI * t).exp() * (PI / 4.0 + phi / 2.0).tan().powi(2);
    let nc = if phi.abs() < 1e-9 { PI + 2.0 } else { (nq - 1.0) / t };
    let ng = 1.5 * (nq - 1.0) * t;
    (nc, nq, ng)
}

/// Brinch-Hansen bearing pressure for one soil strength set and overburden
/// `q_bar` (kPa) at founding level.
pub fn brinch_hansen(soil: &SoilStrength, q_bar: f64, g: &BearingGeometry) -> Result<f64> {
    if !(g.b_eff > 0.0) || g.l_eff.is_some_and(|l| !(l > 0.0)) {
        return Err(Error::Geometry(format!(
            "non-positive effective footing size B'={:.4}, L'={:?}",
            g.b_eff, g.l_eff
        )));
    }
    let phi = soil.phi_deg.to_radians();
    let c = soil.cohesion;
    let (nc, nq, ng) = bearing_factors(phi);
    let t = phi.tan();

    let ratio = g.l_eff.map_or(0.0, |l| (g.b_eff / l).min(1.0));
    let sc = 1.0 + (nq / nc) * ratio;
    let sq = 1.0 + ratio * t;
    let sg = (1.0 - 0.4 * ratio).max(0.6);

    let k = if g.width > 0.0 {
        let dr = g.depth / g.width;
        if dr <= 1.0 {
            dr
        } else {
            dr.atan()
        }
    } else {
        0.0
    };
    let dc = 1.0 + 0.4 * k;
    let dq = 1.0 + 2.0 * t * (1.0 - phi.sin()).powi(2) * k;

    let area = g.b_eff * g.l_eff.unwrap_or(1.0);
    let (ic, iq, ig) = if g.horizontal <= 0.0 {
        (1.0, 1.0, 1.0)
    } else if phi.abs() < 1e-9 {
        let ic = if c > 0.0 {
            0.5 - 0.5 * (1.0 - g.horizontal / (area * c)).max(0.0).sqrt()
        } else {
            0.0
        };
        (ic, 1.0, 1.0)
    } else {
        let base = g.vertical + area * c / t;
        let iq = (1.0 - 0.5 * g.horizontal / base).max(0.0).powi(5);
        let ig = (1.0 - 0.7 * g.horizontal / base).max(0.0).powi(5);
        let ic = iq - (1.0 - iq) / (nq - 1.0);
        (ic.max(0.0), iq, ig)
    };

    Ok(c * nc * sc * dc * ic + q_bar * nq * sq * dq * iq + 0.5 * soil.gamma * g.b_eff * ng * sg * ig)
}

/// Bearing pressure q*_br of the layer at founding depth for the chosen
/// limit state, overburden included.
pub fn bearing_capacity(soil: &SoilProfile, limit: LimitState, g: &BearingGeometry) -> Result<f64> {
    let layer = soil.layer_at(g.depth);
    let first = limit == LimitState::First;
    let mut strength = if first { layer.first } else { layer.second };
    if soil.water_table.is_some_and(|w| w <= g.depth + g.b_eff) {
        strength.gamma = (strength.gamma - 9.81).max(0.0);
    }
    let q_bar = soil.overburden(g.depth, first) + g.surcharge;
    brinch_hansen(&strength, q_bar, g)
}

fn hyperbola_scale(s_bar: f64, r_star: f64, q_br: f64) -> Result<f64> {
    if !(r_star > 0.0 && s_bar > 0.0) || !(q_br > r_star) {
        return Err(Error::Domain(format!(
            "hyperbolic law needs 0 < R* < q*_br and S̄ > 0 (R*={r_star}, q*={q_br}, S̄={s_bar})"
        )));
    }
    Ok(s_bar * (q_br / r_star - 1.0))
}

/// Settlement from the hyperbolic law `S = p·S̄·(q*/R* − 1)/(q* − p)`.
pub fn settlement(p: f64, s_bar: f64, r_star: f64, q_br: f64) -> Result<f64> {
    hyperbola_scale(s_bar, r_star, q_br)?;
    if p >= q_br {
        return Err(Error::BearingFailure {
            pressure: p,
            capacity: q_br,
        });
    }
    // written as S̄·ratio so that p = R* gives S̄ bit for bit
    Ok(s_bar * ((p * (q_br - r_star)) / (r_star * (q_br - p))))
}

/// Secant stiffness `k = p/S = (q* − p)/(S̄·(q*/R* − 1))` (kPa/m).
pub fn stiffness_coefficient(p: f64, s_bar: f64, r_star: f64, q_br: f64) -> Result<f64> {
    let scale = hyperbola_scale(s_bar, r_star, q_br)?;
    if p >= q_br {
        return Err(Error::BearingFailure {
            pressure: p,
            capacity: q_br,
        });
    }
    Ok((q_br - p) / scale)
}

/// Forces transmitted by a column to its footing, in global axes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ColumnBaseForces {
    /// Downward axial load (kN).
    pub n: f64,
    pub hx: f64,
    pub hy: f64,
    pub mx: f64,
    pub my: f64,
}

impl ColumnBaseForces {
    /// From a support reaction `[Rx, Ry, Rz, Mx, My, Mz]` acting on the
    /// structure.
    pub fn from_reaction(r: &[f64; 6]) -> Self {
        ColumnBaseForces {
            n: r[2],
            hx: -r[0],
            hy: -r[1],
            mx: -r[3],
            my: -r[4],
        }
    }

    pub fn vertical(n: f64) -> Self {
        ColumnBaseForces {
            n,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Footing {
    /// Side along global x (m).
    pub l: f64,
    /// Side along global y (m).
    pub b: f64,
    pub depth: f64,
    pub thickness: f64,
    pub fc: f64,
    /// Column plan size along x and y (m).
    pub column: (f64, f64),
    /// Bars running along L, spread over B.
    pub bars_l: BarGroup,
    /// Bars running along B, spread over L.
    pub bars_b: BarGroup,
}

impl Footing {
    pub fn rectangularity(&self) -> f64 {
        self.l / self.b
    }

    pub fn area(&self) -> f64 {
        self.l * self.b
    }

    pub fn effective_depth(&self, cfg: &FoundationConfig) -> f64 {
        self.thickness - cfg.bar_cover
    }

    /// Excavated prism with working clearance on every side.
    pub fn excavation_volume(&self, clearance: f64) -> f64 {
        (self.l + 2.0 * clearance) * (self.b + 2.0 * clearance) * self.depth
    }

    pub fn concrete_volume(&self) -> f64 {
        self.l * self.b * self.thickness
    }

    /// Column stub between the slab and ground level.
    pub fn stub_volume(&self) -> f64 {
        self.column.0 * self.column.1 * (self.depth - self.thickness).max(0.0)
    }

    /// Backfill: excavation minus slab and stub.
    pub fn refill_volume(&self, clearance: f64) -> f64 {
        (self.excavation_volume(clearance) - self.concrete_volume() - self.stub_volume()).max(0.0)
    }

    fn weight(&self, cfg: &FoundationConfig) -> f64 {
        cfg.fill_unit_weight * self.area() * self.depth
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeotechnicalChecks {
    pub overturning_first: CheckResult,
    pub overturning_second: CheckResult,
    pub sliding: CheckResult,
    pub bearing: CheckResult,
    /// p ≤ R*.
    pub linearity: CheckResult,
    pub settlement: CheckResult,
    /// q*_br with 2nd-LS values, centred on the full plan (kPa).
    pub q_br_second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralChecks {
    pub punching: CheckResult,
    pub shear_l: CheckResult,
    pub shear_b: CheckResult,
    pub flexure_l: CheckResult,
    pub flexure_b: CheckResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoundationChecks {
    pub geotechnical: GeotechnicalChecks,
    pub structural: StructuralChecks,
}

impl GeotechnicalChecks {
    pub fn all(&self) -> [&CheckResult; 6] {
        [
            &self.overturning_first,
            &self.overturning_second,
            &self.sliding,
            &self.bearing,
            &self.linearity,
            &self.settlement,
        ]
    }

    pub fn pass(&self) -> bool {
        self.all().iter().all(|c| c.pass)
    }
}

impl StructuralChecks {
    pub fn all(&self) -> [&CheckResult; 5] {
        [
            &self.punching,
            &self.shear_l,
            &self.shear_b,
            &self.flexure_l,
            &self.flexure_b,
        ]
    }

    pub fn pass(&self) -> bool {
        self.all().iter().all(|c| c.pass)
    }
}

impl FoundationChecks {
    pub fn all(&self) -> Vec<&CheckResult> {
        let mut v: Vec<&CheckResult> = self.geotechnical.all().to_vec();
        v.extend(self.structural.all());
        v
    }
}

fn worse(a: CheckResult, b: CheckResult) -> CheckResult {
    if b.ratio > a.ratio || (!b.pass && a.pass) {
        b
    } else {
        a
    }
}

fn envelope(checks: impl Iterator<Item = CheckResult>, name: &str) -> CheckResult {
    checks
        .reduce(worse)
        .unwrap_or_else(|| CheckResult::new(name, 0.0, 1.0))
        .with_name(name)
}

/// Resultant base moments (about x and y) including the lever arm of the
/// horizontal forces over the founding depth.
fn base_moments(f: &ColumnBaseForces, depth: f64) -> (f64, f64) {
    (f.mx - depth * f.hy, f.my + depth * f.hx)
}

/// 2nd-LS bearing pressure of the full plan under centred vertical load.
pub fn q_br_second(soil: &SoilProfile, l: f64, b: f64, depth: f64) -> Result<f64> {
    let (short, long) = if b <= l { (b, l) } else { (l, b) };
    bearing_capacity(soil, LimitState::Second, &BearingGeometry::centred(short, Some(long), depth))
}

fn overturning(f: &ColumnBaseForces, footing: &Footing, sf: f64, cfg: &FoundationConfig, name: &str) -> CheckResult {
    let n_total = f.n + footing.weight(cfg);
    let (mx, my) = base_moments(f, footing.depth);
    // tipping about the edges normal to x (lever L/2) and to y (lever B/2)
    let about_x = CheckResult::new(name, sf * my.abs(), n_total.max(0.0) * footing.l / 2.0);
    let about_y = CheckResult::new(name, sf * mx.abs(), n_total.max(0.0) * footing.b / 2.0);
    worse(about_x, about_y)
}

/// Geotechnical checks, enveloped over the given
/// 1st-LS (factored) and 2nd-LS (service) force sets.
pub fn geotechnical_checks(
    footing: &Footing,
    soil: &SoilProfile,
    params: &SettlementParams,
    first: &[ColumnBaseForces],
    second: &[ColumnBaseForces],
    cfg: &FoundationConfig,
) -> GeotechnicalChecks {
    let layer1 = soil.layer_at(footing.depth).first;
    let phi1 = layer1.phi_deg.to_radians();
    let w = footing.weight(cfg);

    let overturning_first = envelope(
        first.iter().map(|f| overturning(f, footing, cfg.sf_overturn_first, cfg, "overturning_1")),
        "overturning_1",
    );
    let overturning_second = envelope(
        second.iter().map(|f| overturning(f, footing, cfg.sf_overturn_second, cfg, "overturning_2")),
        "overturning_2",
    );

    let mut sliding = Vec::new();
    let mut bearing = Vec::new();
    for f in first {
        let n_total = f.n + w;
        let (mx, my) = base_moments(f, footing.depth);
        let h = f.hx.hypot(f.hy);
        let (b_eff, l_eff) = if n_total > 0.0 {
            (footing.b - 2.0 * mx.abs() / n_total, footing.l - 2.0 * my.abs() / n_total)
        } else {
            (0.0, 0.0)
        };
        if !(b_eff > 0.0 && l_eff > 0.0) {
            let geo = CheckResult::new("bearing", n_total.abs().max(1.0), 0.0)
                .fail_with("resultant outside the footing", 10.0);
            sliding.push(CheckResult::new("sliding", h, 0.0));
            bearing.push(geo);
            continue;
        }
        let cap = cfg.sliding_cohesion_factor * b_eff * l_eff * layer1.cohesion + n_total * phi1.tan();
        sliding.push(CheckResult::new("sliding", h, cap));

        let (short, long) = if b_eff <= l_eff { (b_eff, l_eff) } else { (l_eff, b_eff) };
        let g = BearingGeometry {
            b_eff: short,
            l_eff: Some(long),
            depth: footing.depth,
            width: footing.b.min(footing.l),
            vertical: n_total,
            horizontal: h,
            surcharge: 0.0,
        };
        let check = match bearing_capacity(soil, LimitState::First, &g) {
            Ok(q) => CheckResult::new("bearing", n_total, q * b_eff * l_eff),
            Err(e) => CheckResult::new("bearing", n_total, 0.0).fail_with(e.to_string(), 10.0),
        };
        bearing.push(check);
    }

    let q2 = q_br_second(soil, footing.l, footing.b, footing.depth).unwrap_or(0.0);
    let mut linearity = Vec::new();
    let mut settle = Vec::new();
    for f in second {
        let p = (f.n + w) / footing.area();
        linearity.push(CheckResult::new("linearity", p, params.r_star));
        let check = match settlement(p, params.s_bar, params.r_star, q2) {
            Ok(s) => CheckResult::new("settlement", s, cfg.s_lim),
            Err(e) => {
                let mut c = CheckResult::new("settlement", f64::INFINITY, cfg.s_lim);
                c.ratio = f64::INFINITY;
                c.pass = false;
                c.note = Some(e.to_string());
                c
            }
        };
        settle.push(check);
    }

    GeotechnicalChecks {
        overturning_first,
        overturning_second,
        sliding: envelope(sliding.into_iter(), "sliding"),
        bearing: envelope(bearing.into_iter(), "bearing"),
        linearity: envelope(linearity.into_iter(), "linearity"),
        settlement: envelope(settle.into_iter(), "settlement"),
        q_br_second: q2,
    }
}

/// Mat reinforcement for a cantilever moment over width `width`.
fn footing_bars(width: f64, d: f64, thickness: f64, fc: f64, mu: f64, cfg: &FoundationConfig, rc_cfg: &RcConfig) -> BarGroup {
    let as_min = cfg.rho_min * width * thickness;
    let as_req = rc::required_flexural_steel(width, d, fc, mu, rc_cfg)
        .unwrap_or(f64::INFINITY)
        .max(as_min);
    let inner = width - 2.0 * cfg.bar_cover;
    let face = FaceConstraints {
        width,
        cover: cfg.bar_cover,
        stirrup_diameter_mm: 0.0,
        min_count: ((inner / cfg.max_bar_spacing).ceil() as usize + 1).max(2),
        max_count: ((inner / 0.1).floor() as usize + 1).max(2),
        max_spacing: Some(cfg.max_bar_spacing),
    };
    match rc::select_reinforcement(as_req, &face, rc_cfg) {
        Ok(g) => g,
        Err(e) => e.best_available.unwrap_or(BarGroup {
            diameter_mm: *rc_cfg.bar_catalog.last().unwrap_or(&25.0),
            count: face.min_count,
        }),
    }
}

/// Singly reinforced stress-block strength φMn (kN·m).
fn slab_capacity(width: f64, d: f64, fc: f64, steel: f64, rc_cfg: &RcConfig) -> f64 {
    let t = steel * rc_cfg.fy * 1000.0;
    let a = t / (0.85 * fc * width * 1000.0);
    rc_cfg.phi_flexure * t * (d - a / 2.0)
}

/// Punching, one-way shear and flexure of the slab under factored column
/// loads, plus the mat reinforcement that satisfies flexure.
pub fn structural_checks(
    footing: &Footing,
    first: &[ColumnBaseForces],
    cfg: &FoundationConfig,
    rc_cfg: &RcConfig,
) -> Result<(StructuralChecks, BarGroup, BarGroup)> {
    let (cx, cy) = footing.column;
    if cx >= footing.l || cy >= footing.b {
        return Err(Error::Geometry(format!(
            "column {cx}x{cy} does not fit footing {}x{}",
            footing.l, footing.b
        )));
    }
    let d = footing.effective_depth(cfg);
    if !(d > 0.0) {
        return Err(Error::Geometry(format!("slab thickness {} leaves no effective depth", footing.thickness)));
    }
    let fc = footing.fc;
    let area = footing.area();
    let a_l = (footing.l - cx) / 2.0;
    let a_b = (footing.b - cy) / 2.0;

    // largest edge pressures per direction
    let mut n_max: f64 = 0.0;
    let mut q_l: f64 = 0.0;
    let mut q_b: f64 = 0.0;
    for f in first {
        let n = f.n.max(0.0);
        let (mx, my) = base_moments(f, footing.depth);
        n_max = n_max.max(n);
        q_l = q_l.max(n / area + 6.0 * my.abs() / (footing.b * footing.l.powi(2)));
        q_b = q_b.max(n / area + 6.0 * mx.abs() / (footing.l * footing.b.powi(2)));
    }

    let m_l = q_l * footing.b * a_l * a_l / 2.0;
    let m_b = q_b * footing.l * a_b * a_b / 2.0;
    let bars_l = footing_bars(footing.b, d, footing.thickness, fc, m_l, cfg, rc_cfg);
    let bars_b = footing_bars(footing.l, d, footing.thickness, fc, m_b, cfg, rc_cfg);

    let crit = (cx + d).min(footing.l) * (cy + d).min(footing.b);
    let b0 = 2.0 * (cx + d) + 2.0 * (cy + d);
    let v_punch = (n_max - n_max / area * crit).max(0.0);
    // two-way shear strength, twice the one-way concrete term (kPa)
    let tau_cap = rc_cfg.phi_shear * 340.0 * fc.sqrt();
    let punching = CheckResult::new("punching", v_punch / (b0 * d), tau_cap);

    let vc = |width: f64| rc_cfg.phi_shear * 170.0 * fc.sqrt() * width * d;
    let shear_l = CheckResult::new("shear_l", q_l * footing.b * (a_l - d).max(0.0), vc(footing.b));
    let shear_b = CheckResult::new("shear_b", q_b * footing.l * (a_b - d).max(0.0), vc(footing.l));
    let flexure_l = CheckResult::new("flexure_l", m_l, slab_capacity(footing.b, d, fc, bars_l.area(), rc_cfg));
    let flexure_b = CheckResult::new("flexure_b", m_b, slab_capacity(footing.l, d, fc, bars_b.area(), rc_cfg));

    Ok((
        StructuralChecks {
            punching,
            shear_l,
            shear_b,
            flexure_l,
            flexure_b,
        },
        bars_l,
        bars_b,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FootingDesign {
    pub footing: Footing,
    pub checks: FoundationChecks,
    /// Every check passes within the size caps.
    pub feasible: bool,
}

/// `k`-th grid value, snapped to a clean decimal so reports do not show
/// 0.30000000000000004.
fn grid_value(k: i64, step: f64) -> f64 {
    (k as f64 * step * 1e9).round() / 1e9
}

fn grid_up(x: f64, step: f64) -> f64 {
    grid_value(((x / step) - 1e-9).ceil() as i64, step)
}

/// Inputs shared by every footing of a structure.
#[derive(Debug, Clone, Copy)]
pub struct FootingContext<'a> {
    pub soil: &'a SoilProfile,
    pub params: SettlementParams,
    pub cfg: &'a FoundationConfig,
    pub rc: &'a RcConfig,
    pub fc: f64,
    /// Column plan size along x and y (m).
    pub column: (f64, f64),
}

impl FootingContext<'_> {
    /// Plan widths B tried by [`size_footing`], smallest first.
    pub fn width_grid(&self, r: f64) -> Vec<f64> {
        let step = self.cfg.size_step;
        let (cx, cy) = self.column;
        let start = grid_up(
            self.cfg
                .min_width
                .max(cy + 2.0 * step)
                .max((cx + 2.0 * step) / r),
            step,
        );
        let mut out = Vec::new();
        let mut k = (start / step).round() as i64;
        loop {
            let b = grid_value(k, step);
            if b.max(r * b) > self.cfg.max_size + 1e-9 {
                break;
            }
            out.push(b);
            k += 1;
        }
        out
    }

    pub fn footing(&self, b: f64, r: f64, thickness: f64) -> Footing {
        Footing {
            l: r * b,
            b,
            depth: self.cfg.depth,
            thickness,
            fc: self.fc,
            column: self.column,
            bars_l: BarGroup {
                diameter_mm: self.rc.bar_catalog[0],
                count: 2,
            },
            bars_b: BarGroup {
                diameter_mm: self.rc.bar_catalog[0],
                count: 2,
            },
        }
    }

    fn thickness_grid(&self) -> Vec<f64> {
        let step = self.cfg.size_step;
        let mut k = (grid_up(self.cfg.min_thickness, step) / step).round() as i64;
        let mut out = Vec::new();
        while grid_value(k, step) <= self.cfg.max_thickness + 1e-9 {
            out.push(grid_value(k, step));
            k += 1;
        }
        out
    }

    /// Smallest slab thickness passing the structural checks for a fixed plan.
    pub fn design_slab(&self, mut footing: Footing, first: &[ColumnBaseForces]) -> (Footing, StructuralChecks) {
        let mut last = None;
        for t in self.thickness_grid() {
            footing.thickness = t;
            match structural_checks(&footing, first, self.cfg, self.rc) {
                Ok((checks, bl, bb)) => {
                    footing.bars_l = bl;
                    footing.bars_b = bb;
                    if checks.pass() {
                        return (footing, checks);
                    }
                    last = Some((footing.clone(), checks));
                }
                Err(e) => {
                    let fail = CheckResult::new("punching", 1.0, 0.0).fail_with(e.to_string(), 10.0);
                    last = Some((
                        footing.clone(),
                        StructuralChecks {
                            punching: fail.clone(),
                            shear_l: fail.clone().with_name("shear_l"),
                            shear_b: fail.clone().with_name("shear_b"),
                            flexure_l: fail.clone().with_name("flexure_l"),
                            flexure_b: fail.with_name("flexure_b"),
                        },
                    ));
                }
            }
        }
        last.expect("thickness grid is not empty")
    }
}

/// Smallest plan (B on the size grid, `L = r·B`) passing every geotechnical
/// check, then the thinnest slab passing the structural checks.
pub fn size_footing(
    ctx: &FootingContext<'_>,
    r: f64,
    first: &[ColumnBaseForces],
    second: &[ColumnBaseForces],
) -> Result<FootingDesign> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("rectangularity must be positive, got {r}")));
    }
    let widths = ctx.width_grid(r);
    if widths.is_empty() {
        return Err(Error::Geometry(format!(
            "no footing width fits the column within the {} m cap",
            ctx.cfg.max_size
        )));
    }
    let t0 = ctx.cfg.min_thickness;
    let mut chosen = None;
    for &b in &widths {
        let f = ctx.footing(b, r, t0);
        let geo = geotechnical_checks(&f, ctx.soil, &ctx.params, first, second, ctx.cfg);
        if geo.pass() {
            chosen = Some((f, geo, true));
            break;
        }
    }
    let (footing, geo, geo_ok) = chosen.unwrap_or_else(|| {
        let f = ctx.footing(*widths.last().expect("non-empty"), r, t0);
        let geo = geotechnical_checks(&f, ctx.soil, &ctx.params, first, second, ctx.cfg);
        (f, geo, false)
    });
    let (footing, structural) = ctx.design_slab(footing, first);
    let feasible = geo_ok && structural.pass();
    Ok(FootingDesign {
        footing,
        checks: FoundationChecks {
            geotechnical: geo,
            structural,
        },
        feasible,
    })
}
