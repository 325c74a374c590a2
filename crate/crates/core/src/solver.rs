//! Linear static analysis of 3D frames by the direct stiffness method.
//!
//! Each member is a 12-DOF Euler-Bernoulli element. Local axes: `x` runs
//! from start to end node; for non-vertical members `y` is the upward
//! direction in the section plane, for vertical members `y` is global X.
//! The section height `h` lies along local `y`, the width `b` along local
//! `z`, so `Iz = b·h³/12` is the strong axis.
//!
//! Units: m, kN, kN·m, kPa (E is given in MPa and converted).

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, Matrix3, SMatrix, SVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Combination, StructuralModel};

/// Number of equally spaced force stations per member.
pub const STATIONS: usize = 5;

const DOF_NAMES: [&str; 6] = ["ux", "uy", "uz", "rx", "ry", "rz"];

type Mat12 = SMatrix<f64, 12, 12>;
type Vec12 = SVector<f64, 12>;

/// Elastic modulus of concrete, `E = 4700·√f'c` (both in MPa).
pub fn concrete_modulus(fc: f64) -> Result<f64> {
    if !(fc > 0.0) || !fc.is_finite() {
        return Err(Error::Domain(format!("f'c must be positive, got {fc}")));
    }
    Ok(4700.0 * fc.sqrt())
}

/// Rectangular concrete section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemberSection {
    pub b: f64,
    pub h: f64,
    /// Concrete grade f'c (MPa).
    pub fc: f64,
    /// Elastic modulus (MPa).
    pub e_mod: f64,
    pub area: f64,
    /// Weak-axis second moment, `h·b³/12`.
    pub iy: f64,
    /// Strong-axis second moment, `b·h³/12`.
    pub iz: f64,
    /// Saint-Venant torsion constant.
    pub j: f64,
}

impl MemberSection {
    pub fn new(b: f64, h: f64, fc: f64) -> Result<Self> {
        if !(b > 0.0 && h > 0.0) {
            return Err(Error::Domain(format!("section {b}x{h} must have positive sides")));
        }
        let e_mod = concrete_modulus(fc)?;
        Ok(MemberSection {
            b,
            h,
            fc,
            e_mod,
            area: b * h,
            iy: h * b.powi(3) / 12.0,
            iz: b * h.powi(3) / 12.0,
            j: torsion_constant(b, h),
        })
    }
}

/// Torsion constant of a solid rectangle (Roark approximation).
fn torsion_constant(b: f64, h: f64) -> f64 {
    let (long, short) = if b >= h { (b, h) } else { (h, b) };
    let r = short / long;
    long * short.powi(3) * (1.0 / 3.0 - 0.21 * r * (1.0 - r.powi(4) / 12.0))
}

/// Boundary condition of one nodal DOF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Restraint {
    Free,
    Fixed,
    /// Elastic spring (kN/m or kN·m/rad). Zero means released.
    Spring(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeRestraint {
    pub node: usize,
    pub dofs: [Restraint; 6],
}

impl NodeRestraint {
    pub fn fixed(node: usize) -> Self {
        NodeRestraint {
            node,
            dofs: [Restraint::Fixed; 6],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Unit weight of reinforced concrete for self-weight (kN/m³).
    pub concrete_unit_weight: f64,
    pub poisson: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            concrete_unit_weight: 24.0,
            poisson: 0.2,
        }
    }
}

/// Nodal and member loads in global axes.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadSet {
    /// Per node: force (kN) and moment (kN·m) components.
    pub nodal: Vec<[f64; 6]>,
    /// Per member: uniform load (kN/m).
    pub member_q: Vec<[f64; 3]>,
}

impl LoadSet {
    pub fn zeros(nodes: usize, members: usize) -> Self {
        LoadSet {
            nodal: vec![[0.0; 6]; nodes],
            member_q: vec![[0.0; 3]; members],
        }
    }

    pub fn add_scaled(&mut self, other: &LoadSet, factor: f64) {
        for (a, b) in self.nodal.iter_mut().zip(&other.nodal) {
            for k in 0..6 {
                a[k] += factor * b[k];
            }
        }
        for (a, b) in self.member_q.iter_mut().zip(&other.member_q) {
            for k in 0..3 {
                a[k] += factor * b[k];
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationForces {
    /// Distance from the start node (m).
    pub x: f64,
    /// Axial force, tension positive (kN).
    pub axial: f64,
    pub shear_y: f64,
    pub shear_z: f64,
    pub torsion: f64,
    /// Weak-axis moment (kN·m).
    pub moment_y: f64,
    /// Strong-axis moment, positive when the local −y fibre is in tension.
    pub moment_z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberResult {
    pub stations: Vec<StationForces>,
    /// Largest transverse deflection relative to the chord (m).
    pub max_deflection: f64,
}

/// Analysis output for one load set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InternalForces {
    /// Per node: three translations (m) and three rotations (rad).
    pub displacements: Vec<[f64; 6]>,
    pub members: Vec<MemberResult>,
    /// Reaction per restrained node, in restraint order.
    pub reactions: Vec<(usize, [f64; 6])>,
    /// Largest horizontal displacement among top-level nodes (m).
    pub top_drift: f64,
    /// Total applied force per global direction (kN).
    pub applied: [f64; 3],
}

impl InternalForces {
    /// Σ reactions + Σ applied loads per global direction.
    pub fn equilibrium_residual(&self) -> [f64; 3] {
        let mut r = self.applied;
        for (_, f) in &self.reactions {
            for k in 0..3 {
                r[k] += f[k];
            }
        }
        r
    }

    pub fn reaction_at(&self, node: usize) -> Option<[f64; 6]> {
        self.reactions.iter().find(|(n, _)| *n == node).map(|(_, f)| *f)
    }
}

struct Element {
    start: usize,
    end: usize,
    length: f64,
    rot: Matrix3<f64>,
    section: MemberSection,
    k_local: Mat12,
}

impl Element {
    fn transform(&self) -> Mat12 {
        let mut t = Mat12::zeros();
        for blk in 0..4 {
            t.fixed_view_mut::<3, 3>(3 * blk, 3 * blk).copy_from(&self.rot);
        }
        t
    }

    fn dofs(&self) -> [usize; 12] {
        let mut d = [0; 12];
        for k in 0..6 {
            d[k] = 6 * self.start + k;
            d[6 + k] = 6 * self.end + k;
        }
        d
    }

    /// End forces on the element with both ends clamped under local load `w`.
    fn fixed_end_forces(&self, w: &Vector3<f64>) -> Vec12 {
        let l = self.length;
        let mut f = Vec12::zeros();
        f[0] = -w.x * l / 2.0;
        f[6] = -w.x * l / 2.0;
        f[1] = -w.y * l / 2.0;
        f[7] = -w.y * l / 2.0;
        f[5] = -w.y * l * l / 12.0;
        f[11] = w.y * l * l / 12.0;
        f[2] = -w.z * l / 2.0;
        f[8] = -w.z * l / 2.0;
        f[4] = w.z * l * l / 12.0;
        f[10] = -w.z * l * l / 12.0;
        f
    }
}

fn local_axes(a: &[f64; 3], b: &[f64; 3]) -> (f64, Matrix3<f64>) {
    let d = Vector3::new(b[0] - a[0], b[1] - a[1], b[2] - a[2]);
    let l = d.norm();
    let x = d / l;
    let up = Vector3::z();
    let y = if x.dot(&up).abs() > 1.0 - 1e-9 {
        Vector3::x()
    } else {
        (up - x * x.dot(&up)).normalize()
    };
    let z = x.cross(&y);
    let rot = Matrix3::from_rows(&[x.transpose(), y.transpose(), z.transpose()]);
    (l, rot)
}

fn local_stiffness(s: &MemberSection, l: f64, poisson: f64) -> Mat12 {
    let e = s.e_mod * 1000.0; // kPa
    let g = e / (2.0 * (1.0 + poisson));
    let mut k = Mat12::zeros();
    let mut set = |i: usize, j: usize, v: f64| {
        k[(i, j)] = v;
        k[(j, i)] = v;
    };
    let ea = e * s.area / l;
    set(0, 0, ea);
    set(6, 6, ea);
    set(0, 6, -ea);
    let gj = g * s.j / l;
    set(3, 3, gj);
    set(9, 9, gj);
    set(3, 9, -gj);

    let eiz = e * s.iz;
    set(1, 1, 12.0 * eiz / l.powi(3));
    set(7, 7, 12.0 * eiz / l.powi(3));
    set(1, 7, -12.0 * eiz / l.powi(3));
    set(1, 5, 6.0 * eiz / l.powi(2));
    set(1, 11, 6.0 * eiz / l.powi(2));
    set(5, 7, -6.0 * eiz / l.powi(2));
    set(7, 11, -6.0 * eiz / l.powi(2));
    set(5, 5, 4.0 * eiz / l);
    set(11, 11, 4.0 * eiz / l);
    set(5, 11, 2.0 * eiz / l);

    let eiy = e * s.iy;
    set(2, 2, 12.0 * eiy / l.powi(3));
    set(8, 8, 12.0 * eiy / l.powi(3));
    set(2, 8, -12.0 * eiy / l.powi(3));
    set(2, 4, -6.0 * eiy / l.powi(2));
    set(2, 10, -6.0 * eiy / l.powi(2));
    set(4, 8, 6.0 * eiy / l.powi(2));
    set(8, 10, 6.0 * eiy / l.powi(2));
    set(4, 4, 4.0 * eiy / l);
    set(10, 10, 4.0 * eiy / l);
    set(4, 10, 2.0 * eiy / l);
    k
}

/// An assembled and factorized frame, ready to solve any number of load sets.
pub struct FrameSolver<'m> {
    model: &'m StructuralModel,
    options: SolverOptions,
    elements: Vec<Element>,
    restraints: Vec<NodeRestraint>,
    k_full: DMatrix<f64>,
    free: Vec<usize>,
    factor: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    top_nodes: Vec<usize>,
}

impl<'m> FrameSolver<'m> {
    /// Assembles the global stiffness. `sections` holds one section per
    /// member, in model order.
    pub fn new(
        model: &'m StructuralModel,
        sections: &[MemberSection],
        restraints: &[NodeRestraint],
        options: SolverOptions,
    ) -> Result<Self> {
        if sections.len() != model.members.len() {
            return Err(Error::Model(format!(
                "{} sections for {} members",
                sections.len(),
                model.members.len()
            )));
        }
        let index = model.node_index();
        let n = 6 * model.nodes.len();

        let mut elements = Vec::with_capacity(model.members.len());
        for (m, s) in model.members.iter().zip(sections) {
            let (&start, &end) = match (index.get(m.start.as_str()), index.get(m.end.as_str())) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::Model(format!("member {} has a missing end node", m.id))),
            };
            let (length, rot) = local_axes(&model.nodes[start].coords, &model.nodes[end].coords);
            if !(length > 1e-9) {
                return Err(Error::Model(format!("member {} has zero length", m.id)));
            }
            elements.push(Element {
                start,
                end,
                length,
                rot,
                section: *s,
                k_local: local_stiffness(s, length, options.poisson),
            });
        }

        let mut k_full = DMatrix::<f64>::zeros(n, n);
        for el in &elements {
            let t = el.transform();
            let kg = t.transpose() * el.k_local * t;
            let dofs = el.dofs();
            for (a, &i) in dofs.iter().enumerate() {
                for (b, &j) in dofs.iter().enumerate() {
                    k_full[(i, j)] += kg[(a, b)];
                }
            }
        }

        let mut fixed = vec![false; n];
        let mut k_bc = k_full.clone();
        for r in restraints {
            for (k, dof) in r.dofs.iter().enumerate() {
                let d = 6 * r.node + k;
                match *dof {
                    Restraint::Fixed => fixed[d] = true,
                    Restraint::Spring(ks) => k_bc[(d, d)] += ks.max(0.0),
                    Restraint::Free => {}
                }
            }
        }
        let free: Vec<usize> = (0..n).filter(|&d| !fixed[d]).collect();
        let nf = free.len();
        let k_ff = DMatrix::from_fn(nf, nf, |i, j| k_bc[(free[i], free[j])]);

        let label = |d: usize| format!("{}:{}", model.nodes[d / 6].id, DOF_NAMES[d % 6]);
        let factor = match k_ff.clone().cholesky() {
            Some(c) if well_conditioned(&c, &k_ff) => c,
            _ => {
                return Err(Error::Singular {
                    free_dofs: free_modes(&k_ff).into_iter().map(|i| label(free[i])).collect(),
                })
            }
        };

        Ok(FrameSolver {
            model,
            options,
            elements,
            restraints: restraints.to_vec(),
            k_full,
            free,
            factor,
            top_nodes: model.top_nodes(),
        })
    }

    /// Loads of one combination, including the generated self-weight.
    pub fn combination_loads(&self, combo: &Combination) -> LoadSet {
        let mut total = LoadSet::zeros(self.model.nodes.len(), self.model.members.len());
        let nodes = self.model.node_index();
        let members = self.model.member_index();
        for case in &self.model.load_cases {
            let Some(&factor) = combo.factors.get(&case.name) else {
                continue;
            };
            for l in &case.nodal_loads {
                if let Some(&i) = nodes.get(l.node.as_str()) {
                    for k in 0..3 {
                        total.nodal[i][k] += factor * l.force[k];
                        total.nodal[i][3 + k] += factor * l.moment[k];
                    }
                }
            }
            for l in &case.member_loads {
                if let Some(&i) = members.get(l.member.as_str()) {
                    for k in 0..3 {
                        total.member_q[i][k] += factor * l.q[k];
                    }
                }
            }
        }
        if combo.self_weight != 0.0 {
            for (i, el) in self.elements.iter().enumerate() {
                total.member_q[i][2] -=
                    combo.self_weight * self.options.concrete_unit_weight * el.section.area;
            }
        }
        total
    }

    pub fn solve_combination(&self, combo: &Combination) -> InternalForces {
        self.solve(&self.combination_loads(combo))
    }

    pub fn solve(&self, loads: &LoadSet) -> InternalForces {
        let n = 6 * self.model.nodes.len();
        let mut f = DVector::<f64>::zeros(n);
        let mut applied = [0.0; 3];
        for (i, p) in loads.nodal.iter().enumerate() {
            for k in 0..6 {
                f[6 * i + k] += p[k];
            }
            for k in 0..3 {
                applied[k] += p[k];
            }
        }
        let mut fixed_end = Vec::with_capacity(self.elements.len());
        for (el, q) in self.elements.iter().zip(&loads.member_q) {
            let wg = Vector3::new(q[0], q[1], q[2]);
            for k in 0..3 {
                applied[k] += q[k] * el.length;
            }
            let fe = el.fixed_end_forces(&(el.rot * wg));
            let eq = el.transform().transpose() * (-fe);
            for (a, &d) in el.dofs().iter().enumerate() {
                f[d] += eq[a];
            }
            fixed_end.push((el.rot * wg, fe));
        }

        let f_free = DVector::from_iterator(self.free.len(), self.free.iter().map(|&d| f[d]));
        let u_free = self.factor.solve(&f_free);
        let mut u = DVector::<f64>::zeros(n);
        for (i, &d) in self.free.iter().enumerate() {
            u[d] = u_free[i];
        }

        let ku = &self.k_full * &u;
        let reactions = self
            .restraints
            .iter()
            .map(|r| {
                let mut out = [0.0; 6];
                for (k, dof) in r.dofs.iter().enumerate() {
                    let d = 6 * r.node + k;
                    out[k] = match *dof {
                        Restraint::Fixed => ku[d] - f[d],
                        Restraint::Spring(ks) => -ks.max(0.0) * u[d],
                        Restraint::Free => 0.0,
                    };
                }
                (r.node, out)
            })
            .collect();

        let members = self
            .elements
            .iter()
            .zip(fixed_end)
            .map(|(el, (w, fe))| member_result(el, &u, &w, &fe))
            .collect();

        let displacements = (0..self.model.nodes.len())
            .map(|i| {
                let mut d = [0.0; 6];
                for k in 0..6 {
                    d[k] = u[6 * i + k];
                }
                d
            })
            .collect::<Vec<_>>();
        let top_drift = self
            .top_nodes
            .iter()
            .map(|&i| displacements[i][0].hypot(displacements[i][1]))
            .fold(0.0, f64::max);

        InternalForces {
            displacements,
            members,
            reactions,
            top_drift,
            applied,
        }
    }
}

fn well_conditioned(c: &nalgebra::Cholesky<f64, nalgebra::Dyn>, k: &DMatrix<f64>) -> bool {
    let l = c.l_dirty();
    let min_pivot = (0..k.nrows()).map(|i| l[(i, i)].powi(2)).fold(f64::INFINITY, f64::min);
    let max_diag = (0..k.nrows()).map(|i| k[(i, i)].abs()).fold(0.0, f64::max);
    k.nrows() == 0 || min_pivot > 1e-14 * max_diag
}

/// Free-DOF indices participating in near-zero-energy modes.
fn free_modes(k: &DMatrix<f64>) -> Vec<usize> {
    if k.nrows() == 0 {
        return Vec::new();
    }
    let eig = k.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let mut dofs = Vec::new();
    for (m, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() <= 1e-10 * max {
            let v = eig.eigenvectors.column(m);
            let peak = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            for (i, x) in v.iter().enumerate() {
                if x.abs() >= 0.3 * peak && !dofs.contains(&i) {
                    dofs.push(i);
                }
            }
        }
    }
    dofs.sort_unstable();
    dofs
}

fn member_result(el: &Element, u: &DVector<f64>, w: &Vector3<f64>, fe: &Vec12) -> MemberResult {
    let dofs = el.dofs();
    let ug = Vec12::from_iterator(dofs.iter().map(|&d| u[d]));
    let ul = el.transform() * ug;
    let f = el.k_local * ul + fe;
    let l = el.length;
    let s = &el.section;
    let e = s.e_mod * 1000.0;

    let stations = (0..STATIONS)
        .map(|i| {
            let x = l * i as f64 / (STATIONS - 1) as f64;
            StationForces {
                x,
                axial: -f[0] - w.x * x,
                shear_y: -f[1] - w.y * x,
                shear_z: -f[2] - w.z * x,
                torsion: -f[3],
                moment_y: -f[4] - x * f[2] - w.z * x * x / 2.0,
                moment_z: -f[5] + x * f[1] + w.y * x * x / 2.0,
            }
        })
        .collect();

    // Hermite interpolation of end displacements plus the clamped-beam
    // particular solution under uniform load, measured from the chord.
    let chord_offset = |v1: f64, t1: f64, v2: f64, t2: f64, wq: f64, ei: f64, xi: f64| {
        let n1 = 1.0 - 3.0 * xi * xi + 2.0 * xi.powi(3);
        let n2 = l * (xi - 2.0 * xi * xi + xi.powi(3));
        let n3 = 3.0 * xi * xi - 2.0 * xi.powi(3);
        let n4 = l * (xi.powi(3) - xi * xi);
        let x = xi * l;
        let v = n1 * v1 + n2 * t1 + n3 * v2 + n4 * t2 + wq * x * x * (l - x).powi(2) / (24.0 * ei);
        v - (v1 + (v2 - v1) * xi)
    };
    let max_deflection = (0..STATIONS)
        .map(|i| {
            let xi = i as f64 / (STATIONS - 1) as f64;
            let dv = chord_offset(ul[1], ul[5], ul[7], ul[11], w.y, e * s.iz, xi);
            let dw = chord_offset(ul[2], -ul[4], ul[8], -ul[10], w.z, e * s.iy, xi);
            dv.hypot(dw)
        })
        .fold(0.0, f64::max);

    MemberResult {
        stations,
        max_deflection,
    }
}

/// Resolves one section per member from per-group sections.
pub fn member_sections(
    model: &StructuralModel,
    by_group: &HashMap<String, MemberSection>,
) -> Result<Vec<MemberSection>> {
    model
        .members
        .iter()
        .map(|m| {
            by_group
                .get(&m.group)
                .copied()
                .ok_or_else(|| Error::Model(format!("no section for group `{}`", m.group)))
        })
        .collect()
}

/// Solves every combination with one factorization.
pub fn solve_static(
    model: &StructuralModel,
    sections: &HashMap<String, MemberSection>,
    restraints: &[NodeRestraint],
    combinations: &[Combination],
    options: SolverOptions,
) -> Result<Vec<InternalForces>> {
    let per_member = member_sections(model, sections)?;
    let solver = FrameSolver::new(model, &per_member, restraints, options)?;
    Ok(combinations.iter().map(|c| solver.solve_combination(c)).collect())
}
