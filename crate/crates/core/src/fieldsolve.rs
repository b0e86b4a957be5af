//! Quasi-static 2D Laplace solver for layered transmission-line
//! cross-sections.
//!
//! The section is a uniform grid of `nx × ny` cells with a piecewise-constant
//! permittivity per cell. Potentials live on the `(nx + 1) × (ny + 1)` cell
//! corners (nodes), so dielectric interfaces and thin metal strips lie along
//! node lines. Each grid edge between two nodes is a conductance made of the
//! (up to two) cells flanking it in parallel, each contributing half its
//! permittivity. Conductors fix the potential on every node inside their
//! (closed) rectangle; a rectangle of zero height is an ideal thin strip.
//!
//! The discrete system is solved by successive over-relaxation in a fixed
//! lexicographic order, so results are bit-reproducible. Field energy is
//! summed edge by edge with the same conductances, which makes `C = 2W/V²`
//! consistent with the discrete charge on the conductors.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};
use crate::cpw::CpwGeometry;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldSolveError {
    #[error("malformed cross-section: {0}")]
    Malformed(String),
    #[error("SOR did not converge in {iterations} iterations (last max update {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

/// Axis-aligned rectangle in metres.
///
/// Dielectric regions claim the cells whose centre lies in `[x0, x1) × [y0, y1)`.
/// Conductors claim the nodes in the closed rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    #[inline]
    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.x0 <= x && x < self.x1 && self.y0 <= y && y < self.y1
    }

    /// Closed containment with an absolute slack `eps`.
    #[inline]
    pub fn covers(&self, x: f64, y: f64, eps: f64) -> bool {
        self.x0 - eps <= x && x <= self.x1 + eps && self.y0 - eps <= y && y <= self.y1 + eps
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DielectricRegion {
    pub name: String,
    pub rect: Rect,
    pub eps_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conductor {
    pub name: String,
    pub rect: Rect,
    /// Fixed potential, V.
    pub potential: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Wall {
    /// Perfect conductor held at 0 V.
    Grounded,
    /// Zero normal flux (symmetry plane / magnetic wall).
    Insulating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Walls {
    pub left: Wall,
    pub right: Wall,
    pub bottom: Wall,
    pub top: Wall,
}

impl Walls {
    pub const GROUNDED_BOX: Walls = Walls {
        left: Wall::Grounded,
        right: Wall::Grounded,
        bottom: Wall::Grounded,
        top: Wall::Grounded,
    };

    pub const INSULATING: Walls = Walls {
        left: Wall::Insulating,
        right: Wall::Insulating,
        bottom: Wall::Insulating,
        top: Wall::Insulating,
    };
}

impl Default for Walls {
    fn default() -> Self {
        Self::GROUNDED_BOX
    }
}

/// A 2D cross-section: grid, dielectric regions, and fixed-potential
/// conductors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub regions: Vec<DielectricRegion>,
    pub conductors: Vec<Conductor>,
    pub walls: Walls,
}

/// Grid layout options for [`CrossSection::coplanar`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpwSectionOptions {
    /// Cells across the centre trace; sets the pitch `h = w / cells_per_trace`.
    pub cells_per_trace: usize,
    /// Box width as a multiple of the `w + 2s` aperture. The box is square and
    /// the metal plane sits at mid-height.
    pub box_factor: f64,
}

impl Default for CpwSectionOptions {
    fn default() -> Self {
        Self {
            cells_per_trace: 12,
            box_factor: 10.0,
        }
    }
}

/// Names used by [`CrossSection::coplanar`].
pub const SUBSTRATE_REGION: &str = "substrate";
pub const SUPERSTRATE_REGION: &str = "interlayer";

impl CrossSection {
    /// Coplanar waveguide with zero-thickness metal inside a grounded square
    /// box.
    ///
    /// Metal edges are placed halfway between nodes: a strip of `n` cells
    /// fixes `n` nodes. Pinning the edge on a node instead overstates the
    /// capacitance by an amount proportional to `h`, because the edge field is
    /// singular. The gap is snapped to the nearest whole number of cells (at
    /// least one).
    pub fn coplanar(
        geometry: &CpwGeometry,
        options: CpwSectionOptions,
    ) -> Result<Self, FieldSolveError> {
        geometry
            .validate()
            .map_err(|e| FieldSolveError::Malformed(e.to_string()))?;
        if options.cells_per_trace == 0 || !(options.box_factor >= 1.0) {
            return Err(FieldSolveError::Malformed(
                "cells_per_trace must be >= 1 and box_factor >= 1".into(),
            ));
        }
        let h = geometry.trace_width / options.cells_per_trace as f64;
        let n_trace = options.cells_per_trace;
        let n_gap = ((geometry.trace_gap / h).round() as usize).max(1);
        let n_aperture = n_trace + 2 * n_gap;
        let n_box = (options.box_factor * n_aperture as f64).ceil() as usize;
        let n_side = n_box.saturating_sub(n_aperture).div_ceil(2).max(1);
        let nx = n_aperture + 2 * n_side;
        let n_half = nx.div_ceil(2);
        let ny = 2 * n_half;

        let width = nx as f64 * h;
        let plane = n_half as f64 * h;
        let edge = |cells: usize| (cells as f64 + 0.5) * h;
        let strip = |x0: f64, x1: f64| Rect::new(x0, x1, plane, plane);

        Ok(Self {
            nx,
            ny,
            hx: h,
            hy: h,
            regions: vec![
                DielectricRegion {
                    name: SUBSTRATE_REGION.into(),
                    rect: Rect::new(0.0, width, 0.0, plane),
                    eps_r: geometry.eps_substrate,
                },
                DielectricRegion {
                    name: SUPERSTRATE_REGION.into(),
                    rect: Rect::new(0.0, width, plane, ny as f64 * h),
                    eps_r: geometry.eps_superstrate,
                },
            ],
            conductors: vec![
                Conductor {
                    name: "ground_left".into(),
                    rect: strip(0.0, edge(n_side)),
                    potential: 0.0,
                },
                Conductor {
                    name: "trace".into(),
                    rect: strip(edge(n_side + n_gap), edge(n_side + n_gap + n_trace)),
                    potential: 1.0,
                },
                Conductor {
                    name: "ground_right".into(),
                    rect: strip(edge(n_side + n_aperture), width),
                    potential: 0.0,
                },
            ],
            walls: Walls::GROUNDED_BOX,
        })
    }

    /// Copy with every region's permittivity replaced by `eps_r`.
    pub fn with_uniform_permittivity(&self, eps_r: f64) -> Self {
        let mut out = self.clone();
        for r in &mut out.regions {
            r.eps_r = eps_r;
        }
        out
    }

    #[inline]
    fn cell_centre(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 + 0.5) * self.hx, (j as f64 + 0.5) * self.hy)
    }

    #[inline]
    fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.hx, j as f64 * self.hy)
    }
}

/// SOR controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Converged once the largest single-node update in a sweep is ≤ `tol` volts.
    pub tol: f64,
    pub max_iter: usize,
    /// Over-relaxation factor; on divergence the solve restarts at 1.0.
    pub omega: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200_000,
            omega: 1.9,
        }
    }
}

/// Converged potential on the node grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSolution {
    /// Nodes per row (`cs.nx + 1`).
    pub nx: usize,
    /// Node rows (`cs.ny + 1`).
    pub ny: usize,
    /// Row-major (`j * nx + i`), volts.
    pub potential: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Largest update of the final sweep.
    pub residual: f64,
    /// Relaxation factor actually used.
    pub omega: f64,
}

impl FieldSolution {
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.potential[j * self.nx + i]
    }
}

/// Extracted line parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineParameters {
    pub eps_eff: f64,
    pub z0: f64,
    /// F/m with the actual dielectrics.
    pub capacitance: f64,
    /// F/m with every region set to vacuum.
    pub capacitance_vacuum: f64,
}

/// Edge between two nodes; its conductance is the sum of `parts`, one per
/// flanking cell (`(region, conductance)`).
#[derive(Debug, Clone, Copy)]
struct Edge {
    a: usize,
    b: usize,
    conductance: f64,
    parts: [(usize, f64); 2],
    n_parts: usize,
}

/// Validated, rasterised cross-section.
struct Raster {
    /// Nodes per row and node rows.
    mx: usize,
    my: usize,
    /// Fixed potential per node, if any.
    fixed: Vec<Option<f64>>,
    edges: Vec<Edge>,
    /// Conductor potentials plus 0 V if any wall is grounded.
    fixed_potentials: Vec<f64>,
}

impl Raster {
    fn build(cs: &CrossSection) -> Result<Self, FieldSolveError> {
        let malformed = |m: String| Err(FieldSolveError::Malformed(m));
        if cs.nx == 0 || cs.ny == 0 {
            return malformed("grid must have at least one cell in each direction".into());
        }
        if !(cs.hx > 0.0 && cs.hy > 0.0 && cs.hx.is_finite() && cs.hy.is_finite()) {
            return malformed(format!(
                "grid spacing must be positive, got ({}, {})",
                cs.hx, cs.hy
            ));
        }
        let mut names = BTreeSet::new();
        for r in &cs.regions {
            if !(r.eps_r >= 1.0 && r.eps_r.is_finite()) {
                return malformed(format!(
                    "region '{}' has permittivity {} < 1",
                    r.name, r.eps_r
                ));
            }
            if !names.insert(r.name.as_str()) {
                return malformed(format!("duplicate region name '{}'", r.name));
            }
        }
        if cs.conductors.is_empty() {
            return malformed("at least one conductor is required".into());
        }
        for c in &cs.conductors {
            if !c.potential.is_finite() {
                return malformed(format!("conductor '{}' has non-finite potential", c.name));
            }
        }

        let (nx, ny) = (cs.nx, cs.ny);
        let mut cells: Vec<(usize, f64)> = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (x, y) = cs.cell_centre(i, j);
                let mut region = None;
                for (k, r) in cs.regions.iter().enumerate() {
                    if r.rect.contains(x, y) {
                        if let Some(prev) = region {
                            let prev: &DielectricRegion = &cs.regions[prev];
                            return malformed(format!(
                                "cell ({i},{j}) lies in both '{}' and '{}'",
                                prev.name, r.name
                            ));
                        }
                        region = Some(k);
                    }
                }
                let Some(region) = region else {
                    return malformed(format!(
                        "cell ({i},{j}) is not covered by any dielectric region"
                    ));
                };
                cells.push((region, cs.regions[region].eps_r));
            }
        }

        let (mx, my) = (nx + 1, ny + 1);
        let slack = 1e-9 * cs.hx.min(cs.hy);
        let mut fixed: Vec<Option<f64>> = vec![None; mx * my];
        let mut owner: Vec<Option<usize>> = vec![None; mx * my];
        for j in 0..my {
            for i in 0..mx {
                let (x, y) = cs.node(i, j);
                for (k, c) in cs.conductors.iter().enumerate() {
                    if c.rect.covers(x, y, slack) {
                        if let Some(prev) = owner[j * mx + i] {
                            return malformed(format!(
                                "conductors '{}' and '{}' overlap at node ({i},{j})",
                                cs.conductors[prev].name, c.name
                            ));
                        }
                        owner[j * mx + i] = Some(k);
                        fixed[j * mx + i] = Some(c.potential);
                    }
                }
                let w = cs.walls;
                let on_grounded_wall = (i == 0 && w.left == Wall::Grounded)
                    || (i == nx && w.right == Wall::Grounded)
                    || (j == 0 && w.bottom == Wall::Grounded)
                    || (j == ny && w.top == Wall::Grounded);
                if on_grounded_wall {
                    if let Some(k) = owner[j * mx + i] {
                        let c = &cs.conductors[k];
                        if c.potential != 0.0 {
                            return malformed(format!(
                                "conductor '{}' at {} V touches a grounded wall",
                                c.name, c.potential
                            ));
                        }
                    }
                    fixed[j * mx + i] = Some(0.0);
                }
            }
        }
        if owner.iter().all(Option::is_none) {
            return malformed("no conductor covers any grid node".into());
        }

        let cell = |i: usize, j: usize| cells[j * nx + i];
        let mut edges = Vec::with_capacity(2 * mx * my);
        let mut push = |a: usize, b: usize, ratio: f64, flank: [Option<(usize, f64)>; 2]| {
            let mut parts = [(0, 0.0); 2];
            let mut n_parts = 0;
            for (region, eps) in flank.into_iter().flatten() {
                parts[n_parts] = (region, 0.5 * eps * ratio);
                n_parts += 1;
            }
            let conductance = parts[..n_parts].iter().map(|p| p.1).sum();
            edges.push(Edge {
                a,
                b,
                conductance,
                parts,
                n_parts,
            });
        };
        let gx = cs.hy / cs.hx;
        let gy = cs.hx / cs.hy;
        for j in 0..my {
            for i in 0..mx {
                let a = j * mx + i;
                if i < nx {
                    let below = (j > 0).then(|| cell(i, j - 1));
                    let above = (j < ny).then(|| cell(i, j));
                    push(a, a + 1, gx, [below, above]);
                }
                if j < ny {
                    let left = (i > 0).then(|| cell(i - 1, j));
                    let right = (i < nx).then(|| cell(i, j));
                    push(a, a + mx, gy, [left, right]);
                }
            }
        }

        let mut fixed_potentials: Vec<f64> = cs.conductors.iter().map(|c| c.potential).collect();
        let w = cs.walls;
        if [w.left, w.right, w.bottom, w.top].contains(&Wall::Grounded) {
            fixed_potentials.push(0.0);
        }

        let raster = Self {
            mx,
            my,
            fixed,
            edges,
            fixed_potentials,
        };
        raster.check_anchored()?;
        Ok(raster)
    }

    /// Every free node must connect to a fixed one, otherwise the discrete
    /// problem is singular.
    fn check_anchored(&self) -> Result<(), FieldSolveError> {
        let n = self.fixed.len();
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &self.edges {
            adjacency[e.a].push(e.b);
            adjacency[e.b].push(e.a);
        }
        let mut anchored: Vec<bool> = self.fixed.iter().map(Option::is_some).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&k| anchored[k]).collect();
        while let Some(k) = queue.pop_front() {
            for &m in &adjacency[k] {
                if !anchored[m] {
                    anchored[m] = true;
                    queue.push_back(m);
                }
            }
        }
        match anchored.iter().position(|a| !a) {
            Some(k) => Err(FieldSolveError::Malformed(format!(
                "node ({}, {}) is not connected to any conductor or grounded wall",
                k % self.mx,
                k / self.mx
            ))),
            None => Ok(()),
        }
    }
}

/// Per-unknown stencil in the padded potential array.
#[derive(Clone, Copy)]
struct Stencil {
    p: usize,
    w: f64,
    e: f64,
    s: f64,
    n: f64,
    inv_diag: f64,
}

fn padded(raster: &Raster, k: usize) -> usize {
    (k / raster.mx + 1) * (raster.mx + 2) + (k % raster.mx) + 1
}

fn stencils(raster: &Raster) -> Vec<Stencil> {
    let mx = raster.mx;
    // Coefficients toward W/E/S/N neighbours; absent neighbours (outside an
    // insulating wall) keep a zero coefficient.
    let mut coeff = vec![[0.0_f64; 4]; raster.fixed.len()];
    for e in &raster.edges {
        if e.b == e.a + 1 {
            coeff[e.a][1] += e.conductance;
            coeff[e.b][0] += e.conductance;
        } else {
            debug_assert_eq!(e.b, e.a + mx);
            coeff[e.a][3] += e.conductance;
            coeff[e.b][2] += e.conductance;
        }
    }
    (0..raster.fixed.len())
        .filter(|&k| raster.fixed[k].is_none())
        .map(|k| {
            let [w, e, s, n] = coeff[k];
            Stencil {
                p: padded(raster, k),
                w,
                e,
                s,
                n,
                inv_diag: 1.0 / (w + e + s + n),
            }
        })
        .collect()
}

/// Solves the discrete Laplace problem by SOR.
pub fn solve_potential(
    cs: &CrossSection,
    options: SolverOptions,
) -> Result<FieldSolution, FieldSolveError> {
    let raster = Raster::build(cs)?;
    solve_raster(&raster, options)
}

fn solve_raster(raster: &Raster, options: SolverOptions) -> Result<FieldSolution, FieldSolveError> {
    let (mx, my) = (raster.mx, raster.my);
    let stride = mx + 2;
    let st = stencils(raster);
    let v_scale = raster
        .fixed_potentials
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(1.0);

    let initial = {
        let mut phi = vec![0.0; stride * (my + 2)];
        for (k, v) in raster.fixed.iter().enumerate() {
            if let Some(v) = v {
                phi[padded(raster, k)] = *v;
            }
        }
        phi
    };

    let mut omega = options.omega;
    loop {
        let mut phi = initial.clone();
        let mut last = if st.is_empty() { 0.0 } else { f64::INFINITY };
        let mut diverged = false;
        let mut iterations = 0;
        if !st.is_empty() {
            for it in 1..=options.max_iter {
                iterations = it;
                let mut max_update = 0.0_f64;
                for s in &st {
                    let p = s.p;
                    let target = (s.w * phi[p - 1]
                        + s.e * phi[p + 1]
                        + s.s * phi[p - stride]
                        + s.n * phi[p + stride])
                        * s.inv_diag;
                    let delta = omega * (target - phi[p]);
                    phi[p] += delta;
                    max_update = max_update.max(delta.abs());
                }
                last = max_update;
                if !max_update.is_finite() || max_update > 1e3 * v_scale {
                    diverged = true;
                    break;
                }
                if max_update <= options.tol {
                    break;
                }
            }
        }
        if diverged && omega != 1.0 {
            log::warn!("SOR diverged at omega = {omega}; retrying with Gauss-Seidel");
            omega = 1.0;
            continue;
        }
        let converged = !diverged && last <= options.tol;
        if !converged {
            return Err(FieldSolveError::NonConvergence {
                iterations,
                residual: last,
            });
        }
        let mut potential = Vec::with_capacity(mx * my);
        for j in 0..my {
            let row = (j + 1) * stride + 1;
            potential.extend_from_slice(&phi[row..row + mx]);
        }
        return Ok(FieldSolution {
            nx: mx,
            ny: my,
            potential,
            converged,
            iterations,
            residual: last,
            omega,
        });
    }
}

/// Stored electric energy per unit length, total and per region (J/m).
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBreakdown {
    pub total: f64,
    pub per_region: Vec<f64>,
}

fn field_energy(cs: &CrossSection, raster: &Raster, sol: &FieldSolution) -> EnergyBreakdown {
    let mut per_region = vec![0.0; cs.regions.len()];
    for e in &raster.edges {
        let dv = sol.potential[e.a] - sol.potential[e.b];
        let scale = 0.5 * VACUUM_PERMITTIVITY * dv * dv;
        for &(region, g) in &e.parts[..e.n_parts] {
            per_region[region] += scale * g;
        }
    }
    EnergyBreakdown {
        total: per_region.iter().sum(),
        per_region,
    }
}

/// Energy breakdown of an existing solution.
pub fn energy(
    cs: &CrossSection,
    solution: &FieldSolution,
) -> Result<EnergyBreakdown, FieldSolveError> {
    let raster = Raster::build(cs)?;
    check_solution_shape(cs, solution)?;
    Ok(field_energy(cs, &raster, solution))
}

fn check_solution_shape(cs: &CrossSection, sol: &FieldSolution) -> Result<(), FieldSolveError> {
    let (mx, my) = (cs.nx + 1, cs.ny + 1);
    if sol.nx != mx || sol.ny != my || sol.potential.len() != mx * my {
        return Err(FieldSolveError::Malformed(
            "solution grid does not match the cross-section".into(),
        ));
    }
    if !sol.converged {
        return Err(FieldSolveError::Degenerate(
            "solution did not converge".into(),
        ));
    }
    Ok(())
}

fn potential_span(raster: &Raster) -> f64 {
    let max = raster
        .fixed_potentials
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let min = raster
        .fixed_potentials
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    max - min
}

/// Per-unit-length capacitance `C = 2W / V²` between the highest- and
/// lowest-potential conductors (grounded walls count as 0 V).
pub fn capacitance_per_length(
    cs: &CrossSection,
    options: SolverOptions,
) -> Result<f64, FieldSolveError> {
    let raster = Raster::build(cs)?;
    let v = potential_span(&raster);
    if v == 0.0 {
        return Err(FieldSolveError::Degenerate(
            "all conductors are at the same potential".into(),
        ));
    }
    let sol = solve_raster(&raster, options)?;
    Ok(2.0 * field_energy(cs, &raster, &sol).total / (v * v))
}

/// Quasi-TEM line parameters from two solves (actual dielectrics, vacuum).
///
/// `ε_eff = C / C_vac`, `Z0 = 1 / (c √(C · C_vac))`.
pub fn extract_eps_eff_and_z0(
    cs: &CrossSection,
    options: SolverOptions,
) -> Result<LineParameters, FieldSolveError> {
    let capacitance = capacitance_per_length(cs, options)?;
    let all_vacuum = cs.regions.iter().all(|r| r.eps_r == 1.0);
    let capacitance_vacuum = if all_vacuum {
        capacitance
    } else {
        capacitance_per_length(&cs.with_uniform_permittivity(1.0), options)?
    };
    Ok(LineParameters {
        eps_eff: capacitance / capacitance_vacuum,
        z0: 1.0 / (SPEED_OF_LIGHT * (capacitance * capacitance_vacuum).sqrt()),
        capacitance,
        capacitance_vacuum,
    })
}

/// Fraction of the stored electric energy in each named region.
pub fn energy_participation(
    cs: &CrossSection,
    solution: &FieldSolution,
) -> Result<BTreeMap<String, f64>, FieldSolveError> {
    let e = energy(cs, solution)?;
    if !(e.total > 0.0) {
        return Err(FieldSolveError::Degenerate(
            "total field energy is zero".into(),
        ));
    }
    Ok(cs
        .regions
        .iter()
        .zip(&e.per_region)
        .map(|(r, w)| (r.name.clone(), w / e.total))
        .collect())
}

/// Writes `x,y,v` rows (node positions in metres, potential in volts).
pub fn write_potential_csv<W: Write>(
    cs: &CrossSection,
    solution: &FieldSolution,
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "x,y,v")?;
    for j in 0..solution.ny {
        for i in 0..solution.nx {
            let (x, y) = cs.node(i, j);
            writeln!(
                out,
                "{},{},{}",
                crate::format::sig(x),
                crate::format::sig(y),
                crate::format::sig(solution.at(i, j))
            )?;
        }
    }
    Ok(())
}
