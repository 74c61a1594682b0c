//! Curated scenario manifolds and the theorem-level verification drivers.
//!
//! Four surfaces exercise every regime:
//!
//! * `plane` — flat chart window, one end, linear fields solve the eikonal
//!   equation exactly (the non-vacuity control lives here);
//! * `cylinder` — slender periodic chart, two ends, the valley fields and
//!   the connectedness path;
//! * `capped_half_cylinder` — half-cylinder closed by a spherical cap chart
//!   and a pole node: one end, singleton boundary, maxima inside the cap;
//! * `pants` — two plus-shaped flat charts glued along their outline: three
//!   cylindrical legs around a compact core with two negative cone points.
//!
//! Every battery field is built from escaping sets aligned with the product
//! structure of the ends, which makes the graph-backend fields exact up to
//! float rounding; the drivers then check the eikonal characterization at
//! tolerances set by the stencil bound alone.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eikonal::ScalarField;
use crate::ends::{end_partition, verify_coray_cofinality, EndPartition};
use crate::error::{Error, Result};
use crate::geodesics::{trace_ray, Path, Ray};
use crate::ideal_boundary::{
    cluster_boundary, connect_path, rho, rho_quotient, BoundaryPoint, CompactExhaustion,
};
use crate::limits::{busemann, dl_function, horofunction, LimitOptions};
use crate::manifold::{
    build_chart_manifold, dijkstra_from, glue, ChartSpec, DiscreteManifold, MetricTensor, NodeId,
    NodeSet, Seam, SideKind, Sides,
};
use crate::report::Report;
use crate::tol::{
    levelset_check_tol, reconstruction_tol, GRAD_TOL, PATH_TOL, RESIDUAL_TOL, SEMICONCAVITY_CAP,
    SHIFT_TOL,
};
use crate::viscosity::{
    eikonal_residual, levelset_distance_check, levelset_reconstruct, min_combine,
    semiconcavity_probe, singular_set,
};

/// Scenario metadata: construction-known invariants and thresholds.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub known_ends: usize,
    pub known_minfty_lower_bound: usize,
    pub expected_c1_solution_exists: bool,
    /// clustering threshold (half the minimum separation of known-distinct
    /// classes on this geometry)
    pub eps: f64,
    pub end_radii: Vec<f64>,
    pub exhaustion_radii: Vec<f64>,
}

/// A named verification field with an optional probe zone for the
/// semiconcavity check (None = the field's reliable region).
pub struct BatteryField {
    pub name: String,
    pub field: ScalarField,
    pub probe_zone: Option<Vec<NodeId>>,
}

pub struct BuiltScenario {
    pub manifold: DiscreteManifold,
    pub meta: Scenario,
    pub base: NodeId,
    pub h: f64,
}

pub const SCENARIO_NAMES: [&str; 4] = ["plane", "cylinder", "capped_half_cylinder", "pants"];

/// Build a named scenario at the given per-axis resolution (the plane chart
/// carries `res` nodes per axis; the other scenarios match its grid step).
pub fn scenario(name: &str, res: usize) -> Result<BuiltScenario> {
    if res < 17 {
        return Err(Error::Config(format!("resolution {res} too small (need >= 17)")));
    }
    match name {
        "plane" => plane_scenario(res),
        "cylinder" => cylinder_scenario(res),
        "capped_half_cylinder" => capped_scenario(res),
        "pants" => pants_scenario(res),
        other => Err(Error::UnknownScenario(other.to_string())),
    }
}

fn base_h(res: usize) -> f64 {
    2.0 / (res - 1) as f64
}

fn plane_scenario(res: usize) -> Result<BuiltScenario> {
    let mut m = build_chart_manifold(ChartSpec::flat("plane", -1.0, 1.0, -1.0, 1.0, res, res))?;
    m.declare_convex_window();
    let base = m.node_at(0, res / 2, res / 2).unwrap();
    Ok(BuiltScenario {
        manifold: m,
        meta: Scenario {
            name: "plane".into(),
            known_ends: 1,
            known_minfty_lower_bound: 4,
            expected_c1_solution_exists: true,
            eps: 0.15,
            end_radii: vec![0.4, 0.5, 0.6],
            exhaustion_radii: vec![0.2, 0.35, 0.5, 0.7],
        },
        base,
        h: base_h(res),
    })
}

fn cylinder_scenario(res: usize) -> Result<BuiltScenario> {
    let h = base_h(res);
    let circumference = 1.0;
    let nu = (circumference / h).round() as usize;
    let nv = (4.0 / h).round() as usize + 1;
    let spec = ChartSpec::flat("cylinder", 0.0, circumference, -2.0, 2.0, nu, nv).periodic_u();
    let mut m = build_chart_manifold(spec)?;
    m.declare_convex_window();
    let base = m.node_at(0, 0, nv / 2).unwrap();
    Ok(BuiltScenario {
        manifold: m,
        meta: Scenario {
            name: "cylinder".into(),
            known_ends: 2,
            known_minfty_lower_bound: 2,
            expected_c1_solution_exists: true,
            eps: 0.2,
            end_radii: vec![0.55, 0.7, 0.85],
            exhaustion_radii: vec![0.15, 0.3, 0.45, 0.6],
        },
        base,
        h,
    })
}

/// Capped half-cylinder: flat tube of circumference L closed from below by
/// a spherical cap chart (metric g11 = cos²(v/ρ)) and a pole node.
fn capped_scenario(res: usize) -> Result<BuiltScenario> {
    let h = base_h(res);
    let circumference = 0.5;
    let rho_cap = circumference / std::f64::consts::TAU;
    let depth = rho_cap * std::f64::consts::FRAC_PI_2;
    let height = 2.2;
    let nu = (circumference / h).round() as usize;
    let nv_cyl = (height / h).round() as usize + 1;
    let cap_rows = ((depth - 2.0 * h) / h).floor() as usize;
    if cap_rows < 2 {
        return Err(Error::Config(format!(
            "resolution {res} too coarse for the cap chart (needs >= 2 rows)"
        )));
    }
    let v_max = cap_rows as f64 * h;
    let apex_len = depth - v_max;

    let mut b = crate::manifold::ManifoldBuilder::new();
    let cyl = b.add_chart(
        ChartSpec::flat("tube", 0.0, circumference, 0.0, height, nu, nv_cyl)
            .periodic_u()
            .with_sides(Sides {
                left: SideKind::Seal,
                right: SideKind::Seal,
                bottom: SideKind::Seal,
                top: SideKind::Cut,
            }),
    )?;
    let cap = b.add_chart(
        ChartSpec::flat("cap", 0.0, circumference, 0.0, v_max, nu, cap_rows + 1)
            .periodic_u()
            .with_sides(Sides {
                left: SideKind::Seal,
                right: SideKind::Seal,
                bottom: SideKind::Seal,
                top: SideKind::Seal,
            })
            .with_metric(move |_, v| MetricTensor {
                g11: (v / rho_cap).cos().powi(2),
                g12: 0.0,
                g22: 1.0,
            }),
    )?;
    for i in 0..nu {
        b.identify(cyl, (i, 0), cap, (i, 0))?;
    }
    let rim: Vec<(usize, usize)> = (0..nu).map(|i| (i, cap_rows)).collect();
    b.add_apex(cap, &rim, apex_len, (0.0, -depth))?;
    let mut m = b.finalize()?;
    m.declare_convex_window();
    let base_j = (0.3 / h).round() as usize;
    let base = m.node_at(0, 0, base_j).unwrap();
    Ok(BuiltScenario {
        manifold: m,
        meta: Scenario {
            name: "capped_half_cylinder".into(),
            known_ends: 1,
            known_minfty_lower_bound: 1,
            expected_c1_solution_exists: false,
            eps: 0.2,
            end_radii: vec![0.3, 0.5, 0.7],
            exhaustion_radii: vec![0.08, 0.16, 0.24, 0.3],
        },
        base,
        h,
    })
}

/// Pants: two plus-shaped flat charts (core square of side 1 with three leg
/// rectangles) glued along their outline. The legs become flat cylinders of
/// circumference 2; the two notch identifications concentrate curvature -π
/// each, giving total curvature -2π.
fn pants_scenario(res: usize) -> Result<BuiltScenario> {
    // Integer cell counts keep the pattern breakpoints (u = 0, a; v = a)
    // exactly on grid lines; the leg length is quantized accordingly.
    // The coarser step keeps the node budget level with the plane window.
    let cells_per_unit = (1.0 / (1.5 * base_h(res))).round().max(8.0);
    let h = 1.0 / cells_per_unit;
    let a = 1.0;
    let a_cells = cells_per_unit as usize;
    let leg_cells = (1.6 * cells_per_unit).round() as usize;
    let leg = leg_cells as f64 * h;
    let nu = a_cells + 2 * leg_cells + 1;
    let nv = a_cells + leg_cells + 1;
    let tol = 0.25 * h;
    let mask = move |u: f64, v: f64| -> bool {
        let in_band = v <= a + tol; // S, R1, R3
        let in_stalk = (-tol..=a + tol).contains(&u); // S, R2
        in_band || in_stalk
    };
    let plus = |name: &str| {
        ChartSpec::flat(name, -leg, a + leg, 0.0, a + leg, nu, nv)
            .with_mask(mask)
            .with_sides(Sides {
                left: SideKind::Cut,
                right: SideKind::Cut,
                bottom: SideKind::Seal,
                top: SideKind::Cut,
            })
    };
    let front = build_chart_manifold(plus("front"))?;
    let back = build_chart_manifold(plus("back"))?;

    // outline = everything except the three mouths
    let j_a = a_cells;
    let i_0 = leg_cells;
    let i_a = leg_cells + a_cells;
    let mut outline: Vec<(usize, usize)> = Vec::new();
    for i in 0..nu {
        outline.push((i, 0)); // bottom of the band
    }
    for i in 0..=i_0 {
        outline.push((i, j_a)); // top of R1, including the notch (0, a)
    }
    for i in i_a..nu {
        outline.push((i, j_a)); // top of R3, including the notch (a, a)
    }
    for j in j_a + 1..nv {
        outline.push((i_0, j)); // left flank of R2
        outline.push((i_a, j)); // right flank of R2
    }
    let nodes: Vec<NodeId> = outline
        .iter()
        .filter_map(|&(i, j)| front.node_at(0, i, j))
        .collect();
    assert_eq!(nodes.len(), outline.len(), "outline node missing from the mask");
    let seam = Seam { a_part: 0, a_nodes: nodes.clone(), b_part: 1, b_nodes: nodes };
    let mut m = glue(&[front, back], &[seam])?;
    m.declare_convex_window();
    let base = m.node_at(0, leg_cells + a_cells / 2, a_cells / 2).unwrap();
    Ok(BuiltScenario {
        manifold: m,
        meta: Scenario {
            name: "pants".into(),
            known_ends: 3,
            known_minfty_lower_bound: 3,
            expected_c1_solution_exists: false,
            eps: 0.25,
            end_radii: vec![1.35, 1.45, 1.55],
            exhaustion_radii: vec![0.3, 0.6, 0.9, 1.2],
        },
        base,
        h,
    })
}

impl BuiltScenario {
    pub fn exhaustion(&self) -> Result<CompactExhaustion> {
        CompactExhaustion::balls(&self.manifold, self.base, &self.meta.exhaustion_radii)
    }

    pub fn ends(&self) -> Result<EndPartition> {
        end_partition(&self.manifold, self.base, &self.meta.end_radii)
    }

    fn grid_info(&self, chart: usize) -> &crate::manifold::ChartInfo {
        &self.manifold.charts()[chart]
    }

    fn column_set(&self, chart: usize, i: usize) -> Result<NodeSet> {
        let info = self.grid_info(chart);
        let nodes: Vec<NodeId> =
            (0..info.nv).filter_map(|j| self.manifold.node_at(chart, i, j)).collect();
        NodeSet::new(nodes)
    }

    fn row_set(&self, chart: usize, j: usize) -> Result<NodeSet> {
        let info = self.grid_info(chart);
        let nodes: Vec<NodeId> =
            (0..info.nu).filter_map(|i| self.manifold.node_at(chart, i, j)).collect();
        NodeSet::new(nodes)
    }

    fn i_at(&self, chart: usize, u: f64) -> usize {
        let info = self.grid_info(chart);
        ((u - info.u0) / info.hu).round() as usize
    }

    fn j_at(&self, chart: usize, v: f64) -> usize {
        let info = self.grid_info(chart);
        ((v - info.v0) / info.hv).round() as usize
    }

    /// Escaping line sets on the plane (east, west, north, south).
    pub fn dl_line_sets(&self, end: &str) -> Result<Vec<NodeSet>> {
        if self.meta.name != "plane" {
            return Err(Error::Config("line sets exist on the plane scenario".into()));
        }
        let us = [0.45, 0.6, 0.75, 0.9];
        match end {
            "east" | "e" => us.iter().map(|&u| self.column_set(0, self.i_at(0, u))).collect(),
            "west" | "w" => us.iter().map(|&u| self.column_set(0, self.i_at(0, -u))).collect(),
            "north" | "n" => us.iter().map(|&v| self.row_set(0, self.j_at(0, v))).collect(),
            "south" | "s" => us.iter().map(|&v| self.row_set(0, self.j_at(0, -v))).collect(),
            other => Err(Error::Config(format!("unknown plane end `{other}`"))),
        }
    }

    /// Escaping circle sets on the cylinder (up, down) or the capped
    /// half-cylinder (up).
    pub fn dl_circle_sets(&self, end: &str) -> Result<Vec<NodeSet>> {
        match (self.meta.name.as_str(), end) {
            ("cylinder", "up") => {
                [1.2, 1.5, 1.7, 1.9].iter().map(|&v| self.row_set(0, self.j_at(0, v))).collect()
            }
            ("cylinder", "down") => {
                [1.2, 1.5, 1.7, 1.9].iter().map(|&v| self.row_set(0, self.j_at(0, -v))).collect()
            }
            ("capped_half_cylinder", "up") => {
                [1.2, 1.5, 1.8, 2.05].iter().map(|&z| self.row_set(0, self.j_at(0, z))).collect()
            }
            (name, other) => Err(Error::Config(format!("no circle sets `{other}` on {name}"))),
        }
    }

    /// Escaping leg cross-circles on the pants (a, b, c).
    pub fn dl_leg_sets(&self, end: &str) -> Result<Vec<NodeSet>> {
        if self.meta.name != "pants" {
            return Err(Error::Config("leg sets exist on the pants scenario".into()));
        }
        let c = match end {
            "a" => 'a',
            "b" => 'b',
            "c" => 'c',
            other => return Err(Error::Config(format!("unknown leg `{other}`"))),
        };
        [0.6, 0.9, 1.2, 1.45].iter().map(|&s| self.pants_leg_circle(c, s)).collect()
    }

    /// dl field from a sequence of escaping sets, normalized at the base.
    fn dl(&self, sets: &[NodeSet]) -> Result<ScalarField> {
        let (f, rep) = dl_function(&self.manifold, sets, self.base, LimitOptions::default())?;
        if !rep.converged {
            return Err(Error::NotConverged(format!(
                "dl limit on {} (sup change {:.3e})",
                self.meta.name, rep.sup_change_last
            )));
        }
        Ok(f)
    }

    /// Node battery of verification fields for this scenario.
    pub fn battery(&self) -> Result<Vec<BatteryField>> {
        match self.meta.name.as_str() {
            "plane" => {
                let east = self.dl(&self.dl_line_sets("east")?)?;
                let west = self.dl(&self.dl_line_sets("west")?)?;
                let north = self.dl(&self.dl_line_sets("north")?)?;
                let south = self.dl(&self.dl_line_sets("south")?)?;
                let min_en = min_combine(&east, &north)?;
                let tent = min_combine(&east, &west)?;
                Ok(vec![
                    BatteryField { name: "plane.dl_east".into(), field: east, probe_zone: None },
                    BatteryField { name: "plane.dl_west".into(), field: west, probe_zone: None },
                    BatteryField { name: "plane.dl_north".into(), field: north, probe_zone: None },
                    BatteryField { name: "plane.dl_south".into(), field: south, probe_zone: None },
                    BatteryField { name: "plane.min_east_north".into(), field: min_en, probe_zone: None },
                    BatteryField { name: "plane.tent".into(), field: tent, probe_zone: None },
                ])
            }
            "cylinder" => {
                let up = self.dl(&self.dl_circle_sets("up")?)?;
                let down = self.dl(&self.dl_circle_sets("down")?)?;
                let mut up_shift = up.clone();
                for v in &mut up_shift.values {
                    *v += 0.8;
                }
                let valley = min_combine(&down, &up_shift)?;
                Ok(vec![
                    BatteryField { name: "cylinder.dl_up".into(), field: up, probe_zone: None },
                    BatteryField { name: "cylinder.dl_down".into(), field: down, probe_zone: None },
                    BatteryField { name: "cylinder.valley".into(), field: valley, probe_zone: None },
                ])
            }
            "capped_half_cylinder" => {
                let f = self.dl(&self.dl_circle_sets("up")?)?;
                let mut shifted = f.clone();
                for v in &mut shifted.values {
                    *v += 5.0;
                }
                let same = min_combine(&f, &shifted)?;
                Ok(vec![
                    BatteryField { name: "capped.dl_up".into(), field: f, probe_zone: None },
                    BatteryField { name: "capped.min_shift".into(), field: same, probe_zone: None },
                ])
            }
            "pants" => {
                let (fa, fb, fc) = self.pants_end_fields()?;
                let zone_a = self.pants_zone(|u, v| u <= 1.0 && v <= 1.0);
                let zone_b = self.pants_zone(|u, _| (0.0..=1.0).contains(&u));
                let zone_c = self.pants_zone(|u, v| u >= 0.0 && v <= 1.0);
                let core = self.pants_zone(|u, v| (0.0..=1.0).contains(&u) && v <= 1.0);
                let min_ab = min_combine(&fa, &fb)?;
                let min_abc = min_combine(&min_ab, &fc)?;
                Ok(vec![
                    BatteryField { name: "pants.dl_leg_a".into(), field: fa, probe_zone: Some(zone_a) },
                    BatteryField { name: "pants.dl_leg_b".into(), field: fb, probe_zone: Some(zone_b) },
                    BatteryField { name: "pants.dl_leg_c".into(), field: fc, probe_zone: Some(zone_c) },
                    BatteryField { name: "pants.min_ab".into(), field: min_ab, probe_zone: Some(core.clone()) },
                    BatteryField { name: "pants.min_abc".into(), field: min_abc, probe_zone: Some(core) },
                ])
            }
            other => Err(Error::UnknownScenario(other.into())),
        }
    }

    /// Nodes (both copies) within the coordinate predicate; pants only.
    fn pants_zone(&self, pred: impl Fn(f64, f64) -> bool) -> Vec<NodeId> {
        let m = &self.manifold;
        let mut out = Vec::new();
        for p in 0..m.node_count() as NodeId {
            let (u, v) = m.coords(p);
            if pred(u, v) {
                out.push(p);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Leg cross-circle: the full column (leg A/C) or row (leg B) of both
    /// copies at the given depth into the leg.
    fn pants_leg_circle(&self, end: char, depth: f64) -> Result<NodeSet> {
        let mut nodes = Vec::new();
        for chart in 0..2 {
            match end {
                'a' => {
                    let i = self.i_at(chart, -depth);
                    let j_hi = self.j_at(chart, 1.0);
                    for j in 0..=j_hi {
                        if let Some(p) = self.manifold.node_at(chart, i, j) {
                            nodes.push(p);
                        }
                    }
                }
                'b' => {
                    let j = self.j_at(chart, 1.0 + depth);
                    let (i0, i1) = (self.i_at(chart, 0.0), self.i_at(chart, 1.0));
                    for i in i0..=i1 {
                        if let Some(p) = self.manifold.node_at(chart, i, j) {
                            nodes.push(p);
                        }
                    }
                }
                'c' => {
                    let i = self.i_at(chart, 1.0 + depth);
                    let j_hi = self.j_at(chart, 1.0);
                    for j in 0..=j_hi {
                        if let Some(p) = self.manifold.node_at(chart, i, j) {
                            nodes.push(p);
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        NodeSet::new(nodes)
    }

    fn pants_end_fields(&self) -> Result<(ScalarField, ScalarField, ScalarField)> {
        Ok((
            self.dl(&self.dl_leg_sets("a")?)?,
            self.dl(&self.dl_leg_sets("b")?)?,
            self.dl(&self.dl_leg_sets("c")?)?,
        ))
    }

    /// Canonical rays into each end, traced from the base.
    pub fn rays(&self) -> Result<Vec<(String, Ray)>> {
        let m = &self.manifold;
        let mut out = Vec::new();
        match self.meta.name.as_str() {
            "plane" => {
                let j = self.j_at(0, 0.0);
                let targets: Vec<NodeId> = [0.6, 0.75, 0.85, 0.95]
                    .iter()
                    .map(|&u| m.node_at(0, self.i_at(0, u), j).unwrap())
                    .collect();
                out.push(("plane.ray_east".into(), trace_ray(m, self.base, &targets)?));
                let i = self.i_at(0, 0.0);
                let targets: Vec<NodeId> = [0.6, 0.75, 0.85, 0.95]
                    .iter()
                    .map(|&v| m.node_at(0, i, self.j_at(0, v)).unwrap())
                    .collect();
                out.push(("plane.ray_north".into(), trace_ray(m, self.base, &targets)?));
            }
            "cylinder" => {
                for (label, sign) in [("up", 1.0f64), ("down", -1.0)] {
                    let targets: Vec<NodeId> = [1.0, 1.4, 1.7, 1.9]
                        .iter()
                        .map(|&v| m.node_at(0, 0, self.j_at(0, sign * v)).unwrap())
                        .collect();
                    out.push((format!("cylinder.ray_{label}"), trace_ray(m, self.base, &targets)?));
                }
            }
            "capped_half_cylinder" => {
                let nu = self.grid_info(0).nu;
                for (label, i) in [("near", 0usize), ("far", nu / 2)] {
                    let start = m.node_at(0, i, self.j_at(0, 0.3)).unwrap();
                    let targets: Vec<NodeId> = [1.2, 1.6, 1.9, 2.05]
                        .iter()
                        .map(|&z| m.node_at(0, i, self.j_at(0, z)).unwrap())
                        .collect();
                    out.push((format!("capped.ray_{label}"), trace_ray(m, start, &targets)?));
                }
            }
            "pants" => {
                let j = self.j_at(0, 0.5);
                let targets: Vec<NodeId> = [0.6, 1.0, 1.3, 1.53]
                    .iter()
                    .map(|&s| m.node_at(0, self.i_at(0, -s), j).unwrap())
                    .collect();
                out.push(("pants.ray_a".into(), trace_ray(m, self.base, &targets)?));
                let i = self.i_at(0, 0.5);
                let targets: Vec<NodeId> = [1.6, 2.0, 2.3, 2.53]
                    .iter()
                    .map(|&v| m.node_at(0, i, self.j_at(0, v)).unwrap())
                    .collect();
                out.push(("pants.ray_b".into(), trace_ray(m, self.base, &targets)?));
                let targets: Vec<NodeId> = [1.6, 2.0, 2.3, 2.53]
                    .iter()
                    .map(|&s| m.node_at(0, self.i_at(0, s), j).unwrap())
                    .collect();
                out.push(("pants.ray_c".into(), trace_ray(m, self.base, &targets)?));
            }
            _ => unreachable!(),
        }
        Ok(out)
    }

    /// Boundary-point sample used for clustering and the ends inequality.
    pub fn boundary_sample(&self) -> Result<Vec<BoundaryPoint>> {
        let m = &self.manifold;
        let lip = 1e-6;
        match self.meta.name.as_str() {
            "plane" => {
                let battery = self.battery()?;
                let mut out = Vec::new();
                for bf in battery.into_iter().take(4) {
                    out.push(BoundaryPoint::new(m, bf.field, self.base, &bf.name, lip)?);
                }
                Ok(out)
            }
            "cylinder" => {
                let battery = self.battery()?;
                let mut out = Vec::new();
                for bf in battery.into_iter().take(2) {
                    out.push(BoundaryPoint::new(m, bf.field, self.base, &bf.name, lip)?);
                }
                let nu = self.grid_info(0).nu;
                for (label, sign) in [("horo_up", 1.0f64), ("horo_down", -1.0)] {
                    let seq: Vec<NodeId> = [1.0, 1.4, 1.7, 1.9]
                        .iter()
                        .map(|&v| m.node_at(0, nu / 4, self.j_at(0, sign * v)).unwrap())
                        .collect();
                    let (f, rep) = horofunction(m, &seq, self.base, LimitOptions::default())?;
                    if !rep.converged {
                        return Err(Error::NotConverged(format!("cylinder {label}")));
                    }
                    out.push(BoundaryPoint::new(m, f, self.base, label, lip)?);
                }
                Ok(out)
            }
            "capped_half_cylinder" => {
                let mut out = Vec::new();
                let battery = self.battery()?;
                out.push(BoundaryPoint::new(
                    m,
                    battery.into_iter().next().unwrap().field,
                    self.base,
                    "capped.dl_up",
                    lip,
                )?);
                for (name, ray) in self.rays()? {
                    let (f, rep) = busemann(m, &ray, self.base, LimitOptions::default())?;
                    if !rep.converged {
                        return Err(Error::NotConverged(name));
                    }
                    out.push(BoundaryPoint::new(m, f, self.base, &name, lip)?);
                }
                let nu = self.grid_info(0).nu;
                let seq: Vec<NodeId> = [1.2, 1.6, 1.9, 2.05]
                    .iter()
                    .map(|&z| m.node_at(0, nu / 4, self.j_at(0, z)).unwrap())
                    .collect();
                let (f, rep) = horofunction(m, &seq, self.base, LimitOptions::default())?;
                if !rep.converged {
                    return Err(Error::NotConverged("capped horofunction".into()));
                }
                out.push(BoundaryPoint::new(m, f, self.base, "capped.horo", lip)?);
                Ok(out)
            }
            "pants" => {
                let (fa, fb, fc) = self.pants_end_fields()?;
                Ok(vec![
                    BoundaryPoint::new(m, fa, self.base, "pants.dl_leg_a", lip)?,
                    BoundaryPoint::new(m, fb, self.base, "pants.dl_leg_b", lip)?,
                    BoundaryPoint::new(m, fc, self.base, "pants.dl_leg_c", lip)?,
                ])
            }
            _ => unreachable!(),
        }
    }

    /// Seeded start nodes with a comfortable margin, for coray checks.
    pub fn seeded_starts(&self, seed: u64, count: usize) -> Vec<NodeId> {
        let m = &self.manifold;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let guard = 0.15 * m.window_radius();
        let eligible: Vec<NodeId> = (0..m.node_count() as NodeId)
            .filter(|&p| m.margin()[p as usize] > guard)
            .collect();
        let mut out = Vec::new();
        let mut tries = 0;
        while out.len() < count && tries < 50 * count {
            tries += 1;
            let p = eligible[rng.gen_range(0..eligible.len())];
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }
}

/// Seeded sample of minimal segments with lengths in [lmin, lmax], all of
/// whose nodes lie in the probe zone.
///
/// Segments are straight lattice walks along stencil directions, kept only
/// when their length matches the graph distance (a minimality certificate).
/// Mixed-direction shortest paths are avoided deliberately: they form
/// corridors of equal length whose vertex-at-half-arclength wobbles by
/// O(length) in field value even for exactly linear fields, which would
/// drown the semiconcavity signal in a stencil artifact.
pub fn sample_probe_segments(
    m: &DiscreteManifold,
    zone: Option<&[NodeId]>,
    field: &ScalarField,
    seed: u64,
    want: usize,
    lmin: f64,
    lmax: f64,
) -> Vec<Path> {
    const DIRS: [(i64, i64); 8] =
        [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1), (1, -2)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let guard = 2.0 * m.grid_h();
    let in_zone: Vec<NodeId> = match zone {
        Some(z) => z
            .iter()
            .copied()
            .filter(|&p| field.reliable[p as usize] && m.margin()[p as usize] > guard)
            .collect(),
        None => (0..m.node_count() as NodeId)
            .filter(|&p| field.reliable[p as usize] && m.margin()[p as usize] > guard)
            .collect(),
    };
    if in_zone.is_empty() {
        return Vec::new();
    }
    let zone_flag = {
        let mut f = vec![false; m.node_count()];
        for &p in &in_zone {
            f[p as usize] = true;
        }
        f
    };
    let step = |pos: crate::manifold::GridPos, du: i64, dv: i64| -> Option<NodeId> {
        let info = &m.charts()[pos.chart];
        let mut i = pos.i as i64 + du;
        let mut j = pos.j as i64 + dv;
        if info.periodic_u {
            i = i.rem_euclid(info.nu as i64);
        } else if i < 0 || i >= info.nu as i64 {
            return None;
        }
        if info.periodic_v {
            j = j.rem_euclid(info.nv as i64);
        } else if j < 0 || j >= info.nv as i64 {
            return None;
        }
        m.node_at(pos.chart, i as usize, j as usize)
    };

    let mut out: Vec<Path> = Vec::new();
    let mut attempts = 0;
    while out.len() < want && attempts < 6 * want {
        attempts += 1;
        let a = in_zone[rng.gen_range(0..in_zone.len())];
        let Some(start) = m.grid_pos(a) else { continue };
        let dist = dijkstra_from(m, a);
        for &(du, dv) in &DIRS {
            if out.len() >= want {
                break;
            }
            let mut nodes = vec![a];
            let mut cumlen = vec![0.0];
            let mut pos = start;
            while *cumlen.last().unwrap() < lmax {
                let Some(q) = step(pos, du, dv) else { break };
                if !zone_flag[q as usize] {
                    break;
                }
                let Some(len) = m.edge_len(*nodes.last().unwrap(), q) else { break };
                cumlen.push(cumlen.last().unwrap() + len);
                nodes.push(q);
                pos = m.grid_pos(q).unwrap();
            }
            // longest prefix in [lmin, lmax] that realizes the graph distance
            let mut end = None;
            for k in (2..nodes.len()).rev() {
                if cumlen[k] < lmin || cumlen[k] > lmax {
                    continue;
                }
                if (cumlen[k] - dist[nodes[k] as usize]).abs() <= 1e-9 {
                    end = Some(k);
                    break;
                }
            }
            if let Some(k) = end {
                out.push(Path { nodes: nodes[..=k].to_vec(), cumlen: cumlen[..=k].to_vec() });
            }
        }
    }
    out
}

/// Largest sublevel depth to which a field's escaping branches remain inside
/// the certified region: the minimum of −f over "descending horizon" nodes
/// (reliable nodes at the edge of the certificate whose field keeps
/// descending outward). Sublevels deeper than this lose a branch to the
/// truncation and the reconstruction identity stops being testable.
pub fn field_escape_depth(m: &DiscreteManifold, f: &ScalarField) -> f64 {
    let mut depth = f64::INFINITY;
    for p in f.reliable_nodes() {
        if f.values[p as usize] >= 0.0 {
            continue;
        }
        for (q, len) in m.neighbors(p) {
            if !f.reliable[q as usize]
                && (f.values[p as usize] - f.values[q as usize]) / len >= 0.5
            {
                depth = depth.min(-f.values[p as usize]);
                break;
            }
        }
    }
    if depth.is_finite() {
        depth
    } else {
        f.reliable_nodes().map(|p| -f.values[p as usize]).fold(0.0f64, f64::max)
    }
}

/// Theorem 1 battery: residual, semiconcavity, reconstruction and level-set
/// identity for every battery field, plus the convex-kink controls on the
/// plane.
pub fn verify_theorem1(sc: &BuiltScenario, seed: u64) -> Result<Report> {
    let m = &sc.manifold;
    let mut report = Report::new(&format!("theorem1.{}", sc.meta.name));
    let battery = sc.battery()?;
    let wr = m.window_radius();
    let h = sc.h;
    let (lmin, lmax) = (0.2 * wr, 0.45 * wr);

    for bf in &battery {
        let res = eikonal_residual(m, &bf.field, GRAD_TOL);
        let mut residual_detail = format!("frac_regular={:.4}", res.frac_regular);
        if !res.offending_nodes.is_empty() {
            let ids: Vec<String> =
                res.offending_nodes.iter().take(8).map(|p| p.to_string()).collect();
            residual_detail.push_str(&format!(" offending_nodes={}", ids.join(",")));
        }
        report.add_detailed(
            &format!("{}.residual", bf.name),
            res.pass(RESIDUAL_TOL),
            res.max_abs_dev,
            RESIDUAL_TOL,
            &residual_detail,
        );

        let segs = sample_probe_segments(m, bf.probe_zone.as_deref(), &bf.field, seed, 24, lmin, lmax);
        let sem = semiconcavity_probe(m, &bf.field, &segs);
        report.add_detailed(
            &format!("{}.semiconcavity", bf.name),
            sem.worst_c <= SEMICONCAVITY_CAP && sem.segments_probed >= 8,
            sem.worst_c,
            SEMICONCAVITY_CAP,
            &format!("segments={}", sem.segments_probed),
        );

        // reconstruction on a doubling schedule of sublevel depths, kept
        // within the field's escape depth so no branch is lost to truncation
        let depth = field_escape_depth(m, &bf.field);
        let schedule = [0.2 * depth, 0.4 * depth, 0.8 * depth];
        let mut devs = Vec::new();
        for &n in &schedule {
            let (_, dev) = levelset_reconstruct(m, &bf.field, sc.base, n)?;
            devs.push(dev);
        }
        let tol = reconstruction_tol(wr, h);
        let monotone = devs.windows(2).all(|w| w[1] <= w[0] + 1e-9);
        let worst = devs.iter().cloned().fold(0.0f64, f64::max);
        report.add_detailed(
            &format!("{}.reconstruction", bf.name),
            worst <= tol && monotone,
            worst,
            tol,
            &format!("devs={devs:?} monotone={monotone}"),
        );

        // level-set distance identity on three pairs within the escape depth
        let pairs = [
            (-0.15 * depth, -0.5 * depth),
            (-0.1 * depth, -0.4 * depth),
            (-0.25 * depth, -0.6 * depth),
        ];
        let mut worst_ratio = 0.0f64;
        let mut ok = true;
        for &(a1, a2) in &pairs {
            if a1 - a2 < 4.0 * h {
                continue;
            }
            let dev = levelset_distance_check(m, &bf.field, a1, a2)?;
            let tol = levelset_check_tol(a1, a2, h);
            if dev > tol {
                ok = false;
            }
            worst_ratio = worst_ratio.max(dev / tol);
        }
        report.add(&format!("{}.levelset_identity", bf.name), ok, worst_ratio, 1.0);
    }

    if sc.meta.name == "plane" {
        // convex-kink controls
        let control = ScalarField::from_fn(m, |u, _| u.abs());
        let n = (2.0 / h).round() as usize + 1;
        let mid = n / 2;
        let mut segs = Vec::new();
        for j in [n / 4, n / 2, 3 * n / 4] {
            let a = m.node_at(0, mid - 2, j).unwrap();
            let b = m.node_at(0, mid + 2, j).unwrap();
            segs.push(crate::geodesics::minimal_segment(m, a, b)?);
        }
        let sem = semiconcavity_probe(m, &control, &segs);
        let floor = 1.0 / (2.0 * h);
        report.add_detailed(
            "control.convex_kink_semiconcavity",
            sem.worst_c >= floor * (1.0 - 1e-12),
            sem.worst_c,
            floor,
            "pass means the control exceeds the floor",
        );

        let mut rejected = true;
        for frac in [0.15, 0.3, 0.6] {
            match levelset_reconstruct(m, &control, sc.base, frac * wr) {
                Err(Error::EmptySublevel { .. }) => {}
                _ => rejected = false,
            }
        }
        report.add_detailed(
            "control.convex_kink_reconstruction",
            rejected,
            f64::INFINITY,
            0.5,
            "sublevels cannot recede; reconstruction deviation unbounded at every n",
        );

        let linear = ScalarField::from_fn(m, |u, _| -u);
        let s = singular_set(m, &linear);
        report.add("control.linear_singular_empty", s.is_empty(), s.nodes.len() as f64, 0.0);
    }
    Ok(report)
}

/// Closed-form Busemann comparison on the plane: for rays along 0°, 45° and
/// 90°, the fast-marching Busemann limit must match −⟨x, e_θ⟩ within 1% of
/// the window radius on its certified region.
///
/// The fast-marching backend is used deliberately: the 16-neighbour graph
/// metric is a polyhedral gauge whose Busemann limits carry an O(1)
/// anisotropy crease (for the axis direction, −u + (√5−2)|v| exactly), so no
/// resolution makes the graph backend meet a 1% continuum tolerance. The
/// first-order fast-marching solution converges to the Euclidean cone and
/// does.
pub fn verify_closed_form_busemann(sc: &BuiltScenario) -> Result<Report> {
    if sc.meta.name != "plane" {
        return Err(Error::Config("closed-form busemann runs on the plane scenario".into()));
    }
    let m = &sc.manifold;
    let mut report = Report::new("closed_form_busemann.plane");
    let h = sc.h;
    let opts = LimitOptions {
        backend: crate::limits::Backend::FastMarch { exact_init_radius: 16.0 * h },
        limit_tol: Some(2e-3 * m.window_radius()),
    };
    let j0 = self_mid(sc);
    let dirs: [(&str, i64, i64); 3] = [("0deg", 1, 0), ("45deg", 1, 1), ("90deg", 0, 1)];
    for (label, du, dv) in dirs {
        let norm = ((du * du + dv * dv) as f64).sqrt();
        let (du_n, dv_n) = (du as f64 / norm, dv as f64 / norm);
        let step = h * norm;
        let targets: Vec<NodeId> = [0.45, 0.6, 0.75, 0.9]
            .iter()
            .map(|&t| {
                let k = (t / step).round() as i64;
                let i = (j0 as i64 + k * du) as usize;
                let j = (j0 as i64 + k * dv) as usize;
                m.node_at(0, i, j).unwrap()
            })
            .collect();
        let ray = trace_ray(m, sc.base, &targets)?;
        let (f, rep) = busemann(m, &ray, sc.base, opts)?;
        if !rep.converged {
            report.add(&format!("{label}.converged"), false, rep.sup_change_last, 2e-3);
            continue;
        }
        let mut worst = 0.0f64;
        let mut count = 0usize;
        for p in f.reliable_nodes() {
            let (u, v) = m.coords(p);
            let expect = -(u * du_n + v * dv_n);
            worst = worst.max((f.values[p as usize] - expect).abs());
            count += 1;
        }
        report.add_detailed(
            &format!("{label}.max_error"),
            worst <= 0.01 * m.window_radius() && count >= 50,
            worst,
            0.01 * m.window_radius(),
            &format!("certified_nodes={count} reliable_radius={:.4}", rep.reliable_radius),
        );
    }
    Ok(report)
}

fn self_mid(sc: &BuiltScenario) -> usize {
    let pos = sc.manifold.grid_pos(sc.base).unwrap();
    pos.i
}

/// Min-stability: seeded battery pairs combine into fields that still pass
/// the residual check; min is exactly idempotent, commutative, associative.
pub fn verify_min_stability(sc: &BuiltScenario, seed: u64) -> Result<Report> {
    let m = &sc.manifold;
    let mut report = Report::new(&format!("min_stability.{}", sc.meta.name));
    let battery = sc.battery()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..5 {
        let i = rng.gen_range(0..battery.len());
        let j = rng.gen_range(0..battery.len());
        let combined = min_combine(&battery[i].field, &battery[j].field)?;
        let res = eikonal_residual(m, &combined, GRAD_TOL);
        report.add_detailed(
            &format!("pair{k}.residual"),
            res.pass(RESIDUAL_TOL),
            res.max_abs_dev,
            RESIDUAL_TOL,
            &format!("{} ^ {}", battery[i].name, battery[j].name),
        );

        // exact pointwise algebra
        let idem = min_combine(&battery[i].field, &battery[i].field)?;
        let comm = min_combine(&battery[j].field, &battery[i].field)?;
        let exact = idem.values == battery[i].field.values && comm.values == combined.values;
        let l = rng.gen_range(0..battery.len());
        let ab_c = min_combine(&combined, &battery[l].field)?;
        let bc = min_combine(&battery[j].field, &battery[l].field)?;
        let a_bc = min_combine(&battery[i].field, &bc)?;
        let assoc = ab_c.values == a_bc.values;
        report.add(&format!("pair{k}.algebra_exact"), exact && assoc, 0.0, 0.0);
    }
    Ok(report)
}

/// Metric suite: ρ axioms on sampled triples, ρ~ shift invariance,
/// ρ~ ≤ ρ, symmetry to machine precision.
pub fn verify_metric(sc: &BuiltScenario) -> Result<Report> {
    let mut report = Report::new(&format!("metric.{}", sc.meta.name));
    let e = sc.exhaustion()?;
    let battery = sc.battery()?;
    let mut fields: Vec<ScalarField> = battery.into_iter().map(|b| b.field).collect();
    // enrich with shifts so triples exercise saturation
    let mut extra = fields[0].clone();
    for v in &mut extra.values {
        *v += 2.0;
    }
    fields.push(extra);

    let mut sym_worst = 0.0f64;
    let mut tri_worst = f64::NEG_INFINITY;
    let mut triples = 0;
    for i in 0..fields.len() {
        for j in i + 1..fields.len() {
            let ij = rho(&fields[i], &fields[j], &e)?.value;
            let ji = rho(&fields[j], &fields[i], &e)?.value;
            sym_worst = sym_worst.max((ij - ji).abs());
            for k in 0..fields.len() {
                if k == i || k == j || triples >= 20 {
                    continue;
                }
                triples += 1;
                let ik = rho(&fields[i], &fields[k], &e)?.value;
                let kj = rho(&fields[k], &fields[j], &e)?.value;
                tri_worst = tri_worst.max(ij - (ik + kj));
            }
        }
    }
    report.add("rho.symmetry", sym_worst <= 1e-12, sym_worst, 1e-12);
    report.add_detailed(
        "rho.triangle",
        tri_worst <= 1e-12,
        tri_worst,
        1e-12,
        &format!("triples={triples}"),
    );

    let mut shift_worst = 0.0f64;
    let mut bound_ok = true;
    for i in 0..fields.len().min(4) {
        for j in (i + 1)..fields.len().min(4) {
            let q0 = rho_quotient(&fields[i], &fields[j], &e)?.value;
            let mut shifted = fields[i].clone();
            for v in &mut shifted.values {
                *v += 5.5;
            }
            let q1 = rho_quotient(&shifted, &fields[j], &e)?.value;
            shift_worst = shift_worst.max((q1 - q0).abs());
            if q0 > rho(&fields[i], &fields[j], &e)?.value + 1e-15 {
                bound_ok = false;
            }
        }
    }
    report.add("rho_quotient.shift_invariance", shift_worst <= SHIFT_TOL, shift_worst, SHIFT_TOL);
    report.add("rho_quotient.bounded_by_rho", bound_ok, 0.0, 0.0);
    Ok(report)
}

/// Theorem 2 path on the cylinder: min{u+t, v} interpolates between the two
/// end classes, 1-Lipschitz in t under ρ~, with every sample a solution.
pub fn verify_theorem2_path(sc: &BuiltScenario) -> Result<Report> {
    if sc.meta.name != "cylinder" {
        return Err(Error::Config("theorem2 path runs on the cylinder scenario".into()));
    }
    let m = &sc.manifold;
    let mut report = Report::new("theorem2.cylinder");
    let e = sc.exhaustion()?;
    let battery = sc.battery()?;
    let up = &battery[0].field; // ≈ -(v - v0)
    let down = &battery[1].field; // ≈ +(v - v0)

    // u = down-field, v = up-field: sup|v - u| on the largest ball sets the
    // saturation times.
    let probe = connect_path(m, down, up, &[0.0], &e)?;
    let (t_lo, t_hi) = (probe.t_lo, probe.t_hi);
    let mut ts = Vec::new();
    let steps = 8;
    for k in 0..=steps {
        ts.push(t_lo - 0.2 + (t_hi - t_lo + 0.4) * k as f64 / steps as f64);
    }
    let path = connect_path(m, down, up, &ts, &e)?;

    let mut lip_worst = 0.0f64;
    for i in 0..path.fields.len() {
        for j in i + 1..path.fields.len() {
            let d = rho_quotient(&path.fields[i], &path.fields[j], &e)?.value;
            let gap = (path.ts[i] - path.ts[j]).abs();
            lip_worst = lip_worst.max(d - gap);
        }
    }
    report.add("path.lipschitz_in_t", lip_worst <= 1e-9, lip_worst, 1e-9);

    let d_hi = rho_quotient(path.fields.last().unwrap(), up, &e)?.value;
    let d_lo = rho_quotient(&path.fields[0], down, &e)?.value;
    report.add("path.endpoint_hi", d_hi <= PATH_TOL, d_hi, PATH_TOL);
    report.add("path.endpoint_lo", d_lo <= PATH_TOL, d_lo, PATH_TOL);

    let mut res_worst = 0.0f64;
    for f in &path.fields {
        let r = eikonal_residual(m, f, GRAD_TOL);
        res_worst = res_worst.max(r.max_abs_dev);
    }
    report.add("path.residuals", res_worst <= RESIDUAL_TOL, res_worst, RESIDUAL_TOL);

    // the interior samples carry a moving ridge
    let midfield = &path.fields[path.fields.len() / 2];
    let ridge = singular_set(m, midfield);
    report.add("path.ridge_present", !ridge.is_empty(), ridge.nodes.len() as f64, 1.0);
    Ok(report)
}

/// Theorem 3 on the capped half-cylinder: one cluster, maxima deep inside
/// the cap, singular sets at the maxima.
pub fn verify_theorem3(sc: &BuiltScenario) -> Result<Report> {
    if sc.meta.name != "capped_half_cylinder" {
        return Err(Error::Config("theorem3 runs on the capped half-cylinder".into()));
    }
    let m = &sc.manifold;
    let mut report = Report::new("theorem3.capped_half_cylinder");
    let e = sc.exhaustion()?;
    let sample = sc.boundary_sample()?;
    let clusters = cluster_boundary(&sample, &e, sc.meta.eps)?;
    report.add_detailed(
        "single_cluster",
        clusters.count() == 1,
        clusters.count() as f64,
        1.0,
        &format!("points={}", sample.len()),
    );

    let wr = m.window_radius();
    let mut min_margin_ratio = f64::INFINITY;
    let mut singular_near_all = true;
    let mut max_gap = 0.0f64;
    for bp in &sample {
        let f = &bp.rep;
        let argmax = f
            .reliable_nodes()
            .max_by(|&a, &b| {
                f.values[a as usize]
                    .partial_cmp(&f.values[b as usize])
                    .unwrap()
                    .then(b.cmp(&a))
            })
            .unwrap();
        min_margin_ratio = min_margin_ratio.min(m.margin()[argmax as usize] / wr);
        let s = singular_set(m, f);
        if s.is_empty() {
            singular_near_all = false;
            continue;
        }
        let d = dijkstra_from(m, argmax);
        let gap = s.nodes.iter().map(|&p| d[p as usize]).fold(f64::INFINITY, f64::min);
        max_gap = max_gap.max(gap);
        if gap > 0.15 * wr {
            singular_near_all = false;
        }
    }
    report.add("argmax_margin", min_margin_ratio >= 0.5, min_margin_ratio, 0.5);
    report.add_detailed(
        "singular_near_argmax",
        singular_near_all,
        max_gap,
        0.15 * wr,
        "max over fields of the argmax-to-singular-set distance",
    );
    Ok(report)
}

/// Theorem 4 on the pants: coray cofinality into each end, nonempty singular
/// sets across the min-closure family, ends ≤ clusters.
pub fn verify_theorem4(sc: &BuiltScenario, seed: u64) -> Result<Report> {
    if sc.meta.name != "pants" {
        return Err(Error::Config("theorem4 runs on the pants scenario".into()));
    }
    let m = &sc.manifold;
    let mut report = Report::new("theorem4.pants");
    let ends = sc.ends()?;
    report.add(
        "ends_count",
        ends.stabilized_count == Some(3),
        ends.counts.last().map(|&c| c as f64).unwrap_or(0.0),
        3.0,
    );

    let starts = sc.seeded_starts(seed, 8);
    for (name, ray) in sc.rays()? {
        let rep = verify_coray_cofinality(m, &ray, &starts, &ends)?;
        report.add_detailed(
            &format!("{name}.corays_cofinal"),
            rep.pass(),
            rep.violations.len() as f64,
            0.0,
            &rep.to_text().replace('\n', " "),
        );
    }

    // min-closure family: 3 end fields, pairwise mins across 5 shifts, and
    // the triple min
    let (fa, fb, fc) = sc.pants_end_fields()?;
    let mut family: Vec<(String, ScalarField)> = vec![
        ("f_a".into(), fa.clone()),
        ("f_b".into(), fb.clone()),
        ("f_c".into(), fc.clone()),
    ];
    let shifts = [-0.3, -0.15, 0.0, 0.15, 0.3];
    for (na, nb, x, y) in [("a", "b", &fa, &fb), ("a", "c", &fa, &fc), ("b", "c", &fb, &fc)] {
        for &s in &shifts {
            let mut shifted = x.clone();
            for v in &mut shifted.values {
                *v += s;
            }
            family.push((format!("min_{na}{nb}_shift{s}"), min_combine(&shifted, y)?));
        }
    }
    let m_ab = min_combine(&fa, &fb)?;
    family.push(("min_abc".into(), min_combine(&m_ab, &fc)?));

    let mut min_size = usize::MAX;
    let mut all_nonempty = true;
    for (name, f) in &family {
        let s = singular_set(m, f);
        min_size = min_size.min(s.nodes.len());
        if s.is_empty() {
            all_nonempty = false;
            report.note(&format!("empty singular set: {name}"));
        }
    }
    report.add_detailed(
        "family_singular_nonempty",
        all_nonempty,
        min_size as f64,
        1.0,
        &format!("family_size={}", family.len()),
    );

    let e = sc.exhaustion()?;
    let sample = sc.boundary_sample()?;
    let ineq = crate::ends::verify_ends_inequality(&ends, &sample, &e, sc.meta.eps)?;
    report.add_detailed(
        "ends_leq_clusters",
        ineq.pass(),
        ineq.clusters as f64,
        ineq.ends as f64,
        "pass means ends <= clusters",
    );
    Ok(report)
}

/// End partition matches the construction, and ends ≤ boundary clusters.
pub fn verify_ends(sc: &BuiltScenario) -> Result<Report> {
    let mut report = Report::new(&format!("ends.{}", sc.meta.name));
    let ends = sc.ends()?;
    report.add_detailed(
        "stabilized_count",
        ends.stabilized_count == Some(sc.meta.known_ends),
        ends.counts.last().map(|&c| c as f64).unwrap_or(0.0),
        sc.meta.known_ends as f64,
        &format!("counts={:?}", ends.counts),
    );
    let e = sc.exhaustion()?;
    let sample = sc.boundary_sample()?;
    let ineq = crate::ends::verify_ends_inequality(&ends, &sample, &e, sc.meta.eps)?;
    report.add_detailed(
        "ends_leq_clusters",
        ineq.pass(),
        ineq.clusters as f64,
        ineq.ends as f64,
        &format!("clusters={} ends={}", ineq.clusters, ineq.ends),
    );
    report.add(
        "clusters_match_construction",
        ineq.clusters == sc.meta.known_minfty_lower_bound,
        ineq.clusters as f64,
        sc.meta.known_minfty_lower_bound as f64,
    );
    Ok(report)
}

/// Coray cofinality across all scenario rays (Theorem 4.1 / Prop. 6.2).
pub fn verify_corays(sc: &BuiltScenario, seed: u64) -> Result<Report> {
    let m = &sc.manifold;
    let mut report = Report::new(&format!("corays.{}", sc.meta.name));
    let ends = sc.ends()?;
    let starts = sc.seeded_starts(seed, 8);
    for (name, ray) in sc.rays()? {
        let rep = verify_coray_cofinality(m, &ray, &starts, &ends)?;
        report.add_detailed(
            &format!("{name}.cofinal"),
            rep.pass(),
            rep.violations.len() as f64,
            0.0,
            &format!(
                "starts={} corays={} multiplicity={}",
                rep.starts_tested, rep.corays_tested, rep.multiplicity_seen
            ),
        );
    }
    Ok(report)
}
