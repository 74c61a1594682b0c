//! Busemann functions, horofunctions and distance-like functions as
//! certified limits of normalized distance fields.
//!
//! Each construction runs a geometric iterate schedule (targets doubling
//! toward the window edge), keeps the intersection of the iterates'
//! truncation-reliable regions, and certifies convergence pointwise: a node
//! enters the output's reliable region only where the last two iterates
//! agree within the limit tolerance. The compact-open convergence of the
//! continuum limits becomes sup-convergence on that certified region.

use crate::eikonal::{distance_to_set, FieldSource, ScalarField};
use crate::error::{Error, Result};
use crate::fmm::{fast_march_with, FmmOptions};
use crate::geodesics::Ray;
use crate::manifold::{dijkstra_from, DiscreteManifold, NodeId, NodeSet};

/// Certificate attached to every limit construction.
#[derive(Debug, Clone)]
pub struct LimitReport {
    pub iterates_used: usize,
    pub sup_change_last: f64,
    pub reliable_radius: f64,
    pub converged: bool,
}

impl LimitReport {
    /// key = value dump, one line per field.
    pub fn to_text(&self) -> String {
        format!(
            "iterates_used = {}\nsup_change_last = {:.6e}\nreliable_radius = {:.6}\nconverged = {}\n",
            self.iterates_used, self.sup_change_last, self.reliable_radius, self.converged
        )
    }
}

/// Distance backend for the limit constructions. The graph backend is exact
/// on the graph metric space; the fast-marching backend is used for
/// continuum closed-form comparisons on single grid charts.
#[derive(Debug, Clone, Copy)]
pub enum Backend {
    Graph,
    FastMarch { exact_init_radius: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct LimitOptions {
    pub backend: Backend,
    /// Absolute settle tolerance; defaults to
    /// [`crate::tol::LIMIT_TOL_FRACTION`] × window radius when None.
    pub limit_tol: Option<f64>,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions { backend: Backend::Graph, limit_tol: None }
    }
}

fn solve(m: &DiscreteManifold, k: &NodeSet, backend: Backend) -> Result<crate::eikonal::DistanceField> {
    match backend {
        Backend::Graph => distance_to_set(m, k),
        Backend::FastMarch { exact_init_radius } => {
            fast_march_with(m, k, FmmOptions { exact_init_radius })
        }
    }
}

/// Shared limit driver: iterates are (offset, source set) pairs; the k-th
/// normalized iterate is d(·, K_k) − offset_k.
fn certified_limit(
    m: &DiscreteManifold,
    schedule: &[(f64, NodeSet)],
    x0: NodeId,
    source: FieldSource,
    opts: LimitOptions,
) -> Result<(ScalarField, LimitReport)> {
    assert!(schedule.len() >= 2, "limit needs at least two iterates");
    let limit_tol = opts
        .limit_tol
        .unwrap_or(crate::tol::LIMIT_TOL_FRACTION * m.window_radius());

    let n = m.node_count();
    let mut joint_reliable = vec![true; n];
    let mut prev: Option<Vec<f64>> = None;
    let mut last: Option<Vec<f64>> = None;
    for (offset, k) in schedule {
        let df = solve(m, k, opts.backend)?;
        let vals: Vec<f64> = df.values.iter().map(|v| v - offset).collect();
        for (r, &ok) in joint_reliable.iter_mut().zip(&df.reliable) {
            *r &= ok;
        }
        prev = last.take();
        last = Some(vals);
    }
    let prev = prev.unwrap();
    let last = last.unwrap();

    // Pointwise settling: reliable output nodes are joint-reliable nodes
    // where the last doubling step moved the value by at most limit_tol.
    let mut reliable = vec![false; n];
    let mut sup_change: f64 = 0.0;
    for p in 0..n {
        if !joint_reliable[p] {
            continue;
        }
        let change = (last[p] - prev[p]).abs();
        if change <= limit_tol {
            reliable[p] = true;
            sup_change = sup_change.max(change);
        }
    }
    let converged = reliable[x0 as usize];

    // Radius of the settled ball around the base node.
    let d0 = dijkstra_from(m, x0);
    let mut reliable_radius = f64::INFINITY;
    for p in 0..n {
        if !reliable[p] {
            reliable_radius = reliable_radius.min(d0[p]);
        }
    }
    if reliable_radius.is_infinite() {
        reliable_radius = m.window_radius();
    }

    let mut field = ScalarField { values: last, reliable, source, base_node: None };
    field.normalize_at(x0);
    Ok((
        field,
        LimitReport { iterates_used: schedule.len(), sup_change_last: sup_change, reliable_radius, converged },
    ))
}

/// Doubling fractions of the span used by all limit schedules.
const SCHEDULE: [f64; 4] = [0.125, 0.25, 0.5, 1.0];

/// Busemann function of a certified ray: limit of d(·, γ(t)) − t over
/// doubling t within the certified span, normalized to 0 at `x0`.
pub fn busemann(
    m: &DiscreteManifold,
    gamma: &Ray,
    x0: NodeId,
    opts: LimitOptions,
) -> Result<(ScalarField, LimitReport)> {
    let span = gamma.certified_span;
    let mut schedule = Vec::new();
    for f in SCHEDULE {
        let (node, t) = gamma.snap(f * span);
        schedule.push((t, NodeSet::singleton(node)));
    }
    schedule.dedup_by(|a, b| a.1 == b.1);
    if schedule.len() < 2 {
        return Err(Error::SpanTooShort { have: span, need: 4.0 * m.grid_h() });
    }
    certified_limit(m, &schedule, x0, FieldSource::Busemann, opts)
}

/// Horofunction of an escaping point sequence: limit of
/// d(·, x_k) − d(x0, x_k).
pub fn horofunction(
    m: &DiscreteManifold,
    seq: &[NodeId],
    x0: NodeId,
    opts: LimitOptions,
) -> Result<(ScalarField, LimitReport)> {
    let sets: Vec<NodeSet> = seq.iter().map(|&p| NodeSet::singleton(p)).collect();
    dl_function(m, &sets, x0, opts)
}

/// Distance-like function of an escaping set sequence: limit of
/// d(·, K_k) − d(x0, K_k). Horofunctions are the singleton case.
pub fn dl_function(
    m: &DiscreteManifold,
    sets: &[NodeSet],
    x0: NodeId,
    opts: LimitOptions,
) -> Result<(ScalarField, LimitReport)> {
    if sets.len() < 2 {
        return Err(Error::NotEscaping);
    }
    // Escape precondition: d(x0, K_k) strictly increasing and reaching a
    // fixed fraction of the window radius.
    let mut schedule = Vec::new();
    let mut prev_d = -1.0f64;
    for k in sets {
        let df = solve(m, k, opts.backend)?;
        let d0 = df.values[x0 as usize];
        if d0 <= prev_d {
            return Err(Error::NotEscaping);
        }
        prev_d = d0;
        schedule.push((d0, k.clone()));
    }
    let wr = m.window_radius();
    if wr.is_finite() && prev_d < 0.5 * wr {
        return Err(Error::NotEscaping);
    }
    let source = if sets.iter().all(|k| k.len() == 1) {
        FieldSource::Horofunction
    } else {
        FieldSource::DistanceLike
    };
    certified_limit(m, &schedule, x0, source, opts)
}

/// Busemann monotonicity audit: b_{t'} ≤ b_t + slack pointwise on the nodes
/// where both iterates are defined. Returns the worst violation.
pub fn busemann_monotonicity_violation(
    m: &DiscreteManifold,
    gamma: &Ray,
    nodes: &[NodeId],
) -> f64 {
    let span = gamma.certified_span;
    let (n1, t1) = gamma.snap(0.5 * span);
    let (n2, t2) = gamma.snap(span);
    let d1 = dijkstra_from(m, n1);
    let d2 = dijkstra_from(m, n2);
    let mut worst = 0.0f64;
    for &p in nodes {
        let b1 = d1[p as usize] - t1;
        let b2 = d2[p as usize] - t2;
        worst = worst.max(b2 - b1);
    }
    worst
}
