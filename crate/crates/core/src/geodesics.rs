//! Minimal segments, rays, corays and lines on the discrete manifold.
//!
//! On the graph backend a backtracked shortest path realizes the graph
//! distance exactly, and every subpath of a shortest path is again shortest,
//! so rays certify their distance-realization property up to float rounding.
//! Limits (`trace_ray`, `coray`) are taken as stabilized prefixes: the part
//! of the path that stops changing as the targets escape.

use crate::eikonal::distance_with_pred;
#[cfg(test)]
use crate::eikonal::pairwise_distance;
use crate::error::{Error, Result};
use crate::manifold::{DiscreteManifold, NodeId, NodeSet};
use crate::tol::RAY_TOL_PER_SPAN;

/// Node polyline with cumulative arclength.
#[derive(Debug, Clone)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub cumlen: Vec<f64>,
}

impl Path {
    pub fn length(&self) -> f64 {
        *self.cumlen.last().unwrap_or(&0.0)
    }

    /// Vertex closest to the given arclength.
    pub fn node_at(&self, t: f64) -> NodeId {
        let mut best = 0usize;
        let mut gap = f64::INFINITY;
        for (k, &c) in self.cumlen.iter().enumerate() {
            let g = (c - t).abs();
            if g < gap {
                gap = g;
                best = k;
            }
        }
        self.nodes[best]
    }

    /// Vertex index closest to the given arclength.
    pub fn index_at(&self, t: f64) -> usize {
        let mut best = 0usize;
        let mut gap = f64::INFINITY;
        for (k, &c) in self.cumlen.iter().enumerate() {
            let g = (c - t).abs();
            if g < gap {
                gap = g;
                best = k;
            }
        }
        best
    }

    pub fn prefix(&self, upto: usize) -> Path {
        Path { nodes: self.nodes[..=upto].to_vec(), cumlen: self.cumlen[..=upto].to_vec() }
    }

    /// CSV export: node_id, u, v, cumlen.
    pub fn to_csv(&self, m: &DiscreteManifold) -> String {
        let mut s = String::from("node_id,u,v,cumlen\n");
        for (k, &p) in self.nodes.iter().enumerate() {
            let (u, v) = m.coords(p);
            s.push_str(&format!("{},{:.9},{:.9},{:.12}\n", p, u, v, self.cumlen[k]));
        }
        s
    }
}

/// A path whose prefix of length `certified_span` satisfies the
/// distance-realization property within `ray_tol`.
#[derive(Debug, Clone)]
pub struct Ray {
    pub path: Path,
    pub certified_span: f64,
    pub ray_tol: f64,
}

impl Ray {
    pub fn origin(&self) -> NodeId {
        self.path.nodes[0]
    }

    /// Node at arclength `t` along the ray (t clamped to the certified span).
    pub fn node_at(&self, t: f64) -> NodeId {
        self.path.node_at(t.min(self.certified_span))
    }

    /// Arclength of the vertex nearest to `t` within the certified span.
    pub fn snap(&self, t: f64) -> (NodeId, f64) {
        let idx = self.path.index_at(t.min(self.certified_span));
        (self.path.nodes[idx], self.path.cumlen[idx])
    }

    /// Nodes of the certified prefix with cumlen beyond the given radius
    /// of distance from the ray origin (tail sampling for end checks).
    pub fn tail_nodes(&self, beyond: f64) -> Vec<NodeId> {
        self.path
            .nodes
            .iter()
            .zip(&self.path.cumlen)
            .filter(|&(_, &c)| c > beyond && c <= self.certified_span)
            .map(|(&p, _)| p)
            .collect()
    }
}

fn backtrack(pred: &[i64], dist: &[f64], m: &DiscreteManifold, x: NodeId, y: NodeId) -> Path {
    let mut rev = vec![y];
    let mut cur = y;
    while cur != x {
        let p = pred[cur as usize];
        debug_assert!(p >= 0, "backtrack hit an unreached node");
        cur = p as NodeId;
        rev.push(cur);
    }
    rev.reverse();
    let mut cumlen = Vec::with_capacity(rev.len());
    let mut acc = 0.0;
    cumlen.push(0.0);
    for w in rev.windows(2) {
        let len = m.edge_len(w[0], w[1]).expect("consecutive path nodes must be adjacent");
        acc += len;
        cumlen.push(acc);
    }
    debug_assert!((acc - dist[y as usize]).abs() < 1e-9);
    Path { nodes: rev, cumlen }
}

/// Shortest path from x to y; its length equals the graph distance exactly.
pub fn minimal_segment(m: &DiscreteManifold, x: NodeId, y: NodeId) -> Result<Path> {
    if x == y {
        return Err(Error::Config("minimal_segment requires x != y".into()));
    }
    let (dist, pred) = distance_with_pred(m, &NodeSet::singleton(x))?;
    if dist[y as usize].is_infinite() {
        return Err(Error::Disconnected { components: 2 });
    }
    Ok(backtrack(&pred, &dist, m, x, y))
}

/// Cheap upper bound on the distance between two nodes, for uniform-
/// convergence checks: exact for equal nodes and edges, metric-norm of the
/// coordinate gap on a shared chart (periodic wrap respected), two-hop
/// bound otherwise.
fn node_proximity_upper(m: &DiscreteManifold, p: NodeId, q: NodeId) -> f64 {
    if p == q {
        return 0.0;
    }
    if let Some(len) = m.edge_len(p, q) {
        return len;
    }
    if let (Some(a), Some(b)) = (m.grid_pos(p), m.grid_pos(q)) {
        if a.chart == b.chart {
            let info = &m.charts()[a.chart];
            let mut du = (b.i as f64 - a.i as f64) * info.hu;
            if info.periodic_u {
                let l = info.nu as f64 * info.hu;
                du = du - (du / l).round() * l;
            }
            let mut dv = (b.j as f64 - a.j as f64) * info.hv;
            if info.periodic_v {
                let l = info.nv as f64 * info.hv;
                dv = dv - (dv / l).round() * l;
            }
            return m.metric_at(p).norm(du, dv);
        }
    }
    // two-hop bound across seams
    let mut best = f64::INFINITY;
    for (r, l1) in m.neighbors(p) {
        if let Some(l2) = m.edge_len(r, q) {
            best = best.min(l1 + l2);
        }
    }
    best
}

/// Largest arclength up to which two paths from a common origin stay within
/// `prox_tol` of each other at equal arclength (uniform convergence on the
/// prefix). Returns a vertex index into `b`.
fn proximity_span(m: &DiscreteManifold, a: &Path, b: &Path, prox_tol: f64) -> usize {
    let mut good = 0usize;
    for (k, &t) in b.cumlen.iter().enumerate() {
        if t > a.length() {
            break;
        }
        let pa = a.node_at(t);
        if node_proximity_upper(m, pa, b.nodes[k]) <= prox_tol {
            good = k;
        } else {
            break;
        }
    }
    good
}

/// Distance-realization audit over sampled pairs; returns the worst
/// deviation |d(γ(t1), γ(t2)) − |t2 − t1||.
pub fn ray_property_deviation(m: &DiscreteManifold, path: &Path, samples: usize) -> f64 {
    let n = path.nodes.len();
    if n < 2 {
        return 0.0;
    }
    let step = (n - 1).max(1) / samples.max(1);
    let idxs: Vec<usize> = (0..samples)
        .map(|k| (k * step.max(1)).min(n - 1))
        .chain([n - 1])
        .collect();
    let mut worst = 0.0f64;
    for (a, &ia) in idxs.iter().enumerate() {
        let d = crate::manifold::dijkstra_from(m, path.nodes[ia]);
        for &ib in idxs.iter().skip(a + 1) {
            let want = (path.cumlen[ib] - path.cumlen[ia]).abs();
            let got = d[path.nodes[ib] as usize];
            worst = worst.max((got - want).abs());
        }
    }
    worst
}

/// Trace a ray from `x` towards a target sequence escaping the window:
/// the stabilized prefix of the minimal segments to the targets, certified
/// by an independent distance-realization audit.
pub fn trace_ray(m: &DiscreteManifold, x: NodeId, targets: &[NodeId]) -> Result<Ray> {
    if targets.len() < 2 {
        return Err(Error::Config("trace_ray needs at least two targets".into()));
    }
    let (dist, pred) = distance_with_pred(m, &NodeSet::singleton(x))?;
    for w in targets.windows(2) {
        if dist[w[1] as usize] <= dist[w[0] as usize] {
            return Err(Error::NotEscaping);
        }
    }
    let paths: Vec<Path> = targets.iter().map(|&t| backtrack(&pred, &dist, m, x, t)).collect();
    let last = &paths[paths.len() - 1];
    let prev = &paths[paths.len() - 2];
    let prox_tol = 3.0 * 5.0f64.sqrt() * m.grid_h();
    let k = proximity_span(m, prev, last, prox_tol);
    let prefix = last.prefix(k);
    let span = prefix.length();
    if span < 0.5 * dist[targets[0] as usize] {
        return Err(Error::WindowExhausted(format!(
            "ray prefix stabilized only to {span:.4}"
        )));
    }
    let ray_tol = RAY_TOL_PER_SPAN * span;
    let dev = ray_property_deviation(m, &prefix, 4);
    if dev > ray_tol {
        return Err(Error::WindowExhausted(format!(
            "ray property deviation {dev} exceeds tolerance {ray_tol}"
        )));
    }
    Ok(Ray { path: prefix, certified_span: span, ray_tol })
}

/// Result of a coray construction: one ray per persistent initial-edge
/// cluster; `multiple` flags non-uniqueness of the limit direction.
#[derive(Debug)]
pub struct CorayResult {
    pub rays: Vec<Ray>,
    pub multiple: bool,
}

impl CorayResult {
    pub fn primary(&self) -> &Ray {
        &self.rays[0]
    }
}

/// Coray to `gamma` from `x`: stabilized limit of minimal segments aimed at
/// points escaping along the ray's certified span.
pub fn coray(m: &DiscreteManifold, gamma: &Ray, x: NodeId) -> Result<CorayResult> {
    let span = gamma.certified_span;
    let fractions = [0.55, 0.7, 0.85, 0.95, 1.0];
    let mut targets = Vec::new();
    for f in fractions {
        let (node, _) = gamma.snap(f * span);
        if node != x && targets.last() != Some(&node) {
            targets.push(node);
        }
    }
    if targets.len() < 2 {
        return Err(Error::SpanTooShort { have: span, need: 2.0 * m.grid_h() });
    }
    let (dist, pred) = distance_with_pred(m, &NodeSet::singleton(x))?;
    let paths: Vec<Path> = targets.iter().map(|&t| backtrack(&pred, &dist, m, x, t)).collect();

    // Cluster the most-escaped paths by initial direction: first edges more
    // than one stencil step apart witness distinct limit directions.
    let tail = &paths[paths.len().saturating_sub(3)..];
    let direction = |p: &Path| -> Option<(f64, f64)> {
        let a = m.grid_pos(p.nodes[0])?;
        let b = m.grid_pos(p.nodes[1])?;
        if a.chart != b.chart {
            return None;
        }
        let info = &m.charts()[a.chart];
        let mut du = (b.i as f64 - a.i as f64) * info.hu;
        if info.periodic_u {
            let l = info.nu as f64 * info.hu;
            du = du - (du / l).round() * l;
        }
        let dv = (b.j as f64 - a.j as f64) * info.hv;
        Some((du, dv))
    };
    let same_cluster = |p: &Path, q: &Path| -> bool {
        if p.nodes[1] == q.nodes[1] {
            return true;
        }
        match (direction(p), direction(q)) {
            (Some(a), Some(b)) => {
                let g = m.metric_at(x);
                let cosang = g.inner(a, b) / (g.norm(a.0, a.1) * g.norm(b.0, b.1));
                cosang.clamp(-1.0, 1.0).acos() <= crate::tol::SINGULAR_ANGLE
            }
            _ => true, // cross-seam starts: do not flag multiplicity
        }
    };
    let valid: Vec<&Path> = tail.iter().filter(|p| p.nodes.len() >= 2).collect();
    if valid.is_empty() {
        return Err(Error::SpanTooShort { have: span, need: 2.0 * m.grid_h() });
    }
    let mut clusters: Vec<Vec<&Path>> = Vec::new();
    for p in valid {
        if let Some(c) = clusters.iter_mut().find(|c| same_cluster(c[0], p)) {
            c.push(p);
        } else {
            clusters.push(vec![p]);
        }
    }
    let multiple = clusters.len() > 1;
    let prox_tol = 3.0 * 5.0f64.sqrt() * m.grid_h();
    let mut rays = Vec::new();
    for members in &clusters {
        let prefix = if members.len() >= 2 {
            let a = members[members.len() - 2];
            let b = members[members.len() - 1];
            let k = proximity_span(m, a, b, prox_tol);
            b.prefix(k)
        } else {
            (*members[0]).clone()
        };
        if prefix.nodes.len() < 2 {
            continue;
        }
        let span_p = prefix.length();
        let ray_tol = RAY_TOL_PER_SPAN * span_p.max(m.grid_h());
        let dev = ray_property_deviation(m, &prefix, 3);
        if dev > ray_tol {
            return Err(Error::WindowExhausted(format!(
                "coray prefix fails the ray audit: {dev} > {ray_tol}"
            )));
        }
        rays.push(Ray { path: prefix, certified_span: span_p, ray_tol });
    }
    if rays.is_empty() {
        return Err(Error::SpanTooShort { have: span, need: 2.0 * m.grid_h() });
    }
    Ok(CorayResult { rays, multiple })
}

/// True iff the path realizes graph distance across its whole span within
/// the ray tolerance (a discrete line).
pub fn is_line(m: &DiscreteManifold, p: &Path) -> bool {
    let span = p.length();
    if span <= 0.0 {
        return false;
    }
    let tol = RAY_TOL_PER_SPAN * span;
    ray_property_deviation(m, p, 5) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{build_chart_manifold, ChartSpec};

    fn plane(n: usize) -> DiscreteManifold {
        build_chart_manifold(ChartSpec::flat("p", -1.0, 1.0, -1.0, 1.0, n, n)).unwrap()
    }

    fn cylinder(nu: usize, nv: usize) -> DiscreteManifold {
        build_chart_manifold(ChartSpec::flat("c", 0.0, 2.0, -1.0, 1.0, nu, nv).periodic_u()).unwrap()
    }

    #[test]
    fn axis_aligned_segment_is_straight_row() {
        let n = 17;
        let m = plane(n);
        let x = m.node_at(0, 2, 8).unwrap();
        let y = m.node_at(0, 13, 8).unwrap();
        let p = minimal_segment(&m, x, y).unwrap();
        for (k, &node) in p.nodes.iter().enumerate() {
            let pos = m.grid_pos(node).unwrap();
            assert_eq!(pos.j, 8);
            assert_eq!(pos.i, 2 + k);
        }
        let h = 2.0 / (n - 1) as f64;
        assert!((p.length() - 11.0 * h).abs() < 1e-12);
    }

    #[test]
    fn segment_length_equals_graph_distance_exactly() {
        let m = plane(17);
        let x = m.node_at(0, 1, 3).unwrap();
        let y = m.node_at(0, 14, 11).unwrap();
        let p = minimal_segment(&m, x, y).unwrap();
        let d = pairwise_distance(&m, x, y);
        assert_eq!(p.length(), d);

        let csv = p.to_csv(&m);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "node_id,u,v,cumlen");
        assert_eq!(lines.len(), p.nodes.len() + 1);
        assert!(lines[1].ends_with(",0.000000000000"));
    }

    /// Wrap the short way: both wrap lengths compared by brute force.
    #[test]
    fn cylinder_segment_wraps_short_way() {
        let nu = 16;
        let m = cylinder(nu, 9);
        let hu = 2.0 / nu as f64;
        let x = m.node_at(0, 1, 4).unwrap();
        let y = m.node_at(0, 12, 4).unwrap();
        // short way: 1 -> 0 -> 15 -> ... -> 12 (5 steps); long way: 11 steps
        let short = 5.0 * hu;
        let long = 11.0 * hu;
        assert!(short < long);
        let p = minimal_segment(&m, x, y).unwrap();
        assert!((p.length() - short).abs() < 1e-12, "len {}", p.length());
    }

    #[test]
    fn trace_ray_along_axis_row() {
        let n = 33;
        let m = plane(n);
        let x = m.node_at(0, n / 2, n / 2).unwrap();
        let targets: Vec<NodeId> =
            [20, 24, 28, 31].iter().map(|&i| m.node_at(0, i, n / 2).unwrap()).collect();
        let ray = trace_ray(&m, x, &targets).unwrap();
        for &node in &ray.path.nodes {
            assert_eq!(m.grid_pos(node).unwrap().j, n / 2, "ray must stay on the row");
        }
        assert!(ray.certified_span > 0.5);
        let dev = ray_property_deviation(&m, &ray.path, 4);
        assert!(dev <= ray.ray_tol, "audit: {dev} > {}", ray.ray_tol);
    }

    #[test]
    fn trace_ray_requires_escaping_targets() {
        let n = 17;
        let m = plane(n);
        let x = m.node_at(0, 8, 8).unwrap();
        let t1 = m.node_at(0, 14, 8).unwrap();
        let t2 = m.node_at(0, 10, 8).unwrap();
        assert!(matches!(trace_ray(&m, x, &[t1, t2]), Err(Error::NotEscaping)));
    }

    #[test]
    fn cylinder_vertical_ray_and_coray() {
        let nu = 32;
        let m = cylinder(nu, 33);
        let x = m.node_at(0, 3, 16).unwrap();
        let targets: Vec<NodeId> =
            [24usize, 28, 32].iter().map(|&j| m.node_at(0, 3, j).unwrap()).collect();
        let ray = trace_ray(&m, x, &targets).unwrap();
        for &node in &ray.path.nodes {
            assert_eq!(m.grid_pos(node).unwrap().i, 3);
        }
        // coray from a different angle climbs vertically once aligned
        // (off-antipodal start so the wrap direction is unambiguous)
        let y = m.node_at(0, 10, 8).unwrap();
        let c = coray(&m, &ray, y).unwrap();
        assert!(!c.rays.is_empty());
        let tail = c.primary().path.nodes.last().unwrap();
        let pos = m.grid_pos(*tail).unwrap();
        assert!(pos.j >= 24, "coray should reach high on the cylinder, got row {}", pos.j);
    }

    #[test]
    fn coray_on_plane_is_parallel_ray() {
        let n = 33;
        let m = plane(n);
        let x = m.node_at(0, n / 2, n / 2).unwrap();
        let targets: Vec<NodeId> =
            [24usize, 28, 32].iter().map(|&i| m.node_at(0, i, n / 2).unwrap()).collect();
        let ray = trace_ray(&m, x, &targets).unwrap();
        let start = m.node_at(0, 8, 20).unwrap();
        let c = coray(&m, &ray, start).unwrap();
        let r = c.primary();
        // eventually moves in +u; the tail vertex must sit right of the start
        let last = m.grid_pos(*r.path.nodes.last().unwrap()).unwrap();
        assert!(last.i > 20, "coray tail at column {}", last.i);
    }

    #[test]
    fn coray_from_point_on_ray_is_its_tail() {
        let n = 33;
        let m = plane(n);
        let x = m.node_at(0, 4, 16).unwrap();
        let targets: Vec<NodeId> =
            [24usize, 28, 32].iter().map(|&i| m.node_at(0, i, 16).unwrap()).collect();
        let ray = trace_ray(&m, x, &targets).unwrap();
        let mid = m.node_at(0, 12, 16).unwrap();
        let c = coray(&m, &ray, mid).unwrap();
        assert!(!c.multiple);
        for &node in &c.primary().path.nodes {
            assert_eq!(m.grid_pos(node).unwrap().j, 16, "tail stays on the ray row");
        }
    }

    #[test]
    fn line_checks() {
        let n = 33;
        let m = plane(n);
        // straight row: a line
        let row: Vec<NodeId> = (0..n).map(|i| m.node_at(0, i, 16).unwrap()).collect();
        let mut cum = vec![0.0];
        for w in row.windows(2) {
            cum.push(cum.last().unwrap() + m.edge_len(w[0], w[1]).unwrap());
        }
        let straight = Path { nodes: row, cumlen: cum };
        assert!(is_line(&m, &straight));

        // L-shaped path: not a line
        let mut nodes: Vec<NodeId> = (0..n).map(|i| m.node_at(0, i, 0).unwrap()).collect();
        nodes.extend((1..n).map(|j| m.node_at(0, n - 1, j).unwrap()));
        let mut cum = vec![0.0];
        for w in nodes.windows(2) {
            cum.push(cum.last().unwrap() + m.edge_len(w[0], w[1]).unwrap());
        }
        let bent = Path { nodes, cumlen: cum };
        assert!(!is_line(&m, &bent));

        // cylinder vertical column: a line
        let mc = cylinder(32, 33);
        let col: Vec<NodeId> = (0..33).map(|j| mc.node_at(0, 5, j).unwrap()).collect();
        let mut cum = vec![0.0];
        for w in col.windows(2) {
            cum.push(cum.last().unwrap() + mc.edge_len(w[0], w[1]).unwrap());
        }
        assert!(is_line(&mc, &Path { nodes: col, cumlen: cum }));
    }

    /// Stability sanity: corays to one ray from nearby starts leave along
    /// directions within one stencil step of each other.
    #[test]
    fn nearby_corays_have_close_initial_edges() {
        let n = 33;
        let m = plane(n);
        let x = m.node_at(0, 16, 16).unwrap();
        let targets: Vec<NodeId> =
            [24usize, 28, 32].iter().map(|&i| m.node_at(0, i, 16).unwrap()).collect();
        let ray = trace_ray(&m, x, &targets).unwrap();
        let mut dirs = Vec::new();
        for j in [10usize, 11, 12] {
            let s = m.node_at(0, 6, j).unwrap();
            let c = coray(&m, &ray, s).unwrap();
            let p = c.primary();
            let a = m.grid_pos(p.path.nodes[0]).unwrap();
            let b = m.grid_pos(p.path.nodes[1]).unwrap();
            let d = ((b.i as f64 - a.i as f64), (b.j as f64 - a.j as f64));
            let ang = d.1.atan2(d.0);
            dirs.push(ang);
        }
        let span = dirs.iter().cloned().fold(f64::MIN, f64::max)
            - dirs.iter().cloned().fold(f64::MAX, f64::min);
        assert!(span <= 0.5, "initial-edge spread {span} rad");
    }
}
