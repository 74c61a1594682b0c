//! The end partition of a discrete manifold: stabilized labeling of the
//! unbounded components of ball complements, ray-tail classification and
//! cofinality checks.
//!
//! "Unbounded component" is proxied by "touches the truncation boundary";
//! this is exact for the scenario manifolds, where every infinite direction
//! is cut by the window.

use crate::error::{Error, Result};
use crate::geodesics::{coray, Ray};
use crate::ideal_boundary::{cluster_boundary, BoundaryPoint, CompactExhaustion};
use crate::manifold::{dijkstra_from, DiscreteManifold, NodeId};

/// Stabilized connected-component labeling of ball complements.
#[derive(Debug, Clone)]
pub struct EndPartition {
    pub base: NodeId,
    pub radii: Vec<f64>,
    /// per radius: node → unbounded-component index, or -1
    pub labels: Vec<Vec<i64>>,
    /// number of unbounded components per radius
    pub counts: Vec<usize>,
    /// per consecutive radius pair: component index at the larger radius →
    /// component index at the smaller one
    pub refinement: Vec<Vec<usize>>,
    /// component count once labels stop merging/splitting, if stabilized
    pub stabilized_count: Option<usize>,
    base_distance: Vec<f64>,
}

impl EndPartition {
    pub fn stabilized(&self) -> Result<usize> {
        self.stabilized_count.ok_or(Error::EndsUnstable)
    }

    /// Component label of the ray tail at the given radius index, or None
    /// when the tail does not leave the ball.
    pub fn tail_label(&self, ray: &Ray, radius_idx: usize) -> Option<usize> {
        let terminal = *ray.path.nodes.last().unwrap();
        let l = self.labels[radius_idx][terminal as usize];
        (l >= 0).then_some(l as usize)
    }

    /// Distance of a node from the partition base.
    pub fn base_distance(&self, p: NodeId) -> f64 {
        self.base_distance[p as usize]
    }

    /// Structured-text dump: per-radius counts and refinement maps.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, &r) in self.radii.iter().enumerate() {
            s.push_str(&format!("radius = {r:.6}, components = {}\n", self.counts[k]));
            if k > 0 {
                let map: Vec<String> = self.refinement[k - 1]
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| format!("{i}->{j}"))
                    .collect();
                s.push_str(&format!("refinement = {}\n", map.join(" ")));
            }
        }
        match self.stabilized_count {
            Some(c) => s.push_str(&format!("stabilized_count = {c}\n")),
            None => s.push_str("stabilized_count = unstabilized\n"),
        }
        s
    }
}

/// Label the unbounded components of the complement of each ball B_r(x0).
pub fn end_partition(m: &DiscreteManifold, x0: NodeId, radii: &[f64]) -> Result<EndPartition> {
    if radii.len() < 3 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("end partition needs >= 3 increasing radii".into()));
    }
    let d0 = dijkstra_from(m, x0);
    let n = m.node_count();
    let mut labels: Vec<Vec<i64>> = Vec::new();
    let mut counts = Vec::new();
    for &r in radii {
        let outside: Vec<bool> = d0.iter().map(|&d| d > r).collect();
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        for p in 0..n as NodeId {
            if !outside[p as usize] {
                continue;
            }
            for (q, _) in m.neighbors(p) {
                if q > p && outside[q as usize] {
                    let (a, b) = (find(&mut parent, p), find(&mut parent, q));
                    if a != b {
                        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                        parent[hi as usize] = lo;
                    }
                }
            }
        }
        // unbounded proxy: component touches the truncation boundary
        let mut unbounded_roots: Vec<u32> = Vec::new();
        for p in 0..n as NodeId {
            if outside[p as usize] && m.is_cut(p) {
                let r0 = find(&mut parent, p);
                if !unbounded_roots.contains(&r0) {
                    unbounded_roots.push(r0);
                }
            }
        }
        unbounded_roots.sort_unstable();
        let mut lab = vec![-1i64; n];
        for p in 0..n as NodeId {
            if outside[p as usize] {
                let r0 = find(&mut parent, p);
                if let Ok(idx) = unbounded_roots.binary_search(&r0) {
                    lab[p as usize] = idx as i64;
                }
            }
        }
        counts.push(unbounded_roots.len());
        labels.push(lab);
    }

    // Refinement: each component at radius r_{k+1} lies in one component at
    // radius r_k (complements shrink as the radius grows).
    let mut refinement = Vec::new();
    for k in 1..radii.len() {
        let mut map = vec![usize::MAX; counts[k]];
        for p in 0..n {
            let l = labels[k][p];
            if l < 0 {
                continue;
            }
            let coarse = labels[k - 1][p];
            debug_assert!(coarse >= 0, "outer node lost its component at a smaller radius");
            let l = l as usize;
            if map[l] == usize::MAX {
                map[l] = coarse as usize;
            } else {
                debug_assert_eq!(map[l], coarse as usize, "refinement is not a function");
            }
        }
        refinement.push(map);
    }

    let k = radii.len();
    let last_bijective = {
        let map = &refinement[k - 2];
        let mut seen = vec![false; counts[k - 2]];
        let mut ok = counts[k - 1] == counts[k - 2];
        for &t in map {
            if t == usize::MAX || seen[t] {
                ok = false;
                break;
            }
            seen[t] = true;
        }
        ok
    };
    let stabilized_count = last_bijective.then_some(counts[k - 1]);

    Ok(EndPartition {
        base: x0,
        radii: radii.to_vec(),
        labels,
        counts,
        refinement,
        stabilized_count,
        base_distance: d0,
    })
}

/// Two rays are cofinal iff their tails beyond every tested radius lie in
/// the same unbounded component.
pub fn cofinal(m: &DiscreteManifold, g1: &Ray, g2: &Ray, e: &EndPartition) -> Result<bool> {
    let _ = m;
    let largest = *e.radii.last().unwrap();
    for ray in [g1, g2] {
        let terminal = *ray.path.nodes.last().unwrap();
        if e.base_distance(terminal) <= largest {
            return Err(Error::RayTooShort);
        }
    }
    for k in 0..e.radii.len() {
        let l1 = e.tail_label(g1, k);
        let l2 = e.tail_label(g2, k);
        if l1.is_none() || l2.is_none() || l1 != l2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Report of the coray-cofinality verification.
#[derive(Debug)]
pub struct CofinalityReport {
    pub starts_tested: usize,
    pub corays_tested: usize,
    pub violations: Vec<(NodeId, f64)>,
    pub multiplicity_seen: usize,
    /// coray branches whose certified span ended inside the largest tested
    /// radius (window too small to classify their tail; reported, not failed)
    pub short_skipped: usize,
}

impl CofinalityReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty() && self.corays_tested >= self.starts_tested
    }

    pub fn to_text(&self) -> String {
        format!(
            "starts = {}\ncorays = {}\nviolations = {}\nmultiplicity_seen = {}\nshort_skipped = {}\n",
            self.starts_tested,
            self.corays_tested,
            self.violations.len(),
            self.multiplicity_seen,
            self.short_skipped
        )
    }
}

/// Corays to a ray are cofinal with it: trace a coray from every start and
/// check tail components, recording any violation with its witness radius.
///
/// Every start must yield at least one coray certified past the largest
/// radius; extra multiplicity branches that stabilized short of it are
/// counted but not classified.
pub fn verify_coray_cofinality(
    m: &DiscreteManifold,
    gamma: &Ray,
    starts: &[NodeId],
    e: &EndPartition,
) -> Result<CofinalityReport> {
    let largest = *e.radii.last().unwrap();
    let mut violations = Vec::new();
    let mut corays_tested = 0usize;
    let mut multiplicity_seen = 0usize;
    let mut short_skipped = 0usize;
    for &x in starts {
        let result = coray(m, gamma, x)?;
        if result.multiple {
            multiplicity_seen += 1;
        }
        let mut tested_here = 0usize;
        for r in &result.rays {
            let terminal = *r.path.nodes.last().unwrap();
            if e.base_distance(terminal) <= largest {
                short_skipped += 1;
                continue;
            }
            corays_tested += 1;
            tested_here += 1;
            if !cofinal(m, gamma, r, e)? {
                // witness radius: first radius where the components differ
                let mut witness = largest;
                for (k, &rad) in e.radii.iter().enumerate() {
                    if e.tail_label(gamma, k) != e.tail_label(r, k) {
                        witness = rad;
                        break;
                    }
                }
                violations.push((x, witness));
            }
        }
        if tested_here == 0 {
            violations.push((x, largest));
        }
    }
    Ok(CofinalityReport {
        starts_tested: starts.len(),
        corays_tested,
        violations,
        multiplicity_seen,
        short_skipped,
    })
}

/// Report of the ends-vs-boundary-cardinality inequality.
#[derive(Debug)]
pub struct EndsInequalityReport {
    pub ends: usize,
    pub clusters: usize,
}

impl EndsInequalityReport {
    pub fn pass(&self) -> bool {
        self.ends <= self.clusters
    }
}

/// #ends ≤ #clusters of the sampled boundary points: the sample can only
/// undercount the ideal boundary, so a failure is a genuine bug.
pub fn verify_ends_inequality(
    e: &EndPartition,
    sample: &[BoundaryPoint],
    exhaustion: &CompactExhaustion,
    eps: f64,
) -> Result<EndsInequalityReport> {
    let ends = e.stabilized()?;
    let clusters = cluster_boundary(sample, exhaustion, eps)?.count();
    Ok(EndsInequalityReport { ends, clusters })
}

/// Cofinality is an equivalence relation on any sampled ray set; used by
/// tests and the acceptance suite.
pub fn cofinality_is_equivalence(
    m: &DiscreteManifold,
    rays: &[Ray],
    e: &EndPartition,
) -> Result<bool> {
    let k = rays.len();
    let mut rel = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            rel[i][j] = cofinal(m, &rays[i], &rays[j], e)?;
        }
    }
    for i in 0..k {
        if !rel[i][i] {
            return Ok(false);
        }
        for j in 0..k {
            if rel[i][j] != rel[j][i] {
                return Ok(false);
            }
            for l in 0..k {
                if rel[i][j] && rel[j][l] && !rel[i][l] {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Convenience for tests: straight-row ray in a chart.
pub fn chart_row_ray(
    m: &DiscreteManifold,
    chart: usize,
    rows: impl Iterator<Item = (usize, usize)>,
) -> Ray {
    let nodes: Vec<NodeId> = rows.map(|(i, j)| m.node_at(chart, i, j).unwrap()).collect();
    let mut cumlen = vec![0.0];
    for w in nodes.windows(2) {
        cumlen.push(cumlen.last().unwrap() + m.edge_len(w[0], w[1]).unwrap());
    }
    let span = *cumlen.last().unwrap();
    Ray {
        path: crate::geodesics::Path { nodes, cumlen },
        certified_span: span,
        ray_tol: crate::tol::RAY_TOL_PER_SPAN * span,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{build_chart_manifold, ChartSpec};

    fn plane(n: usize) -> DiscreteManifold {
        build_chart_manifold(ChartSpec::flat("p", -1.0, 1.0, -1.0, 1.0, n, n)).unwrap()
    }

    /// Slender cylinder: a ball separates the two ends only once its radius
    /// exceeds half the circumference, so the window must be taller than the
    /// cylinder is wide.
    fn cylinder(nu: usize, nv: usize) -> DiscreteManifold {
        build_chart_manifold(ChartSpec::flat("c", 0.0, 1.0, -1.0, 1.0, nu, nv).periodic_u()).unwrap()
    }

    #[test]
    fn plane_has_one_end() {
        let n = 33;
        let m = plane(n);
        let x0 = m.node_at(0, n / 2, n / 2).unwrap();
        let e = end_partition(&m, x0, &[0.2, 0.35, 0.5]).unwrap();
        assert_eq!(e.counts, vec![1, 1, 1]);
        assert_eq!(e.stabilized().unwrap(), 1);
    }

    #[test]
    fn cylinder_has_two_ends() {
        let m = cylinder(32, 65);
        let x0 = m.node_at(0, 0, 32).unwrap();
        let e = end_partition(&m, x0, &[0.55, 0.65, 0.8]).unwrap();
        assert_eq!(e.stabilized().unwrap(), 2);
    }

    #[test]
    fn cofinality_on_cylinder_rays() {
        let nu = 32;
        let nv = 65;
        let m = cylinder(nu, nv);
        let x0 = m.node_at(0, 0, 32).unwrap();
        let e = end_partition(&m, x0, &[0.55, 0.65, 0.8]).unwrap();
        let up1 = chart_row_ray(&m, 0, (32..nv).map(|j| (0usize, j)));
        let up2 = chart_row_ray(&m, 0, (32..nv).map(|j| (11usize, j)));
        let down = chart_row_ray(&m, 0, (0..=32).rev().map(|j| (5usize, j)));
        assert!(cofinal(&m, &up1, &up1, &e).unwrap(), "a ray is cofinal with itself");
        assert!(cofinal(&m, &up1, &up2, &e).unwrap(), "parallel up-rays are cofinal");
        assert!(!cofinal(&m, &up1, &down, &e).unwrap(), "up and down are not cofinal");
        assert!(cofinality_is_equivalence(&m, &[up1, up2, down], &e).unwrap());
    }

    #[test]
    fn short_ray_rejected() {
        let m = cylinder(32, 65);
        let x0 = m.node_at(0, 0, 32).unwrap();
        let e = end_partition(&m, x0, &[0.55, 0.65, 0.8]).unwrap();
        let stub = chart_row_ray(&m, 0, (32..40).map(|j| (0usize, j)));
        let up = chart_row_ray(&m, 0, (32..65).map(|j| (0usize, j)));
        assert!(matches!(cofinal(&m, &stub, &up, &e), Err(Error::RayTooShort)));
    }

    #[test]
    fn refinement_maps_are_consistent() {
        let m = cylinder(32, 65);
        let x0 = m.node_at(0, 0, 32).unwrap();
        let e = end_partition(&m, x0, &[0.55, 0.62, 0.7, 0.8]).unwrap();
        for map in &e.refinement {
            for &t in map {
                assert_ne!(t, usize::MAX, "component without a parent");
            }
        }
        let text = e.to_text();
        assert!(text.contains("stabilized_count = 2"), "{text}");
    }
}
