//! The function-space metric ρ on normalized fields, its quotient ρ~ modulo
//! constants, the min-interpolation path between two fields, and
//! single-linkage clustering of sampled boundary points.
//!
//! ρ is a truncated weighted series over a compact exhaustion by closed
//! metric balls. Each term is `2^{-n} · min(1, sup_{K_n} |u − v|)`, so the
//! truncated sum is a metric, is 1-Lipschitz with respect to the sup norm on
//! the largest ball, and saturates at `1 − 2^{-N}` for far-apart fields. The
//! discarded tail is bounded by `2^{-N}` and reported alongside every value.

use crate::eikonal::ScalarField;
use crate::error::{Error, Result};
use crate::manifold::{dijkstra_from, DiscreteManifold, NodeId};
use crate::tol::SHIFT_TOL;
use crate::viscosity::min_combine;

/// Nested closed metric balls around a base node.
#[derive(Debug, Clone)]
pub struct CompactExhaustion {
    pub base: NodeId,
    pub radii: Vec<f64>,
    pub sets: Vec<Vec<NodeId>>,
}

impl CompactExhaustion {
    /// Closed balls B_r(x0) for the given increasing radii.
    pub fn balls(m: &DiscreteManifold, x0: NodeId, radii: &[f64]) -> Result<Self> {
        if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("exhaustion radii must be increasing".into()));
        }
        let d = dijkstra_from(m, x0);
        let mut sets = Vec::with_capacity(radii.len());
        for &r in radii {
            let ball: Vec<NodeId> = (0..m.node_count() as NodeId)
                .filter(|&p| d[p as usize] <= r)
                .collect();
            sets.push(ball);
        }
        Ok(CompactExhaustion { base: x0, radii: radii.to_vec(), sets })
    }

    pub fn largest(&self) -> &[NodeId] {
        self.sets.last().unwrap()
    }
}

/// A ρ value with its truncation certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rho {
    pub value: f64,
    /// bound 2^{-N} on the discarded tail of the series
    pub tail_bound: f64,
}

fn check_reliable_on(e: &CompactExhaustion, fields: &[&ScalarField]) -> Result<()> {
    for (set, &r) in e.sets.iter().zip(&e.radii) {
        for &p in set {
            for f in fields {
                if !f.reliable[p as usize] {
                    return Err(Error::ExhaustionUnreliable { radius: r });
                }
            }
        }
    }
    Ok(())
}

/// Per-ball range of u − v, for O(1) shifted sup evaluations.
fn diff_ranges(u: &ScalarField, v: &ScalarField, e: &CompactExhaustion) -> Vec<(f64, f64)> {
    e.sets
        .iter()
        .map(|set| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &p in set {
                let d = u.values[p as usize] - v.values[p as usize];
                lo = lo.min(d);
                hi = hi.max(d);
            }
            (lo, hi)
        })
        .collect()
}

fn rho_of_ranges(ranges: &[(f64, f64)], shift: f64) -> f64 {
    let mut total = 0.0;
    let mut w = 0.5;
    for &(lo, hi) in ranges {
        let sup = (lo + shift).abs().max((hi + shift).abs());
        total += w * sup.min(1.0);
        w *= 0.5;
    }
    total
}

/// Truncated series metric between two fields defined on the exhaustion.
pub fn rho(u: &ScalarField, v: &ScalarField, e: &CompactExhaustion) -> Result<Rho> {
    check_reliable_on(e, &[u, v])?;
    let ranges = diff_ranges(u, v, e);
    Ok(Rho { value: rho_of_ranges(&ranges, 0.0), tail_bound: 0.5f64.powi(e.sets.len() as i32) })
}

/// Quotient pseudometric modulo constants: inf over a single shift of
/// ρ(u + t, v), found by a coarse grid plus ternary refinement. By
/// construction the result is symmetric in (u, v) and never exceeds ρ(u, v).
pub fn rho_quotient(u: &ScalarField, v: &ScalarField, e: &CompactExhaustion) -> Result<Rho> {
    check_reliable_on(e, &[u, v])?;
    let ranges = diff_ranges(u, v, e);
    // evaluating at +-t symmetrizes: rho_vu(t) = rho_uv(-t)
    let g = |t: f64| rho_of_ranges(&ranges, t).min(rho_of_ranges(&ranges, -t));
    let (lo, hi) = ranges
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(l, h)| (a.min(l), b.max(h)));
    let span = hi.abs().max(lo.abs()).max(1e-9);

    let grid = 64usize;
    let mut best_t = 0.0;
    let mut best = g(0.0);
    for k in 0..=grid {
        let t = span * k as f64 / grid as f64;
        let val = g(t);
        if val < best {
            best = val;
            best_t = t;
        }
    }
    // ternary refinement of the bracket around the best grid point
    let step = span / grid as f64;
    let mut a = (best_t - step).max(0.0);
    let mut b = best_t + step;
    while b - a > SHIFT_TOL * 0.01 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if g(m1) <= g(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    let refined = g(0.5 * (a + b));
    let value = refined.min(best).min(rho_of_ranges(&ranges, 0.0));
    Ok(Rho { value, tail_bound: 0.5f64.powi(e.sets.len() as i32) })
}

/// A normalized representative of an ideal-boundary element.
#[derive(Debug, Clone)]
pub struct BoundaryPoint {
    pub rep: ScalarField,
    pub provenance: String,
}

impl BoundaryPoint {
    /// Normalize at the exhaustion base and validate the Lipschitz bound.
    pub fn new(
        m: &DiscreteManifold,
        mut field: ScalarField,
        x0: NodeId,
        provenance: &str,
        lip_slack: f64,
    ) -> Result<Self> {
        field.normalize_at(x0);
        field.check_lipschitz(m, lip_slack)?;
        Ok(BoundaryPoint { rep: field, provenance: provenance.to_string() })
    }
}

/// The min-interpolation path t ↦ min{u + t, v} between two fields.
pub struct ConnectPath {
    pub ts: Vec<f64>,
    pub fields: Vec<ScalarField>,
    /// t at and below which min{u + t, v} = u + t on the largest ball
    pub t_lo: f64,
    /// t at and above which min{u + t, v} = v on the largest ball
    pub t_hi: f64,
}

/// Build the path fields on a sample grid of t values.
pub fn connect_path(
    _m: &DiscreteManifold,
    u: &ScalarField,
    v: &ScalarField,
    t_grid: &[f64],
    e: &CompactExhaustion,
) -> Result<ConnectPath> {
    check_reliable_on(e, &[u, v])?;
    let mut t_lo = f64::INFINITY;
    let mut t_hi = f64::NEG_INFINITY;
    for &p in e.largest() {
        let d = v.values[p as usize] - u.values[p as usize];
        t_lo = t_lo.min(d);
        t_hi = t_hi.max(d);
    }
    let mut fields = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mut shifted = u.clone();
        for val in &mut shifted.values {
            *val += t;
        }
        fields.push(min_combine(&shifted, v)?);
    }
    Ok(ConnectPath { ts: t_grid.to_vec(), fields, t_lo, t_hi })
}

/// Single-linkage clustering of boundary points under ρ~ at threshold eps.
pub struct ClusterResult {
    pub assignments: Vec<usize>,
    pub clusters: Vec<Vec<usize>>,
    pub dist: Vec<Vec<f64>>,
}

impl ClusterResult {
    pub fn count(&self) -> usize {
        self.clusters.len()
    }

    /// Distance matrix as CSV (row/column order = input order).
    pub fn dist_csv(&self) -> String {
        let mut s = String::new();
        for row in &self.dist {
            let cells: Vec<String> = row.iter().map(|d| format!("{d:.9}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

pub fn cluster_boundary(
    points: &[BoundaryPoint],
    e: &CompactExhaustion,
    eps: f64,
) -> Result<ClusterResult> {
    let n = points.len();
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = rho_quotient(&points[i].rep, &points[j].rep, e)?.value;
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if dist[i][j] <= eps {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    parent[hi] = lo;
                }
            }
        }
    }
    let mut assignments = vec![0usize; n];
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        let idx = match reps.iter().position(|&x| x == r) {
            Some(k) => k,
            None => {
                reps.push(r);
                reps.len() - 1
            }
        };
        assignments[i] = idx;
    }
    let mut clusters = vec![Vec::new(); reps.len()];
    for (i, &a) in assignments.iter().enumerate() {
        clusters[a].push(i);
    }
    Ok(ClusterResult { assignments, clusters, dist })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eikonal::{FieldSource, ScalarField};
    use crate::manifold::{build_chart_manifold, ChartSpec, DiscreteManifold};

    fn plane(n: usize) -> DiscreteManifold {
        build_chart_manifold(ChartSpec::flat("p", -1.0, 1.0, -1.0, 1.0, n, n)).unwrap()
    }

    fn exhaustion(m: &DiscreteManifold, n: usize) -> (NodeId, CompactExhaustion) {
        let x0 = m.node_at(0, n / 2, n / 2).unwrap();
        let e = CompactExhaustion::balls(m, x0, &[0.2, 0.4, 0.6, 0.8]).unwrap();
        (x0, e)
    }

    fn shifted(f: &ScalarField, c: f64) -> ScalarField {
        let mut g = f.clone();
        for v in &mut g.values {
            *v += c;
        }
        g
    }

    #[test]
    fn rho_zero_iff_equal_on_largest_ball() {
        let n = 33;
        let m = plane(n);
        let (_, e) = exhaustion(&m, n);
        let u = ScalarField::from_fn(&m, |x, _| -x);
        assert_eq!(rho(&u, &u, &e).unwrap().value, 0.0);
        let v = ScalarField::from_fn(&m, |x, y| if x * x + y * y > 0.9 { -x + 0.5 } else { -x });
        // differs only outside the largest ball
        assert_eq!(rho(&u, &v, &e).unwrap().value, 0.0);
        let w = ScalarField::from_fn(&m, |x, y| -x + 0.01 * y);
        assert!(rho(&u, &w, &e).unwrap().value > 0.0);
    }

    /// Far-apart fields saturate every term: ρ = 1 − 2^{-N}.
    #[test]
    fn rho_saturates_for_large_constant_gap() {
        let n = 33;
        let m = plane(n);
        let (_, e) = exhaustion(&m, n);
        let u = ScalarField::from_fn(&m, |x, _| -x);
        let v = shifted(&u, 7.0);
        let got = rho(&u, &v, &e).unwrap();
        let expect = 1.0 - 0.5f64.powi(4);
        assert!((got.value - expect).abs() < 1e-15);
        assert_eq!(got.tail_bound, 0.5f64.powi(4));
    }

    /// Direct evaluation of the definition for u = 0, v = eps * d(., x0).
    #[test]
    fn rho_matches_direct_sum() {
        let n = 33;
        let m = plane(n);
        let (x0, e) = exhaustion(&m, n);
        let u = ScalarField::constant(&m, 0.0);
        let d = crate::eikonal::distance_to_set(&m, &crate::manifold::NodeSet::singleton(x0)).unwrap();
        let eps = 0.3;
        let mut v = d.field.clone();
        for val in &mut v.values {
            *val *= eps;
        }
        v.reliable = vec![true; v.len()];
        v.source = FieldSource::External;
        // oracle: evaluate the finite sum from the definition, ball by ball
        let mut expect = 0.0;
        let mut w = 0.5;
        for set in &e.sets {
            let sup = set
                .iter()
                .map(|&p| (v.values[p as usize] - 0.0).abs())
                .fold(0.0f64, f64::max);
            expect += w * sup.min(1.0);
            w *= 0.5;
        }
        let got = rho(&u, &v, &e).unwrap().value;
        assert!((got - expect).abs() < 1e-15);
    }

    #[test]
    fn rho_symmetry_and_triangle() {
        let n = 33;
        let m = plane(n);
        let (_, e) = exhaustion(&m, n);
        let fields = [
            ScalarField::from_fn(&m, |x, _| -x),
            ScalarField::from_fn(&m, |_, y| -y),
            ScalarField::from_fn(&m, |x, y| -(x + y) * std::f64::consts::FRAC_1_SQRT_2),
            ScalarField::from_fn(&m, |x, y| 0.3 * x - 0.2 * y),
        ];
        for a in &fields {
            for b in &fields {
                let ab = rho(a, b, &e).unwrap().value;
                let ba = rho(b, a, &e).unwrap().value;
                assert!((ab - ba).abs() < 1e-15);
                for c in &fields {
                    let ac = rho(a, c, &e).unwrap().value;
                    let cb = rho(c, b, &e).unwrap().value;
                    assert!(ab <= ac + cb + 1e-12, "triangle violated");
                }
            }
        }
    }

    #[test]
    fn quotient_kills_constants() {
        let n = 33;
        let m = plane(n);
        let (_, e) = exhaustion(&m, n);
        let u = ScalarField::from_fn(&m, |x, _| -x);
        let v = shifted(&u, 7.0);
        let q = rho_quotient(&u, &v, &e).unwrap().value;
        assert!(q <= SHIFT_TOL, "quotient of a constant shift: {q}");
    }

    #[test]
    fn quotient_shift_invariance_and_bound() {
        let n = 33;
        let m = plane(n);
        let (_, e) = exhaustion(&m, n);
        let u = ScalarField::from_fn(&m, |x, _| -x);
        let v = ScalarField::from_fn(&m, |_, y| -y);
        let q0 = rho_quotient(&u, &v, &e).unwrap().value;
        for c in [-3.0, 0.7, 12.0] {
            let q = rho_quotient(&shifted(&u, c), &v, &e).unwrap().value;
            assert!((q - q0).abs() <= SHIFT_TOL, "shift invariance: {q} vs {q0}");
        }
        assert!(q0 <= rho(&u, &v, &e).unwrap().value);
        // symmetry to machine precision
        let quv = rho_quotient(&u, &v, &e).unwrap().value;
        let qvu = rho_quotient(&v, &u, &e).unwrap().value;
        assert!((quv - qvu).abs() <= 1e-12);
    }

    #[test]
    fn connect_path_saturates_at_endpoints() {
        let n = 33;
        let m = plane(n);
        let (_, e) = exhaustion(&m, n);
        let u = ScalarField::from_fn(&m, |x, _| -x);
        let v = ScalarField::from_fn(&m, |_, y| -y);
        let grid: Vec<f64> = (-10..=10).map(|k| k as f64 * 0.5).collect();
        let path = connect_path(&m, &u, &v, &grid, &e).unwrap();
        // beyond t_hi the min saturates to v on the largest ball
        let beyond = path.fields.last().unwrap();
        assert!(*path.ts.last().unwrap() >= path.t_hi);
        for &p in e.largest() {
            assert_eq!(beyond.values[p as usize], v.values[p as usize]);
        }
        // u = v degenerate case: the path stays at distance 0 from u
        let path2 = connect_path(&m, &u, &u, &[-1.0, 0.0, 1.0], &e).unwrap();
        for f in &path2.fields {
            let q = rho_quotient(f, &u, &e).unwrap().value;
            assert!(q <= SHIFT_TOL, "u=v path distance {q}");
        }
    }

    #[test]
    fn cluster_constant_shifts_into_one_and_directions_into_four() {
        let n = 33;
        let m = plane(n);
        let (x0, e) = exhaustion(&m, n);
        let u = ScalarField::from_fn(&m, |x, _| -x);
        let pts: Vec<BoundaryPoint> = [0.0, 2.0, -1.0]
            .iter()
            .map(|&c| BoundaryPoint::new(&m, shifted(&u, c), x0, "shift", 1e-9).unwrap())
            .collect();
        let r = cluster_boundary(&pts, &e, 0.05).unwrap();
        assert_eq!(r.count(), 1);

        let dirs: Vec<BoundaryPoint> = [
            ScalarField::from_fn(&m, |x, _| -x),
            ScalarField::from_fn(&m, |_, y| -y),
            ScalarField::from_fn(&m, |x, _| x),
            ScalarField::from_fn(&m, |_, y| y),
        ]
        .into_iter()
        .map(|f| BoundaryPoint::new(&m, f, x0, "direction", 1e-9).unwrap())
        .collect();
        let r = cluster_boundary(&dirs, &e, 0.05).unwrap();
        assert_eq!(r.count(), 4, "matrix:\n{}", r.dist_csv());
    }
}
