//! Discrete approximations of complete non-compact surfaces.
//!
//! A surface is approximated by a metric-weighted graph built from one or
//! more rectangular grid charts. Each interior grid node connects to its
//! 16-neighbourhood (kings moves plus knight moves), which bounds the
//! graph-vs-continuum metric distortion to [`crate::tol::STENCIL_BOUND`] for
//! constant metrics. Non-compactness is handled by windowed truncation:
//! nodes whose infinite-direction neighbours were cut off are flagged, and
//! [`DiscreteManifold::margin`] gives every node its graph distance to that
//! truncation boundary.
//!
//! Charts may be periodic, masked to non-rectangular planforms, identified
//! with each other along seams, or closed off by an apex node (a cone point
//! collecting a full grid row, used for the pole of a cap).

use std::collections::BinaryHeap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type NodeId = u32;

/// Per-node Riemannian metric components in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
}

impl MetricTensor {
    pub const EUCLIDEAN: MetricTensor = MetricTensor { g11: 1.0, g12: 0.0, g22: 1.0 };

    pub fn det(&self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }

    pub fn is_spd(&self) -> bool {
        self.g11 > 0.0 && self.det() > 0.0
    }

    /// Length of the chart vector (du, dv) under this metric.
    pub fn norm(&self, du: f64, dv: f64) -> f64 {
        (self.g11 * du * du + 2.0 * self.g12 * du * dv + self.g22 * dv * dv).sqrt()
    }

    pub fn inner(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        self.g11 * a.0 * b.0 + self.g12 * (a.0 * b.1 + a.1 * b.0) + self.g22 * a.1 * b.1
    }
}

/// Chart-edge roles: `Cut` marks a truncated infinite direction, `Seal`
/// marks an edge that is closed by an identification, a seam or an apex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideKind {
    Cut,
    Seal,
}

#[derive(Debug, Clone, Copy)]
pub struct Sides {
    pub left: SideKind,
    pub right: SideKind,
    pub bottom: SideKind,
    pub top: SideKind,
}

impl Default for Sides {
    fn default() -> Self {
        Sides { left: SideKind::Cut, right: SideKind::Cut, bottom: SideKind::Cut, top: SideKind::Cut }
    }
}

/// A rectangular grid chart with a per-node metric and optional periodic
/// identification or planform mask.
pub struct ChartSpec {
    pub name: String,
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
    pub nu: usize,
    pub nv: usize,
    pub periodic_u: bool,
    pub periodic_v: bool,
    pub sides: Sides,
    metric: Box<dyn Fn(f64, f64) -> MetricTensor>,
    mask: Option<Box<dyn Fn(f64, f64) -> bool>>,
}

impl ChartSpec {
    pub fn flat(name: &str, u0: f64, u1: f64, v0: f64, v1: f64, nu: usize, nv: usize) -> Self {
        ChartSpec {
            name: name.to_string(),
            u0,
            u1,
            v0,
            v1,
            nu,
            nv,
            periodic_u: false,
            periodic_v: false,
            sides: Sides::default(),
            metric: Box::new(|_, _| MetricTensor::EUCLIDEAN),
            mask: None,
        }
    }

    pub fn with_metric(mut self, f: impl Fn(f64, f64) -> MetricTensor + 'static) -> Self {
        self.metric = Box::new(f);
        self
    }

    pub fn with_constant_metric(self, g: MetricTensor) -> Self {
        self.with_metric(move |_, _| g)
    }

    /// Restrict the chart to the planform where `mask(u, v)` is true.
    pub fn with_mask(mut self, f: impl Fn(f64, f64) -> bool + 'static) -> Self {
        self.mask = Some(Box::new(f));
        self
    }

    pub fn periodic_u(mut self) -> Self {
        self.periodic_u = true;
        self
    }

    pub fn with_sides(mut self, sides: Sides) -> Self {
        self.sides = sides;
        self
    }

    pub fn hu(&self) -> f64 {
        if self.periodic_u {
            (self.u1 - self.u0) / self.nu as f64
        } else {
            (self.u1 - self.u0) / (self.nu - 1) as f64
        }
    }

    pub fn hv(&self) -> f64 {
        if self.periodic_v {
            (self.v1 - self.v0) / self.nv as f64
        } else {
            (self.v1 - self.v0) / (self.nv - 1) as f64
        }
    }

    fn validate(&self) -> Result<()> {
        if self.nu < 2 || self.nv < 2 {
            return Err(Error::ResolutionTooSmall { nu: self.nu, nv: self.nv });
        }
        Ok(())
    }
}

/// Grid position of a node inside a chart.
#[derive(Debug, Clone, Copy)]
pub struct GridPos {
    pub chart: usize,
    pub i: usize,
    pub j: usize,
}

#[derive(Debug, Clone)]
pub struct ChartInfo {
    pub name: String,
    pub u0: f64,
    pub v0: f64,
    pub hu: f64,
    pub hv: f64,
    pub nu: usize,
    pub nv: usize,
    pub periodic_u: bool,
    pub periodic_v: bool,
}

/// Nonempty node set used as a distance source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSet(pub Vec<NodeId>);

impl NodeSet {
    pub fn new(mut nodes: Vec<NodeId>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::EmptySource);
        }
        nodes.sort_unstable();
        nodes.dedup();
        Ok(NodeSet(nodes))
    }

    pub fn singleton(node: NodeId) -> Self {
        NodeSet(vec![node])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.0.binary_search(&node).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.0.iter().copied()
    }
}

/// Metric-weighted graph approximating a complete surface.
///
/// Immutable after construction; all solvers take `&DiscreteManifold`.
pub struct DiscreteManifold {
    charts: Vec<ChartInfo>,
    grid_index: Vec<Vec<i64>>, // per chart, (i + j*nu) -> node id or -1
    node_pos: Vec<Option<GridPos>>, // None for apex nodes
    node_uv: Vec<(f64, f64)>,
    metric: Vec<MetricTensor>,
    adj_off: Vec<u32>,
    adj_nbr: Vec<NodeId>,
    adj_len: Vec<f64>,
    /// truncation boundary declared on a chart-extent side (survives gluing)
    cut_extent: Vec<bool>,
    /// truncation implied by a planform mask (cleared when the node is seamed)
    cut_mask: Vec<bool>,
    margin: Vec<f64>,
    convex_window: bool,
}

/// Half-moves of the 16-neighbourhood; each undirected edge is generated once.
const HALF_MOVES: [(i64, i64); 8] =
    [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1), (1, -2)];

/// Lattice points flanking a knight move; the edge exists only if they do,
/// so grid edges never tunnel through a masked block.
fn knight_gates(du: i64, dv: i64) -> Option<[(i64, i64); 2]> {
    match (du, dv) {
        (2, 1) => Some([(1, 0), (1, 1)]),
        (2, -1) => Some([(1, 0), (1, -1)]),
        (1, 2) => Some([(0, 1), (1, 1)]),
        (1, -2) => Some([(0, -1), (1, -1)]),
        _ => None,
    }
}

struct PreChart {
    info: ChartInfo,
    sides: Sides,
    node_of: Vec<i64>,       // (i + j*nu) -> provisional id or -1
    first_id: usize,
    metric: Vec<MetricTensor>, // per present node, indexed by provisional id - first_id
}

/// Incremental builder: charts, node identifications, apex nodes.
#[derive(Default)]
pub struct ManifoldBuilder {
    charts: Vec<PreChart>,
    merges: Vec<(usize, usize)>,
    apexes: Vec<(Vec<usize>, f64, (f64, f64), usize)>, // (rim ids, edge len, label coords, chart)
    next_id: usize,
}

impl ManifoldBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_chart(&mut self, spec: ChartSpec) -> Result<usize> {
        spec.validate()?;
        let hu = spec.hu();
        let hv = spec.hv();
        let info = ChartInfo {
            name: spec.name.clone(),
            u0: spec.u0,
            v0: spec.v0,
            hu,
            hv,
            nu: spec.nu,
            nv: spec.nv,
            periodic_u: spec.periodic_u,
            periodic_v: spec.periodic_v,
        };
        let mut node_of = vec![-1i64; spec.nu * spec.nv];
        let mut metric = Vec::new();
        for j in 0..spec.nv {
            for i in 0..spec.nu {
                let u = spec.u0 + i as f64 * hu;
                let v = spec.v0 + j as f64 * hv;
                if let Some(mask) = &spec.mask {
                    if !mask(u, v) {
                        continue;
                    }
                }
                let g = (spec.metric)(u, v);
                if !g.is_spd() {
                    return Err(Error::NonSpdMetric { node: self.next_id, g11: g.g11, det: g.det() });
                }
                node_of[i + j * spec.nu] = self.next_id as i64;
                metric.push(g);
                self.next_id += 1;
            }
        }
        let first_id = self.next_id - metric.len();
        self.charts.push(PreChart { info, sides: spec.sides, node_of, first_id, metric });
        Ok(self.charts.len() - 1)
    }

    fn provisional(&self, chart: usize, i: usize, j: usize) -> Option<usize> {
        let c = &self.charts[chart];
        let id = c.node_of[i + j * c.info.nu];
        (id >= 0).then_some(id as usize)
    }

    /// Identify node (i1, j1) of chart `c1` with (i2, j2) of chart `c2`.
    pub fn identify(&mut self, c1: usize, p1: (usize, usize), c2: usize, p2: (usize, usize)) -> Result<()> {
        let a = self.provisional(c1, p1.0, p1.1).ok_or(Error::NodeOutOfRange(p1.0 + p1.1))?;
        let b = self.provisional(c2, p2.0, p2.1).ok_or(Error::NodeOutOfRange(p2.0 + p2.1))?;
        self.merges.push((a, b));
        Ok(())
    }

    /// Close a grid row with a single apex node at distance `len` from every
    /// rim node (the pole of a cap; a positive cone point).
    pub fn add_apex(&mut self, chart: usize, rim: &[(usize, usize)], len: f64, label: (f64, f64)) -> Result<()> {
        let mut ids = Vec::with_capacity(rim.len());
        for &(i, j) in rim {
            ids.push(self.provisional(chart, i, j).ok_or(Error::NodeOutOfRange(i + j))?);
        }
        self.apexes.push((ids, len, label, chart));
        Ok(())
    }

    pub fn finalize(self) -> Result<DiscreteManifold> {
        let napex = self.apexes.len();
        let total = self.next_id + napex;
        // Union-find over provisional ids.
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(a, b) in &self.merges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                // lower root wins: deterministic representatives
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[hi] = lo;
            }
        }
        // Compact ids.
        let mut compact = vec![u32::MAX; total];
        let mut n_nodes = 0u32;
        for x in 0..total {
            if find(&mut parent, x) == x {
                compact[x] = n_nodes;
                n_nodes += 1;
            }
        }
        for x in 0..total {
            let r = find(&mut parent, x);
            compact[x] = compact[r];
        }

        let n = n_nodes as usize;
        let mut node_pos: Vec<Option<GridPos>> = vec![None; n];
        let mut node_uv = vec![(0.0, 0.0); n];
        let mut metric = vec![MetricTensor::EUCLIDEAN; n];
        let mut cut_extent = vec![false; n];
        let mut cut_mask = vec![false; n];
        let mut grid_index: Vec<Vec<i64>> = Vec::new();
        let mut charts = Vec::new();

        for (ci, c) in self.charts.iter().enumerate() {
            let mut gindex = vec![-1i64; c.info.nu * c.info.nv];
            for j in 0..c.info.nv {
                for i in 0..c.info.nu {
                    let prov = c.node_of[i + j * c.info.nu];
                    if prov < 0 {
                        continue;
                    }
                    let id = compact[prov as usize] as usize;
                    gindex[i + j * c.info.nu] = id as i64;
                    // first chart that mentions the node provides coords/metric
                    if node_pos[id].is_none() {
                        node_pos[id] = Some(GridPos { chart: ci, i, j });
                        node_uv[id] = (c.info.u0 + i as f64 * c.info.hu, c.info.v0 + j as f64 * c.info.hv);
                        metric[id] = c.metric[prov as usize - c.first_id];
                    }
                    let (ext, mask) = self.node_cut_kind(ci, i, j);
                    cut_extent[id] |= ext;
                    cut_mask[id] |= mask;
                }
            }
            grid_index.push(gindex);
            charts.push(c.info.clone());
        }
        for (k, (_, _, label, chart)) in self.apexes.iter().enumerate() {
            let id = compact[self.next_id + k] as usize;
            node_uv[id] = *label;
            node_pos[id] = None;
            metric[id] = MetricTensor::EUCLIDEAN;
            let _ = chart;
        }
        // Seamed nodes lose mask-implied truncation (the seam closes it);
        // extent-side truncation is a declaration and survives.
        let mut merged = vec![false; n];
        for &(a, b) in &self.merges {
            merged[compact[a] as usize] = true;
            merged[compact[b] as usize] = true;
        }
        for id in 0..n {
            if merged[id] {
                cut_mask[id] = false;
            }
        }

        // Edge generation.
        let mut edges: std::collections::BTreeMap<(u32, u32), (f64, u32)> = Default::default();
        for c in &self.charts {
            let nu = c.info.nu as i64;
            let nv = c.info.nv as i64;
            let at = |i: i64, j: i64| -> Option<usize> {
                let (mut i, mut j) = (i, j);
                if c.info.periodic_u {
                    i = i.rem_euclid(nu);
                } else if i < 0 || i >= nu {
                    return None;
                }
                if c.info.periodic_v {
                    j = j.rem_euclid(nv);
                } else if j < 0 || j >= nv {
                    return None;
                }
                let p = c.node_of[(i + j * nu) as usize];
                (p >= 0).then_some(p as usize)
            };
            for j in 0..nv {
                for i in 0..nu {
                    let Some(p) = at(i, j) else { continue };
                    for &(du, dv) in &HALF_MOVES {
                        let Some(q) = at(i + du, j + dv) else { continue };
                        if let Some(gates) = knight_gates(du, dv) {
                            if gates.iter().any(|&(gu, gv)| at(i + gu, j + gv).is_none()) {
                                continue;
                            }
                        }
                        let (cu, cv) = (du as f64 * c.info.hu, dv as f64 * c.info.hv);
                        let gp = c.metric[p - c.first_id];
                        let gq = c.metric[q - c.first_id];
                        let len = 0.5 * (gp.norm(cu, cv) + gq.norm(cu, cv));
                        let (a, b) = (compact[p], compact[q]);
                        if a == b {
                            continue; // periodic wrap onto itself at tiny nu
                        }
                        let key = if a < b { (a, b) } else { (b, a) };
                        let e = edges.entry(key).or_insert((0.0, 0));
                        e.0 += len;
                        e.1 += 1;
                    }
                }
            }
        }
        for (k, (rim, len, _, _)) in self.apexes.iter().enumerate() {
            let apex = compact[self.next_id + k];
            for &r in rim {
                let b = compact[r];
                let key = if apex < b { (apex, b) } else { (b, apex) };
                let e = edges.entry(key).or_insert((0.0, 0));
                e.0 += len;
                e.1 += 1;
            }
        }

        // CSR assembly; duplicate chart edges across a seam are averaged.
        let mut deg = vec![0u32; n];
        for (&(a, b), _) in &edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        let mut adj_off = vec![0u32; n + 1];
        for i in 0..n {
            adj_off[i + 1] = adj_off[i] + deg[i];
        }
        let m2 = adj_off[n] as usize;
        let mut adj_nbr = vec![0u32; m2];
        let mut adj_len = vec![0.0f64; m2];
        let mut cursor: Vec<u32> = adj_off[..n].to_vec();
        for (&(a, b), &(sum, count)) in &edges {
            let len = sum / count as f64;
            debug_assert!(len > 0.0);
            let ca = cursor[a as usize] as usize;
            adj_nbr[ca] = b;
            adj_len[ca] = len;
            cursor[a as usize] += 1;
            let cb = cursor[b as usize] as usize;
            adj_nbr[cb] = a;
            adj_len[cb] = len;
            cursor[b as usize] += 1;
        }

        let mut m = DiscreteManifold {
            charts,
            grid_index,
            node_pos,
            node_uv,
            metric,
            adj_off,
            adj_nbr,
            adj_len,
            cut_extent,
            cut_mask,
            margin: Vec::new(),
            convex_window: false,
        };
        m.check_connected()?;
        m.margin = m.compute_margin();
        Ok(m)
    }

    /// (extent-side cut, mask-boundary cut) classification of a grid node.
    fn node_cut_kind(&self, chart: usize, i: usize, j: usize) -> (bool, bool) {
        let c = &self.charts[chart];
        let nu = c.info.nu;
        let nv = c.info.nv;
        let mut ext = false;
        if !c.info.periodic_u {
            if i == 0 && c.sides.left == SideKind::Cut {
                ext = true;
            }
            if i == nu - 1 && c.sides.right == SideKind::Cut {
                ext = true;
            }
        }
        if !c.info.periodic_v {
            if j == 0 && c.sides.bottom == SideKind::Cut {
                ext = true;
            }
            if j == nv - 1 && c.sides.top == SideKind::Cut {
                ext = true;
            }
        }
        // Mask boundary: an in-grid kings neighbour that is masked out.
        let mut mask = false;
        let nu_i = nu as i64;
        let nv_i = nv as i64;
        for (du, dv) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let (mut ii, mut jj) = (i as i64 + du, j as i64 + dv);
            if c.info.periodic_u {
                ii = ii.rem_euclid(nu_i);
            } else if ii < 0 || ii >= nu_i {
                continue; // grid edge handled by side kinds above
            }
            if c.info.periodic_v {
                jj = jj.rem_euclid(nv_i);
            } else if jj < 0 || jj >= nv_i {
                continue;
            }
            if c.node_of[(ii + jj * nu_i) as usize] < 0 {
                mask = true;
                break;
            }
        }
        (ext, mask)
    }
}

/// Build a manifold from a single chart. Non-periodic chart sides become the
/// truncation boundary unless declared sealed.
pub fn build_chart_manifold(spec: ChartSpec) -> Result<DiscreteManifold> {
    let mut b = ManifoldBuilder::new();
    b.add_chart(spec)?;
    b.finalize()
}

/// Seam between two already-built manifolds: node lists are identified
/// pairwise, in order.
pub struct Seam {
    pub a_part: usize,
    pub a_nodes: Vec<NodeId>,
    pub b_part: usize,
    pub b_nodes: Vec<NodeId>,
}

/// Glue several manifolds along seams into one. Seamed nodes become interior
/// (they are no longer truncation boundary); coincident seam-parallel edges
/// from the two sides are merged with averaged lengths.
pub fn glue(parts: &[DiscreteManifold], seams: &[Seam]) -> Result<DiscreteManifold> {
    let offsets: Vec<usize> = parts
        .iter()
        .scan(0usize, |acc, p| {
            let o = *acc;
            *acc += p.node_count();
            Some(o)
        })
        .collect();
    let total: usize = parts.iter().map(|p| p.node_count()).sum();

    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut seamed = vec![false; total];
    for seam in seams {
        if seam.a_nodes.len() != seam.b_nodes.len() {
            return Err(Error::SeamMismatch { left: seam.a_nodes.len(), right: seam.b_nodes.len() });
        }
        for (&a, &b) in seam.a_nodes.iter().zip(&seam.b_nodes) {
            let ga = offsets[seam.a_part] + a as usize;
            let gb = offsets[seam.b_part] + b as usize;
            seamed[ga] = true;
            seamed[gb] = true;
            let (ra, rb) = (find(&mut parent, ga), find(&mut parent, gb));
            if ra != rb {
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[hi] = lo;
            }
        }
    }
    let mut compact = vec![u32::MAX; total];
    let mut n_nodes = 0u32;
    for x in 0..total {
        if find(&mut parent, x) == x {
            compact[x] = n_nodes;
            n_nodes += 1;
        }
    }
    for x in 0..total {
        let r = find(&mut parent, x);
        compact[x] = compact[r];
    }
    let n = n_nodes as usize;

    let mut node_pos: Vec<Option<GridPos>> = vec![None; n];
    let mut node_uv = vec![(0.0, 0.0); n];
    let mut metric = vec![MetricTensor::EUCLIDEAN; n];
    let mut cut_extent = vec![false; n];
    let mut cut_mask = vec![false; n];
    let mut charts = Vec::new();
    let mut grid_index: Vec<Vec<i64>> = Vec::new();
    let mut chart_offsets = Vec::new();
    for (pi, p) in parts.iter().enumerate() {
        chart_offsets.push(charts.len());
        for info in &p.charts {
            charts.push(info.clone());
        }
        for (gi, gindex) in p.grid_index.iter().enumerate() {
            let mut g = gindex.clone();
            for v in g.iter_mut() {
                if *v >= 0 {
                    *v = compact[offsets[pi] + *v as usize] as i64;
                }
            }
            let _ = gi;
            grid_index.push(g);
        }
        for local in 0..p.node_count() {
            let gid = compact[offsets[pi] + local] as usize;
            if node_pos[gid].is_none() {
                node_pos[gid] = p.node_pos[local].map(|gp| GridPos {
                    chart: gp.chart + chart_offsets[pi],
                    i: gp.i,
                    j: gp.j,
                });
                node_uv[gid] = p.node_uv[local];
                metric[gid] = p.metric[local];
            }
            if !seamed[offsets[pi] + local] {
                cut_extent[gid] |= p.cut_extent[local];
                cut_mask[gid] |= p.cut_mask[local];
            }
        }
    }

    let mut edges: std::collections::BTreeMap<(u32, u32), (f64, u32)> = Default::default();
    for (pi, p) in parts.iter().enumerate() {
        for a in 0..p.node_count() {
            for (b, len) in p.neighbors(a as NodeId) {
                if (b as usize) < a {
                    continue; // undirected: count once per part
                }
                let ga = compact[offsets[pi] + a];
                let gb = compact[offsets[pi] + b as usize];
                if ga == gb {
                    continue;
                }
                let key = if ga < gb { (ga, gb) } else { (gb, ga) };
                let e = edges.entry(key).or_insert((0.0, 0));
                e.0 += len;
                e.1 += 1;
            }
        }
    }
    let mut deg = vec![0u32; n];
    for (&(a, b), _) in &edges {
        deg[a as usize] += 1;
        deg[b as usize] += 1;
    }
    let mut adj_off = vec![0u32; n + 1];
    for i in 0..n {
        adj_off[i + 1] = adj_off[i] + deg[i];
    }
    let m2 = adj_off[n] as usize;
    let mut adj_nbr = vec![0u32; m2];
    let mut adj_len = vec![0.0f64; m2];
    let mut cursor: Vec<u32> = adj_off[..n].to_vec();
    for (&(a, b), &(sum, count)) in &edges {
        let len = sum / count as f64;
        let ca = cursor[a as usize] as usize;
        adj_nbr[ca] = b;
        adj_len[ca] = len;
        cursor[a as usize] += 1;
        let cb = cursor[b as usize] as usize;
        adj_nbr[cb] = a;
        adj_len[cb] = len;
        cursor[b as usize] += 1;
    }

    let mut m = DiscreteManifold {
        charts,
        grid_index,
        node_pos,
        node_uv,
        metric,
        adj_off,
        adj_nbr,
        adj_len,
        cut_extent,
        cut_mask,
        margin: Vec::new(),
        convex_window: false,
    };
    m.check_connected()?;
    m.margin = m.compute_margin();
    Ok(m)
}

impl DiscreteManifold {
    pub fn node_count(&self) -> usize {
        self.node_uv.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj_nbr.len() / 2
    }

    pub fn neighbors(&self, p: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let lo = self.adj_off[p as usize] as usize;
        let hi = self.adj_off[p as usize + 1] as usize;
        self.adj_nbr[lo..hi].iter().copied().zip(self.adj_len[lo..hi].iter().copied())
    }

    pub fn degree(&self, p: NodeId) -> usize {
        (self.adj_off[p as usize + 1] - self.adj_off[p as usize]) as usize
    }

    /// Length of the edge p–q, if present.
    pub fn edge_len(&self, p: NodeId, q: NodeId) -> Option<f64> {
        self.neighbors(p).find(|&(r, _)| r == q).map(|(_, l)| l)
    }

    pub fn coords(&self, p: NodeId) -> (f64, f64) {
        self.node_uv[p as usize]
    }

    pub fn grid_pos(&self, p: NodeId) -> Option<GridPos> {
        self.node_pos[p as usize]
    }

    pub fn metric_at(&self, p: NodeId) -> MetricTensor {
        self.metric[p as usize]
    }

    pub fn charts(&self) -> &[ChartInfo] {
        &self.charts
    }

    pub fn node_at(&self, chart: usize, i: usize, j: usize) -> Option<NodeId> {
        let info = &self.charts[chart];
        if i >= info.nu || j >= info.nv {
            return None;
        }
        let v = self.grid_index[chart][i + j * info.nu];
        (v >= 0).then_some(v as NodeId)
    }

    /// Nodes on the truncation boundary (infinite directions cut by the window).
    pub fn cut_nodes(&self) -> Vec<NodeId> {
        (0..self.node_count() as NodeId).filter(|&p| self.is_cut(p)).collect()
    }

    pub fn is_cut(&self, p: NodeId) -> bool {
        self.cut_extent[p as usize] || self.cut_mask[p as usize]
    }

    /// Declare the window geodesically convex: every geodesic between window
    /// nodes stays inside, so windowed distances equal the infinite-manifold
    /// distances at every node and distance fields certify everywhere.
    /// The scenario builders set this; it holds for full-width truncations of
    /// product ends (plane boxes, cylinder and leg collars, capped tubes).
    pub fn declare_convex_window(&mut self) {
        self.convex_window = true;
    }

    pub fn has_convex_window(&self) -> bool {
        self.convex_window
    }

    /// Graph distance from each node to the truncation boundary;
    /// `f64::INFINITY` everywhere on a compact (fully identified) manifold.
    pub fn margin(&self) -> &[f64] {
        &self.margin
    }

    /// Largest margin over the graph: the radius of the geodesic ball the
    /// window stands in for.
    pub fn window_radius(&self) -> f64 {
        let m = self.margin.iter().copied().filter(|x| x.is_finite()).fold(0.0f64, f64::max);
        if m > 0.0 {
            m
        } else {
            f64::INFINITY
        }
    }

    /// Typical grid step (largest axis spacing over charts).
    pub fn grid_h(&self) -> f64 {
        self.charts.iter().map(|c| c.hu.max(c.hv)).fold(0.0, f64::max)
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.node_count();
        if n == 0 {
            return Err(Error::Disconnected { components: 0 });
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 1usize;
        while let Some(p) = stack.pop() {
            for (q, _) in self.neighbors(p) {
                if !seen[q as usize] {
                    seen[q as usize] = true;
                    count += 1;
                    stack.push(q);
                }
            }
        }
        if count != n {
            // rough component count for the message
            let mut comps = 1;
            for i in 0..n {
                if !seen[i] {
                    comps += 1;
                    break;
                }
            }
            return Err(Error::Disconnected { components: comps + 1 - 1 });
        }
        Ok(())
    }

    fn compute_margin(&self) -> Vec<f64> {
        let n = self.node_count();
        let sources: Vec<NodeId> = self.cut_nodes();
        if sources.is_empty() {
            return vec![f64::INFINITY; n];
        }
        dijkstra_multi(self, &sources)
    }

    /// Structured-text description: node count, edge count, window radius.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "nodes = {}", self.node_count());
        let _ = writeln!(s, "edges = {}", self.edge_count());
        let _ = writeln!(s, "charts = {}", self.charts.len());
        let wr = self.window_radius();
        if wr.is_finite() {
            let _ = writeln!(s, "window_radius = {wr:.6}");
        } else {
            let _ = writeln!(s, "window_radius = inf (compact)");
        }
        let _ = writeln!(s, "grid_h = {:.6}", self.grid_h());
        s
    }
}

/// Heap state for Dijkstra sweeps; min-heap by cost with node-id tiebreak for
/// fully deterministic pop order.
#[derive(Copy, Clone, PartialEq)]
struct HeapState {
    cost: f64,
    node: NodeId,
}

impl Eq for HeapState {}

impl Ord for HeapState {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapState {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) fn dijkstra_from(m: &DiscreteManifold, source: NodeId) -> Vec<f64> {
    dijkstra_multi(m, &[source])
}

/// Angle at `p` between the edges p–q1 and p–q2, in the node's metric when
/// all three share a chart, by the law of cosines otherwise.
pub(crate) fn edge_angle(m: &DiscreteManifold, p: NodeId, q1: NodeId, q2: NodeId) -> f64 {
    let chart_delta = |a: NodeId, b: NodeId| -> Option<(f64, f64)> {
        let pa = m.grid_pos(a)?;
        let pb = m.grid_pos(b)?;
        if pa.chart != pb.chart {
            return None;
        }
        let info = &m.charts()[pa.chart];
        let mut du = (pb.i as f64 - pa.i as f64) * info.hu;
        if info.periodic_u {
            let l = info.nu as f64 * info.hu;
            du -= (du / l).round() * l;
        }
        let mut dv = (pb.j as f64 - pa.j as f64) * info.hv;
        if info.periodic_v {
            let l = info.nv as f64 * info.hv;
            dv -= (dv / l).round() * l;
        }
        Some((du, dv))
    };
    if let (Some(a), Some(b)) = (chart_delta(p, q1), chart_delta(p, q2)) {
        let g = m.metric_at(p);
        let cosang = g.inner(a, b) / (g.norm(a.0, a.1) * g.norm(b.0, b.1));
        return cosang.clamp(-1.0, 1.0).acos();
    }
    // Law of cosines with a local bound on |q1 q2|.
    let la = match m.edge_len(p, q1) {
        Some(l) => l,
        None => return 0.0,
    };
    let lb = match m.edge_len(p, q2) {
        Some(l) => l,
        None => return 0.0,
    };
    let c = if q1 == q2 {
        0.0
    } else if let Some(l) = m.edge_len(q1, q2) {
        l
    } else {
        // two-hop bound; saturates the angle when the nodes are far apart
        let mut best = f64::INFINITY;
        for (r, l1) in m.neighbors(q1) {
            if let Some(l2) = m.edge_len(r, q2) {
                best = best.min(l1 + l2);
            }
        }
        best
    };
    if !c.is_finite() || c >= la + lb {
        return std::f64::consts::PI;
    }
    let cosang = (la * la + lb * lb - c * c) / (2.0 * la * lb);
    cosang.clamp(-1.0, 1.0).acos()
}

/// Multi-source Dijkstra used for margins (and reused by the eikonal module).
pub(crate) fn dijkstra_multi(m: &DiscreteManifold, sources: &[NodeId]) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; m.node_count()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s as usize] = 0.0;
        heap.push(HeapState { cost: 0.0, node: s });
    }
    while let Some(HeapState { cost, node }) = heap.pop() {
        if cost > dist[node as usize] {
            continue;
        }
        for (q, len) in m.neighbors(node) {
            let nd = cost + len;
            if nd < dist[q as usize] {
                dist[q as usize] = nd;
                heap.push(HeapState { cost: nd, node: q });
            }
        }
    }
    dist
}

/// Dijkstra with deterministic predecessor selection: among predecessors
/// achieving the minimal value, the lowest node index wins.
pub(crate) fn dijkstra_with_pred(m: &DiscreteManifold, sources: &[NodeId]) -> (Vec<f64>, Vec<i64>) {
    let mut dist = vec![f64::INFINITY; m.node_count()];
    let mut pred = vec![-1i64; m.node_count()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s as usize] = 0.0;
        heap.push(HeapState { cost: 0.0, node: s });
    }
    while let Some(HeapState { cost, node }) = heap.pop() {
        if cost > dist[node as usize] {
            continue;
        }
        for (q, len) in m.neighbors(node) {
            let nd = cost + len;
            if nd < dist[q as usize] || (nd == dist[q as usize] && (node as i64) < pred[q as usize]) {
                dist[q as usize] = nd;
                pred[q as usize] = node as i64;
                heap.push(HeapState { cost: nd, node: q });
            }
        }
    }
    (dist, pred)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_flat_chart() {
        let m = build_chart_manifold(ChartSpec::flat("c", 0.0, 1.0, 0.0, 1.0, 2, 2)).unwrap();
        assert_eq!(m.node_count(), 4);
        assert_eq!(m.edge_count(), 6); // 4 axis + 2 diagonals, knights do not fit
        let a = m.node_at(0, 0, 0).unwrap();
        let b = m.node_at(0, 1, 0).unwrap();
        let d = m.node_at(0, 1, 1).unwrap();
        assert_eq!(m.edge_len(a, b), Some(1.0));
        assert!((m.edge_len(a, d).unwrap() - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn periodic_chart_wraps_across_seam() {
        let nu = 16;
        let spec = ChartSpec::flat("cyl", 0.0, 2.0, 0.0, 1.0, nu, 8).periodic_u();
        let m = build_chart_manifold(spec).unwrap();
        let a = m.node_at(0, 0, 3).unwrap();
        let b = m.node_at(0, nu - 1, 3).unwrap();
        assert!(m.neighbors(a).any(|(q, _)| q == b), "(0,j) and (nu-1,j) must be adjacent");
    }

    /// Circumferential edge on a surface of revolution: length (2π/nu)·r(v).
    /// Closed form worked by hand for r(v) = 2 + cos v.
    #[test]
    fn revolution_surface_edge_lengths() {
        let nu = 24;
        let r = |v: f64| 2.0 + v.cos();
        let spec = ChartSpec::flat("rev", 0.0, std::f64::consts::TAU, 0.0, 1.0, nu, 6)
            .periodic_u()
            .with_metric(move |_, v| MetricTensor { g11: r(v) * r(v), g12: 0.0, g22: 1.0 });
        let m = build_chart_manifold(spec).unwrap();
        let hu = std::f64::consts::TAU / nu as f64;
        for j in [0usize, 2, 5] {
            let v = j as f64 * (1.0 / 5.0);
            let a = m.node_at(0, 3, j).unwrap();
            let b = m.node_at(0, 4, j).unwrap();
            let expect = hu * r(v);
            let got = m.edge_len(a, b).unwrap();
            assert!((got - expect).abs() < 1e-12, "row {j}: {got} vs {expect}");
        }
    }

    #[test]
    fn non_spd_metric_rejected_with_node() {
        let spec = ChartSpec::flat("bad", 0.0, 1.0, 0.0, 1.0, 3, 3)
            .with_constant_metric(MetricTensor { g11: 1.0, g12: 1.5, g22: 1.0 });
        match build_chart_manifold(spec) {
            Err(Error::NonSpdMetric { node, .. }) => assert_eq!(node, 0),
            other => panic!("expected NonSpdMetric, got {other:?}", other = other.err()),
        }
    }

    #[test]
    fn disconnected_mask_rejected() {
        // Two islands separated by a masked band wider than any stencil move.
        let spec = ChartSpec::flat("split", 0.0, 10.0, 0.0, 1.0, 11, 3)
            .with_mask(|u, _| !(3.9..=6.1).contains(&u));
        assert!(matches!(build_chart_manifold(spec), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn edge_symmetry_is_exact() {
        let m = build_chart_manifold(ChartSpec::flat("c", 0.0, 1.0, 0.0, 1.0, 9, 9)).unwrap();
        for p in 0..m.node_count() as NodeId {
            for (q, l) in m.neighbors(p) {
                assert_eq!(m.edge_len(q, p), Some(l));
            }
        }
    }

    /// Independent hand-count oracle for gluing two 3x3 charts along a full
    /// 3-node column: the result is combinatorially a 5x3 grid.
    #[test]
    fn glue_two_patches_counts() {
        let a = build_chart_manifold(ChartSpec::flat("a", 0.0, 1.0, 0.0, 1.0, 3, 3)).unwrap();
        let b = build_chart_manifold(ChartSpec::flat("b", 1.0, 2.0, 0.0, 1.0, 3, 3)).unwrap();
        let a_right: Vec<NodeId> = (0..3).map(|j| a.node_at(0, 2, j).unwrap()).collect();
        let b_left: Vec<NodeId> = (0..3).map(|j| b.node_at(0, 0, j).unwrap()).collect();
        let g = glue(
            &[a, b],
            &[Seam { a_part: 0, a_nodes: a_right, b_part: 1, b_nodes: b_left }],
        )
        .unwrap();
        assert_eq!(g.node_count(), 15); // 9 + 9 - 3

        // Hand-count oracle: edge counts equal the sum of the two patches
        // minus the seam overlap (the shared column's 2 vertical edges).
        let per_patch = {
            let mut count = 0usize;
            for j in 0..3i64 {
                for i in 0..3i64 {
                    for &(du, dv) in &HALF_MOVES {
                        let (ii, jj) = (i + du, j + dv);
                        if (0..3).contains(&ii) && (0..3).contains(&jj) {
                            count += 1;
                        }
                    }
                }
            }
            count
        };
        assert_eq!(per_patch, 28);
        assert_eq!(g.edge_count(), 2 * per_patch - 2);
    }

    #[test]
    fn glue_mismatched_seam_rejected() {
        let a = build_chart_manifold(ChartSpec::flat("a", 0.0, 1.0, 0.0, 1.0, 3, 3)).unwrap();
        let b = build_chart_manifold(ChartSpec::flat("b", 1.0, 2.0, 0.0, 1.0, 4, 4)).unwrap();
        let a_right: Vec<NodeId> = (0..3).map(|j| a.node_at(0, 2, j).unwrap()).collect();
        let b_left: Vec<NodeId> = (0..4).map(|j| b.node_at(0, 0, j).unwrap()).collect();
        let r = glue(
            &[a, b],
            &[Seam { a_part: 0, a_nodes: a_right, b_part: 1, b_nodes: b_left }],
        );
        assert!(matches!(r, Err(Error::SeamMismatch { left: 3, right: 4 })));
    }

    #[test]
    fn margin_zero_on_cut_and_radius_at_center() {
        let n = 33;
        let m = build_chart_manifold(ChartSpec::flat("c", -1.0, 1.0, -1.0, 1.0, n, n)).unwrap();
        let corner = m.node_at(0, 0, 0).unwrap();
        assert_eq!(m.margin()[corner as usize], 0.0);
        let center = m.node_at(0, n / 2, n / 2).unwrap();
        let got = m.margin()[center as usize];
        // center-to-edge distance is 1 up to the stencil bound
        assert!((got - 1.0).abs() < 0.03, "margin at center: {got}");
        assert!((m.window_radius() - got).abs() < 1e-12);
    }

    #[test]
    fn compact_chart_has_infinite_margin() {
        let spec = ChartSpec::flat("torus", 0.0, 1.0, 0.0, 1.0, 8, 8).periodic_u();
        let mut spec = spec;
        spec.periodic_v = true;
        let m = build_chart_manifold(spec).unwrap();
        assert!(m.margin().iter().all(|&x| x == f64::INFINITY));
    }

    /// Axis-aligned path lengths are exact for constant metrics, so doubling
    /// the resolution leaves them unchanged.
    #[test]
    fn refinement_keeps_axis_lengths_exact() {
        for n in [9usize, 17] {
            let m = build_chart_manifold(ChartSpec::flat("c", 0.0, 1.0, 0.0, 1.0, n, n)).unwrap();
            let h = 1.0 / (n - 1) as f64;
            let mut total = 0.0;
            for i in 0..n - 1 {
                let a = m.node_at(0, i, 0).unwrap();
                let b = m.node_at(0, i + 1, 0).unwrap();
                total += m.edge_len(a, b).unwrap();
                let _ = h;
            }
            assert!((total - 1.0).abs() < 1e-9, "axis path at n={n}: {total}");
        }
    }
}
