//! Distance-field computation on the graph backend, scalar fields with
//! reliability certificates, and the upwind gradient norm.
//!
//! The graph backend is exact on its own metric space: a field returned by
//! [`distance_to_set`] is the true shortest-path distance, its best descent
//! quotient is exactly 1 at every non-source node, and enlarging the window
//! never changes values at nodes that were already reliable.

use crate::error::{Error, Result};
use crate::manifold::{dijkstra_multi, dijkstra_with_pred, DiscreteManifold, NodeId, NodeSet};

/// Provenance of a scalar field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSource {
    DistanceToSet,
    Busemann,
    Horofunction,
    DistanceLike,
    MinCombination,
    External,
}

impl std::fmt::Display for FieldSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FieldSource::DistanceToSet => "distance-to-set",
            FieldSource::Busemann => "busemann",
            FieldSource::Horofunction => "horofunction",
            FieldSource::DistanceLike => "dl",
            FieldSource::MinCombination => "min-combination",
            FieldSource::External => "external",
        };
        f.write_str(s)
    }
}

/// Real values on the node set with a declared reliable region.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub values: Vec<f64>,
    pub reliable: Vec<bool>,
    pub source: FieldSource,
    pub base_node: Option<NodeId>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>, reliable: Vec<bool>, source: FieldSource) -> Self {
        ScalarField { values, reliable, source, base_node: None }
    }

    pub fn constant(m: &DiscreteManifold, value: f64) -> Self {
        ScalarField {
            values: vec![value; m.node_count()],
            reliable: vec![true; m.node_count()],
            source: FieldSource::External,
            base_node: None,
        }
    }

    pub fn from_fn(m: &DiscreteManifold, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..m.node_count() as NodeId)
            .map(|p| {
                let (u, v) = m.coords(p);
                f(u, v)
            })
            .collect();
        ScalarField {
            values,
            reliable: vec![true; m.node_count()],
            source: FieldSource::External,
            base_node: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Subtract the value at `node` so the field vanishes there exactly.
    pub fn normalize_at(&mut self, node: NodeId) {
        let v0 = self.values[node as usize];
        for v in &mut self.values {
            *v -= v0;
        }
        self.values[node as usize] = 0.0;
        self.base_node = Some(node);
    }

    pub fn reliable_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.reliable
            .iter()
            .enumerate()
            .filter_map(|(i, &r)| r.then_some(i as NodeId))
    }

    pub fn reliable_count(&self) -> usize {
        self.reliable.iter().filter(|&&r| r).count()
    }

    /// Check the edgewise 1-Lipschitz property over the reliable region.
    pub fn check_lipschitz(&self, m: &DiscreteManifold, slack: f64) -> Result<()> {
        for p in self.reliable_nodes() {
            for (q, len) in m.neighbors(p) {
                if !self.reliable[q as usize] {
                    continue;
                }
                let d = (self.values[p as usize] - self.values[q as usize]).abs();
                if d > len * (1.0 + slack) + slack * 1e-6 {
                    return Err(Error::Config(format!(
                        "field is not 1-Lipschitz on edge {p}-{q}: |df|={d}, len={len}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Sup of |self − other| over the given nodes.
    pub fn sup_diff_on(&self, other: &ScalarField, nodes: &[NodeId]) -> f64 {
        nodes
            .iter()
            .map(|&p| (self.values[p as usize] - other.values[p as usize]).abs())
            .fold(0.0, f64::max)
    }

    /// CSV export: node_id, u, v, value, reliable — ordered by node id.
    pub fn to_csv(&self, m: &DiscreteManifold) -> String {
        let mut s = String::from("node_id,u,v,value,reliable\n");
        for p in 0..self.values.len() {
            let (u, v) = m.coords(p as NodeId);
            s.push_str(&format!(
                "{},{:.9},{:.9},{:.12},{}\n",
                p, u, v, self.values[p], self.reliable[p] as u8
            ));
        }
        s
    }
}

/// A [`ScalarField`] produced as an exact distance to a node set.
#[derive(Debug, Clone)]
pub struct DistanceField {
    pub field: ScalarField,
    pub source_set: NodeSet,
}

impl std::ops::Deref for DistanceField {
    type Target = ScalarField;
    fn deref(&self) -> &ScalarField {
        &self.field
    }
}

/// Exact multi-source shortest-path distance to `K`.
///
/// A node is reliable iff its value is smaller than its margin, so no
/// shortest path can exit the window and return shorter; on the reliable
/// region the values equal the infinite-manifold distances.
pub fn distance_to_set(m: &DiscreteManifold, k: &NodeSet) -> Result<DistanceField> {
    if k.is_empty() {
        return Err(Error::EmptySource);
    }
    for p in k.iter() {
        if p as usize >= m.node_count() {
            return Err(Error::NodeOutOfRange(p as usize));
        }
    }
    let sources: Vec<NodeId> = k.iter().collect();
    let values = dijkstra_multi(m, &sources);
    let reliable: Vec<bool> = if m.has_convex_window() {
        vec![true; values.len()]
    } else {
        values.iter().zip(m.margin()).map(|(&d, &g)| d < g).collect()
    };
    Ok(DistanceField {
        field: ScalarField {
            values,
            reliable,
            source: FieldSource::DistanceToSet,
            base_node: None,
        },
        source_set: k.clone(),
    })
}

/// Distance field together with deterministic predecessors (for backtracking
/// minimal segments). Tie-break: lowest predecessor index.
pub(crate) fn distance_with_pred(m: &DiscreteManifold, k: &NodeSet) -> Result<(Vec<f64>, Vec<i64>)> {
    if k.is_empty() {
        return Err(Error::EmptySource);
    }
    let sources: Vec<NodeId> = k.iter().collect();
    Ok(dijkstra_with_pred(m, &sources))
}

/// Exact graph distance between two nodes.
pub fn pairwise_distance(m: &DiscreteManifold, x: NodeId, y: NodeId) -> f64 {
    if x == y {
        return 0.0;
    }
    // Full sweep; callers that need many distances reuse distance_to_set.
    let d = dijkstra_multi(m, &[x]);
    d[y as usize]
}

/// Per-node norm of the steepest local decrease rate:
/// max over incident edges of (f(p) − f(q))/len(p, q), clipped below at 0.
pub fn upwind_gradient_norm(m: &DiscreteManifold, f: &ScalarField) -> Vec<f64> {
    (0..m.node_count() as NodeId)
        .map(|p| {
            m.neighbors(p)
                .map(|(q, len)| (f.values[p as usize] - f.values[q as usize]) / len)
                .fold(0.0f64, f64::max)
        })
        .collect()
}

/// Best ascent and descent difference quotients at a node.
pub(crate) fn best_quotients(m: &DiscreteManifold, f: &ScalarField, p: NodeId) -> (f64, f64) {
    let mut asc = 0.0f64;
    let mut desc = 0.0f64;
    for (q, len) in m.neighbors(p) {
        let d = (f.values[q as usize] - f.values[p as usize]) / len;
        asc = asc.max(d);
        desc = desc.max(-d);
    }
    (asc, desc)
}
