//! A numerical laboratory for distance-like functions on discretized
//! non-compact surfaces.
//!
//! The crate builds complete surfaces (plane, cylinder, capped half-cylinder,
//! three-ended "pants") as metric-weighted graphs, computes distance fields,
//! Busemann functions, horofunctions and general distance-like (dl) limits on
//! them, and checks the properties that characterize viscosity solutions of
//! the eikonal equation `|∇u|_g = 1`:
//!
//! * unit upwind gradient on regular nodes ([`viscosity::eikonal_residual`]),
//! * semiconcavity along minimal segments ([`viscosity::semiconcavity_probe`]),
//! * stability under pointwise minima ([`viscosity::min_combine`]),
//! * reconstruction from sublevel sets ([`viscosity::levelset_reconstruct`]).
//!
//! On top of the field layer sit the function-space metric `ρ` and its
//! quotient `ρ~` modulo constants ([`ideal_boundary`]), the end partition of
//! the surface ([`ends`]), and scenario drivers ([`scenarios`]) that bundle
//! everything into reproducible verification reports.
//!
//! Non-compactness is handled by windowed truncation: every computed field
//! carries a per-node `reliable` flag that is set only where the truncation
//! boundary provably cannot influence the value. All verification runs on the
//! graph backend, which is exact on its own metric space; a first-order
//! fast-marching backend ([`fmm`]) provides the continuum-consistent distances
//! used for closed-form comparisons on grid charts.
//!
//! See `examples/` for one runnable program per capability, and the
//! `acceptance` integration test for the full verification suite.

pub mod ends;
pub mod eikonal;
pub mod error;
pub mod fmm;
pub mod geodesics;
pub mod ideal_boundary;
pub mod limits;
pub mod manifold;
pub mod report;
pub mod scenarios;
pub mod specfile;
pub mod tol;
pub mod viscosity;

pub use error::{Error, Result};
pub use manifold::{ChartSpec, DiscreteManifold, MetricTensor, NodeId, NodeSet};
pub use eikonal::{distance_to_set, pairwise_distance, DistanceField, FieldSource, ScalarField};
