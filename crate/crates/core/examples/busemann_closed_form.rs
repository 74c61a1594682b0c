//! Busemann functions on the flat window, two ways.
//!
//! The graph backend converges to the Busemann function of the gauge metric,
//! which carries the anisotropy crease −u + (√5−2)|v| along an axis ray; the
//! fast-marching backend converges to the continuum form −u. This example
//! computes both and prints their deviation from each closed form.
//!
//! ```text
//! cargo run --release --example busemann_closed_form
//! ```

use horolab::geodesics::trace_ray;
use horolab::limits::{busemann, Backend, LimitOptions};
use horolab::manifold::NodeId;
use horolab::scenarios::scenario;
use horolab::tol::AXIS_TRANSVERSE_EXCESS;

fn main() -> horolab::Result<()> {
    let sc = scenario("plane", 129)?;
    let m = &sc.manifold;
    let pos = m.grid_pos(sc.base).unwrap();
    let targets: Vec<NodeId> = [0.6, 0.75, 0.85, 0.95]
        .iter()
        .map(|&t| {
            let k = (t / sc.h).round() as usize;
            m.node_at(0, pos.i + k, pos.j).unwrap()
        })
        .collect();
    let ray = trace_ray(m, sc.base, &targets)?;

    let (graph_field, graph_rep) = busemann(m, &ray, sc.base, LimitOptions::default())?;
    let mut crease_dev = 0.0f64;
    for p in graph_field.reliable_nodes() {
        let (u, v) = m.coords(p);
        let gauge_form = -u + AXIS_TRANSVERSE_EXCESS * v.abs();
        crease_dev = crease_dev.max((graph_field.values[p as usize] - gauge_form).abs());
    }
    println!("graph backend:");
    println!("  converged          = {}", graph_rep.converged);
    println!("  settled nodes      = {}", graph_field.reliable_count());
    println!("  dev from gauge form -u + (sqrt5-2)|v|  = {crease_dev:.2e}");

    let opts = LimitOptions {
        backend: Backend::FastMarch { exact_init_radius: 16.0 * sc.h },
        limit_tol: Some(2e-3),
    };
    let (fmm_field, fmm_rep) = busemann(m, &ray, sc.base, opts)?;
    let mut cont_dev = 0.0f64;
    for p in fmm_field.reliable_nodes() {
        let (u, _) = m.coords(p);
        cont_dev = cont_dev.max((fmm_field.values[p as usize] - (-u)).abs());
    }
    println!("fast-marching backend:");
    println!("  converged          = {}", fmm_rep.converged);
    println!("  settled nodes      = {}", fmm_field.reliable_count());
    println!("  dev from continuum form -u             = {cont_dev:.2e}");
    println!();
    println!("limit report (fmm):\n{}", fmm_rep.to_text());
    Ok(())
}
