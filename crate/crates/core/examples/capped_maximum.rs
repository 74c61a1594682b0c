//! The singleton-boundary surface: on the capped half-cylinder every
//! distance-like field attains its maximum deep inside the cap and is
//! singular there, so the eikonal equation has no C¹ solution.
//!
//! ```text
//! cargo run --release --example capped_maximum
//! ```

use horolab::eikonal::distance_to_set;
use horolab::manifold::NodeSet;
use horolab::scenarios::scenario;
use horolab::viscosity::singular_set;

fn main() -> horolab::Result<()> {
    let sc = scenario("capped_half_cylinder", 129)?;
    let m = &sc.manifold;
    let wr = m.window_radius();
    println!("window radius = {wr:.3}");
    println!();

    for bp in sc.boundary_sample()? {
        let f = &bp.rep;
        let argmax = f
            .reliable_nodes()
            .max_by(|&a, &b| {
                f.values[a as usize].partial_cmp(&f.values[b as usize]).unwrap().then(b.cmp(&a))
            })
            .unwrap();
        let (u, v) = m.coords(argmax);
        let margin = m.margin()[argmax as usize];
        let s = singular_set(m, f);
        let d = distance_to_set(m, &NodeSet::singleton(argmax))?;
        let gap = s.nodes.iter().map(|&p| d.values[p as usize]).fold(f64::INFINITY, f64::min);
        println!("{}:", bp.provenance);
        println!("  argmax at (u, v) = ({u:.3}, {v:.3}), margin = {margin:.3} ({:.0}% of window)", 100.0 * margin / wr);
        println!("  singular nodes   = {}, nearest at distance {gap:.4}", s.nodes.len());
    }
    Ok(())
}
