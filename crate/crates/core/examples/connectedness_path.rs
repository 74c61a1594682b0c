//! The min-interpolation path between the two cylinder end classes:
//! f_t = min{u + t, v} walks from one boundary point to the other, staying
//! 1-Lipschitz in t under the quotient metric, with a ridge circle that
//! sweeps across the cylinder.
//!
//! ```text
//! cargo run --release --example connectedness_path
//! ```

use horolab::ideal_boundary::{connect_path, rho_quotient};
use horolab::scenarios::scenario;
use horolab::viscosity::singular_set;

fn main() -> horolab::Result<()> {
    let sc = scenario("cylinder", 129)?;
    let m = &sc.manifold;
    let e = sc.exhaustion()?;
    let battery = sc.battery()?;
    let up = &battery[0].field;
    let down = &battery[1].field;

    let probe = connect_path(m, down, up, &[0.0], &e)?;
    println!("saturation interval: t_lo = {:.3}, t_hi = {:.3}", probe.t_lo, probe.t_hi);

    let ts: Vec<f64> = (0..=8)
        .map(|k| probe.t_lo - 0.2 + (probe.t_hi - probe.t_lo + 0.4) * k as f64 / 8.0)
        .collect();
    let path = connect_path(m, down, up, &ts, &e)?;

    println!();
    println!("t        rho~(f_t, down)  rho~(f_t, up)   ridge nodes (mean height)");
    for (t, f) in path.ts.iter().zip(&path.fields) {
        let d_down = rho_quotient(f, down, &e)?.value;
        let d_up = rho_quotient(f, up, &e)?.value;
        let ridge = singular_set(m, f);
        let mean_v = if ridge.nodes.is_empty() {
            f64::NAN
        } else {
            ridge.nodes.iter().map(|&p| m.coords(p).1).sum::<f64>() / ridge.nodes.len() as f64
        };
        println!(
            "{t:+.3}   {d_down:.6}         {d_up:.6}        {:5}  ({mean_v:+.3})",
            ridge.nodes.len()
        );
    }
    Ok(())
}
