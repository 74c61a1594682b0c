//! Three ends force singularities: on the pants surface every field in the
//! min-closure of the three end fields has a nonempty singular set, while
//! the one-ended plane admits exactly-linear fields with none.
//!
//! ```text
//! cargo run --release --example pants_singular
//! ```

use horolab::eikonal::ScalarField;
use horolab::scenarios::scenario;
use horolab::viscosity::{min_combine, singular_set};

fn main() -> horolab::Result<()> {
    let sc = scenario("pants", 97)?;
    let m = &sc.manifold;
    let battery = sc.battery()?;

    println!("field                 singular nodes   one witness (u, v)");
    for bf in &battery {
        let s = singular_set(m, &bf.field);
        let witness = s
            .nodes
            .first()
            .map(|&p| {
                let (u, v) = m.coords(p);
                format!("({u:+.2}, {v:+.2})")
            })
            .unwrap_or_else(|| "-".into());
        println!("{:<22}{:>8}          {witness}", bf.name, s.nodes.len());
    }

    // shifted pairwise minima keep the ridge inside the core
    let fa = &battery[0].field;
    let fb = &battery[1].field;
    println!();
    for shift in [-0.3, 0.0, 0.3] {
        let mut shifted = fa.clone();
        for v in &mut shifted.values {
            *v += shift;
        }
        let fd = min_combine(&shifted, fb)?;
        let s = singular_set(m, &fd);
        println!("min(f_a {shift:+.2}, f_b): {} singular nodes", s.nodes.len());
    }

    // non-vacuity: the same detector finds nothing on a linear plane field
    let plane = scenario("plane", 97)?;
    let linear = ScalarField::from_fn(&plane.manifold, |u, _| -u);
    let s = singular_set(&plane.manifold, &linear);
    println!();
    println!("plane linear control: {} singular nodes", s.nodes.len());
    Ok(())
}
