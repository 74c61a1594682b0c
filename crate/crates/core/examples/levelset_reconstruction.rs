//! Rebuilding a field from its own sublevel sets: for distance-like fields
//! d(·, {f ≤ −n}) − d(x0, {f ≤ −n}) reproduces f − f(x0) up to the stencil
//! budget at every depth, while the convex-kink control +|u| has no receding
//! sublevels at all.
//!
//! ```text
//! cargo run --release --example levelset_reconstruction
//! ```

use horolab::eikonal::ScalarField;
use horolab::scenarios::{field_escape_depth, scenario};
use horolab::tol::reconstruction_tol;
use horolab::viscosity::{levelset_distance_check, levelset_reconstruct};

fn main() -> horolab::Result<()> {
    let sc = scenario("cylinder", 129)?;
    let m = &sc.manifold;
    let battery = sc.battery()?;
    let tol = reconstruction_tol(m.window_radius(), sc.h);

    for bf in &battery {
        let depth = field_escape_depth(m, &bf.field);
        println!("{} (escape depth {depth:.3}):", bf.name);
        for frac in [0.2, 0.4, 0.8] {
            let n = frac * depth;
            let (_, dev) = levelset_reconstruct(m, &bf.field, sc.base, n)?;
            println!("  n = {n:.3}: reconstruction deviation {dev:.2e} (tol {tol:.2e})");
        }
        let dev = levelset_distance_check(m, &bf.field, -0.15 * depth, -0.5 * depth)?;
        println!("  level-set distance identity deviation {dev:.2e}");
    }

    println!();
    let control = ScalarField::from_fn(m, |_, v| v.abs());
    for n in [0.2, 0.4, 0.8] {
        match levelset_reconstruct(m, &control, sc.base, n) {
            Err(e) => println!("control +|v| at n = {n}: rejected ({e})"),
            Ok((_, dev)) => println!("control +|v| at n = {n}: deviation {dev:.2e}"),
        }
    }
    Ok(())
}
