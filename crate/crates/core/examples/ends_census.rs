//! End partitions of all four scenario surfaces: flood-fill components of
//! ball complements, their refinement maps, and the stabilized end counts
//! (plane 1, capped 1, cylinder 2, pants 3).
//!
//! ```text
//! cargo run --release --example ends_census
//! ```

use horolab::scenarios::{scenario, SCENARIO_NAMES};

fn main() -> horolab::Result<()> {
    for name in SCENARIO_NAMES {
        let sc = scenario(name, 97)?;
        let ends = sc.ends()?;
        println!("== {name} ({} nodes)", sc.manifold.node_count());
        print!("{}", ends.to_text());

        // classify the canonical rays by end label at the largest radius
        let last = ends.radii.len() - 1;
        for (label, ray) in sc.rays()? {
            match ends.tail_label(&ray, last) {
                Some(l) => println!("ray {label} -> end component {l}"),
                None => println!("ray {label} -> tail inside the ball"),
            }
        }
        println!();
    }
    Ok(())
}
