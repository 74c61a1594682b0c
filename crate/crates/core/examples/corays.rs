//! Corays and cofinality: minimal segments aimed at escaping points along a
//! ray stabilize into corays, and every coray lands in the same end as the
//! ray it chases — including from starts in the other legs of the pants.
//!
//! ```text
//! cargo run --release --example corays
//! ```

use horolab::ends::verify_coray_cofinality;
use horolab::geodesics::coray;
use horolab::scenarios::scenario;

fn main() -> horolab::Result<()> {
    let sc = scenario("pants", 97)?;
    let m = &sc.manifold;
    let ends = sc.ends()?;
    let rays = sc.rays()?;

    // one explicit trace: a start deep in leg B chasing the leg-A ray
    let (_, ray_a) = &rays[0];
    let start = m.node_at(0, sc.manifold.grid_pos(sc.base).unwrap().i, 50).unwrap();
    let c = coray(m, ray_a, start)?;
    let r = c.primary();
    let (u0, v0) = m.coords(start);
    let (u1, v1) = m.coords(*r.path.nodes.last().unwrap());
    println!("coray from ({u0:.2}, {v0:.2}) chasing the leg-A ray:");
    println!("  certified span {:.3}, terminal at ({u1:.2}, {v1:.2})", r.certified_span);
    println!("  branches: {}, multiplicity flagged: {}", c.rays.len(), c.multiple);
    println!("  path CSV (first rows):");
    for line in r.path.to_csv(m).lines().take(4) {
        println!("    {line}");
    }
    println!();

    let starts = sc.seeded_starts(42, 8);
    for (name, ray) in &rays {
        let rep = verify_coray_cofinality(m, ray, &starts, &ends)?;
        println!("{name}: {}", rep.to_text().replace('\n', "  "));
    }
    Ok(())
}
