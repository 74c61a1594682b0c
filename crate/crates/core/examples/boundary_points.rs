//! Ideal-boundary points of the cylinder: dl-functions from circle sets,
//! horofunctions from point sequences, their pairwise quotient distances,
//! and the single-linkage clustering that recovers the two ends.
//!
//! ```text
//! cargo run --release --example boundary_points
//! ```

use horolab::ideal_boundary::cluster_boundary;
use horolab::scenarios::scenario;

fn main() -> horolab::Result<()> {
    let sc = scenario("cylinder", 129)?;
    let e = sc.exhaustion()?;
    let sample = sc.boundary_sample()?;

    println!("boundary sample:");
    for bp in &sample {
        println!("  {}", bp.provenance);
    }

    let clusters = cluster_boundary(&sample, &e, sc.meta.eps)?;
    println!();
    println!("pairwise rho~ matrix:");
    print!("{}", clusters.dist_csv());
    println!();
    println!("clusters at eps = {}: {}", sc.meta.eps, clusters.count());
    for (k, members) in clusters.clusters.iter().enumerate() {
        let names: Vec<&str> = members.iter().map(|&i| sample[i].provenance.as_str()).collect();
        println!("  cluster {k}: {}", names.join(", "));
    }
    Ok(())
}
