//! Run every verification driver on every scenario and print the full
//! structured reports (the same drivers the acceptance suite pins down).
//!
//! ```text
//! cargo run --release --example verify_all            # summary lines
//! cargo run --release --example verify_all -- --full  # full report text
//! ```

use horolab::report::Report;
use horolab::scenarios::{
    scenario, verify_closed_form_busemann, verify_corays, verify_ends, verify_metric,
    verify_min_stability, verify_theorem1, verify_theorem2_path, verify_theorem3,
    verify_theorem4,
};

fn main() -> horolab::Result<()> {
    let full = std::env::args().any(|a| a == "--full");
    let seed = 42;
    let res = 129;
    let mut failures = 0usize;
    for name in ["plane", "cylinder", "capped_half_cylinder", "pants"] {
        let sc = scenario(name, res)?;
        let mut reports: Vec<Report> = vec![
            verify_theorem1(&sc, seed)?,
            verify_min_stability(&sc, seed)?,
            verify_metric(&sc)?,
            verify_ends(&sc)?,
            verify_corays(&sc, seed)?,
        ];
        match name {
            "plane" => reports.push(verify_closed_form_busemann(&sc)?),
            "cylinder" => reports.push(verify_theorem2_path(&sc)?),
            "capped_half_cylinder" => reports.push(verify_theorem3(&sc)?),
            "pants" => reports.push(verify_theorem4(&sc, seed)?),
            _ => {}
        }
        for r in &reports {
            if full {
                print!("{}", r.to_text());
            } else {
                println!("{:<40} {}", r.title, if r.pass() { "pass" } else { "FAIL" });
            }
            if !r.pass() {
                failures += 1;
            }
        }
    }
    if failures > 0 {
        println!("{failures} report(s) failed");
        std::process::exit(1);
    }
    Ok(())
}
