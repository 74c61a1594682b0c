//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with:
//!
//! ```text
//! cargo test --release --test acceptance -- --nocapture --test-threads 1
//! ```
//!
//! The suite runs all four scenarios at the 256-equivalent reference
//! resolution with a fixed seed. Thresholds are pinned from `horolab::tol`.

use std::sync::OnceLock;

use horolab::report::Report;
use horolab::scenarios::{
    scenario, verify_closed_form_busemann, verify_corays, verify_ends, verify_metric,
    verify_min_stability, verify_theorem1, verify_theorem2_path, verify_theorem3,
    verify_theorem4, BuiltScenario, SCENARIO_NAMES,
};

const RES: usize = 257;
const SEED: u64 = 42;

fn built(name: &str) -> &'static BuiltScenario {
    static CELLS: OnceLock<Vec<(String, BuiltScenario)>> = OnceLock::new();
    let all = CELLS.get_or_init(|| {
        SCENARIO_NAMES
            .iter()
            .map(|&n| (n.to_string(), scenario(n, RES).expect("scenario build")))
            .collect()
    });
    &all.iter().find(|(n, _)| n == name).unwrap().1
}

fn theorem1(name: &str) -> &'static Report {
    static CELL: OnceLock<Vec<(String, Report)>> = OnceLock::new();
    let all = CELL.get_or_init(|| {
        SCENARIO_NAMES
            .iter()
            .map(|&n| (n.to_string(), verify_theorem1(built(n), SEED).expect("theorem1 driver")))
            .collect()
    });
    &all.iter().find(|(n, _)| n == name).unwrap().1
}

fn announce(criterion: usize, title: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion:2} [{title}]: {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn collect<'r>(report: &'r Report, suffix: &str) -> Vec<&'r horolab::report::CheckLine> {
    report.checks.iter().filter(|c| c.check.ends_with(suffix)).collect()
}

#[test]
fn criterion_01_closed_form_busemann() {
    let report = verify_closed_form_busemann(built("plane")).expect("driver");
    let worst = report.checks.iter().map(|c| c.metric).fold(0.0f64, f64::max);
    announce(
        1,
        "closed-form busemann 0/45/90 deg",
        report.pass() && report.checks.len() == 3,
        &format!("max error {worst:.4e} vs 1e-2 x window radius"),
    );
}

#[test]
fn criterion_02_theorem1_forward() {
    let mut fields = 0usize;
    let mut ok = true;
    let mut worst_res = 0.0f64;
    let mut worst_c = 0.0f64;
    for name in SCENARIO_NAMES {
        let rep = theorem1(name);
        let residuals = collect(rep, ".residual");
        let semis = collect(rep, ".semiconcavity");
        assert_eq!(residuals.len(), semis.len());
        fields += residuals.len();
        for c in residuals {
            ok &= c.status;
            worst_res = worst_res.max(c.metric);
        }
        for c in semis {
            ok &= c.status;
            worst_c = worst_c.max(c.metric);
        }
    }
    let control = theorem1("plane")
        .checks
        .iter()
        .find(|c| c.check == "control.convex_kink_semiconcavity")
        .expect("control present");
    ok &= control.status && fields >= 10;
    announce(
        2,
        "theorem 1 forward (residual + semiconcavity)",
        ok,
        &format!(
            "{fields} fields, residual <= {worst_res:.2e}, C <= {worst_c:.2e}, control C = {:.3e} >= {:.3e}",
            control.metric, control.tolerance
        ),
    );
}

#[test]
fn criterion_03_theorem1_backward() {
    let mut ok = true;
    let mut fields = 0usize;
    let mut worst = 0.0f64;
    for name in SCENARIO_NAMES {
        for c in collect(theorem1(name), ".reconstruction") {
            fields += 1;
            ok &= c.status;
            worst = worst.max(c.metric / c.tolerance);
        }
    }
    let control = theorem1("plane")
        .checks
        .iter()
        .find(|c| c.check == "control.convex_kink_reconstruction")
        .expect("control present");
    ok &= control.status;
    announce(
        3,
        "theorem 1 backward (sublevel reconstruction)",
        ok,
        &format!("{fields} fields, worst dev/tol {worst:.3}, control rejected at every level"),
    );
}

#[test]
fn criterion_04_levelset_identity() {
    let mut ok = true;
    let mut fields = 0usize;
    let mut worst = 0.0f64;
    for name in SCENARIO_NAMES {
        for c in collect(theorem1(name), ".levelset_identity") {
            fields += 1;
            ok &= c.status;
            worst = worst.max(c.metric);
        }
    }
    announce(
        4,
        "level-set distance identity",
        ok && fields >= 10,
        &format!("{fields} fields x 3 pairs, worst dev/tol {worst:.3}"),
    );
}

#[test]
fn criterion_05_min_stability() {
    let mut ok = true;
    for name in SCENARIO_NAMES {
        let rep = verify_min_stability(built(name), SEED).expect("driver");
        ok &= rep.pass();
    }
    announce(5, "min-stability, exact min algebra", ok, "5 seeded pairs per scenario");
}

#[test]
fn criterion_06_metric_suite() {
    let mut ok = true;
    let mut worst_sym = 0.0f64;
    let mut worst_shift = 0.0f64;
    for name in SCENARIO_NAMES {
        let rep = verify_metric(built(name)).expect("driver");
        ok &= rep.pass();
        for c in &rep.checks {
            if c.check == "rho.symmetry" {
                worst_sym = worst_sym.max(c.metric);
            }
            if c.check == "rho_quotient.shift_invariance" {
                worst_shift = worst_shift.max(c.metric);
            }
        }
    }
    announce(
        6,
        "metric suite (symmetry, triangle, shift invariance)",
        ok,
        &format!("symmetry <= {worst_sym:.2e}, shift invariance <= {worst_shift:.2e}"),
    );
}

#[test]
fn criterion_07_theorem2_path() {
    let rep = verify_theorem2_path(built("cylinder")).expect("driver");
    announce(
        7,
        "theorem 2 connectedness path",
        rep.pass(),
        &format!(
            "checks: {}",
            rep.checks.iter().map(|c| c.check.as_str()).collect::<Vec<_>>().join(", ")
        ),
    );
}

#[test]
fn criterion_08_end_counts() {
    let expected = [("plane", 1usize), ("capped_half_cylinder", 1), ("cylinder", 2), ("pants", 3)];
    let mut ok = true;
    let mut got = Vec::new();
    for (name, want) in expected {
        let ends = built(name).ends().expect("end partition");
        let count = ends.stabilized_count;
        got.push(format!("{name}={count:?}"));
        ok &= count == Some(want);
    }
    announce(8, "end partitions stabilize to 1/1/2/3", ok, &got.join(" "));
}

#[test]
fn criterion_09_coray_cofinality() {
    let mut ok = true;
    let mut detail = Vec::new();
    for name in SCENARIO_NAMES {
        let rep = verify_corays(built(name), SEED).expect("driver");
        ok &= rep.pass();
        detail.push(format!("{name}:{}", if rep.pass() { "ok" } else { "violations" }));
    }
    announce(9, "corays are cofinal (8 seeded starts per ray)", ok, &detail.join(" "));
}

#[test]
fn criterion_10_ends_leq_clusters() {
    let expected = [("plane", 1usize, 4usize), ("cylinder", 2, 2), ("pants", 3, 3), ("capped_half_cylinder", 1, 1)];
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, ends_want, clusters_want) in expected {
        let rep = verify_ends(built(name)).expect("driver");
        let clusters = rep
            .checks
            .iter()
            .find(|c| c.check == "ends_leq_clusters")
            .map(|c| c.metric as usize)
            .unwrap_or(0);
        let pass = rep.pass() && clusters == clusters_want;
        ok &= pass;
        detail.push(format!("{name}: {ends_want} <= {clusters}"));
    }
    announce(10, "stabilized ends <= boundary clusters", ok, &detail.join(", "));
}

#[test]
fn criterion_11_theorem3_capped() {
    let rep = verify_theorem3(built("capped_half_cylinder")).expect("driver");
    let detail: Vec<String> =
        rep.checks.iter().map(|c| format!("{}={}", c.check, c.status)).collect();
    announce(11, "theorem 3 on the capped half-cylinder", rep.pass(), &detail.join(" "));
}

#[test]
fn criterion_12_theorem4_pants() {
    let rep = verify_theorem4(built("pants"), SEED).expect("driver");
    let family = rep
        .checks
        .iter()
        .find(|c| c.check == "family_singular_nonempty")
        .expect("family check");
    // non-vacuity control: the plane's linear field has an empty singular set
    let control = theorem1("plane")
        .checks
        .iter()
        .find(|c| c.check == "control.linear_singular_empty")
        .expect("plane control");
    announce(
        12,
        "theorem 4 on the pants (min-closure singular sets)",
        rep.pass() && family.status && control.status,
        &format!("{} | plane linear control empty: {}", family.detail, control.status),
    );
}

#[test]
fn criterion_13_determinism() {
    // two independent low-resolution runs of the full driver set must emit
    // byte-identical reports
    fn full_run() -> String {
        let mut out = String::new();
        for name in SCENARIO_NAMES {
            let sc = scenario(name, 65).expect("build");
            out.push_str(&verify_theorem1(&sc, SEED).expect("t1").to_text());
            out.push_str(&verify_min_stability(&sc, SEED).expect("min").to_text());
            out.push_str(&verify_metric(&sc).expect("metric").to_text());
            out.push_str(&verify_ends(&sc).expect("ends").to_text());
            out.push_str(&verify_corays(&sc, SEED).expect("corays").to_text());
            match name {
                "cylinder" => out.push_str(&verify_theorem2_path(&sc).expect("t2").to_text()),
                "capped_half_cylinder" => out.push_str(&verify_theorem3(&sc).expect("t3").to_text()),
                "pants" => out.push_str(&verify_theorem4(&sc, SEED).expect("t4").to_text()),
                _ => {}
            }
        }
        out
    }
    let a = full_run();
    let b = full_run();
    announce(
        13,
        "determinism (same seed, byte-identical reports)",
        a == b,
        &format!("{} report bytes", a.len()),
    );
}
