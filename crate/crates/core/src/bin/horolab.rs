//! Command-line front end: build manifolds from named scenarios or spec
//! files, run distance and boundary-function solvers, export fields, and run
//! the verification drivers.
//!
//! Exit codes: 0 success / all checks passed; 1 a verification check failed;
//! 2 usage, configuration or unsupported pairing; 3 a limit did not converge.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use horolab::eikonal::{distance_to_set, DistanceField};
use horolab::error::Error;
use horolab::limits::{busemann, dl_function, horofunction, Backend, LimitOptions};
use horolab::manifold::{DiscreteManifold, NodeId, NodeSet};
use horolab::report::Report;
use horolab::scenarios::{
    scenario, verify_closed_form_busemann, verify_corays, verify_ends, verify_metric,
    verify_min_stability, verify_theorem1, verify_theorem2_path, verify_theorem3,
    verify_theorem4, BuiltScenario,
};
use horolab::specfile::parse_manifold;
use horolab::tol::Tolerances;

#[derive(Parser)]
#[command(
    name = "horolab",
    about = "Distance-like fields and ideal-boundary experiments on discretized surfaces",
    after_help = "Verification drivers pin their thresholds from the tolerance table \
                  (see --help-tolerances); --tol-* flags apply to the direct field commands."
)]
struct Cli {
    /// Print the tolerance table and exit.
    #[arg(long)]
    help_tolerances: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Clone)]
struct Common {
    /// Named scenario: plane | cylinder | capped_half_cylinder | pants.
    #[arg(long)]
    scenario: Option<String>,
    /// Manifold spec file (alternative to --scenario).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Per-axis resolution of the reference window.
    #[arg(long, default_value_t = 129)]
    resolution: usize,
    /// Half-width of the plane window (plane scenario only).
    #[arg(long)]
    window: Option<f64>,
    /// Output directory for CSV and report files (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for sampled start points and probe segments.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Override the limit tolerance (fraction of the window radius).
    #[arg(long)]
    tol_limit: Option<f64>,
    /// Override the regular/singular classification tolerance.
    #[arg(long)]
    tol_grad: Option<f64>,
    /// Override the ray certification tolerance per unit span.
    #[arg(long)]
    tol_ray: Option<f64>,
    /// Override the quotient-metric shift search tolerance.
    #[arg(long)]
    tol_shift: Option<f64>,
    /// Override the clustering threshold.
    #[arg(long)]
    tol_eps: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Distance field to a source set; writes CSV and a reliability summary.
    Dist {
        #[command(flatten)]
        common: Common,
        /// Source set: grid:I,J | node:ID[,ID..] | ball:R | circle:V
        #[arg(long)]
        source: Option<String>,
    },
    /// Busemann function of a ray from the scenario base.
    Busemann {
        #[command(flatten)]
        common: Common,
        /// Ray direction in degrees (plane: multiples of 45).
        #[arg(long)]
        direction: Option<f64>,
        /// Ray label for non-plane scenarios (up, down, near, far, a, b, c).
        #[arg(long)]
        end: Option<String>,
        /// Distance backend: graph (default) or fmm.
        #[arg(long, default_value = "graph")]
        backend: String,
    },
    /// Horofunction of an escaping point sequence along a scenario ray.
    Horo {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        direction: Option<f64>,
        #[arg(long)]
        end: Option<String>,
    },
    /// Distance-like function of escaping sets (lines or circles).
    Dl {
        #[command(flatten)]
        common: Common,
        /// Set family: lines (plane) or circles (cylinder, capped, pants legs).
        #[arg(long, default_value = "circles")]
        sets: String,
        /// Which end the sets escape to (east, west, north, south, up, down, a, b, c).
        #[arg(long)]
        end: Option<String>,
    },
    /// Run a verification driver: theorem1 | theorem2 | theorem3 | theorem4 |
    /// ends | metric | corays | min | busemann.
    Verify {
        which: String,
        #[command(flatten)]
        common: Common,
    },
    /// Describe a manifold: node/edge counts, window radius, end labels.
    Describe {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.help_tolerances {
        print!("{}", Tolerances::default().table());
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (see --help)");
        return ExitCode::from(2);
    };
    match run(command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::NotConverged(_) | Error::NotEscaping => 3,
        _ => 2,
    }
}

enum Built {
    Scenario(BuiltScenario),
    File(DiscreteManifold),
}

impl Built {
    fn manifold(&self) -> &DiscreteManifold {
        match self {
            Built::Scenario(s) => &s.manifold,
            Built::File(m) => m,
        }
    }
}

fn build(common: &Common) -> Result<Built, Error> {
    for (name, value) in [
        ("--tol-limit", common.tol_limit),
        ("--tol-grad", common.tol_grad),
        ("--tol-ray", common.tol_ray),
        ("--tol-shift", common.tol_shift),
        ("--tol-eps", common.tol_eps),
    ] {
        if let Some(v) = value {
            if !(v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
    }
    match (&common.scenario, &common.spec) {
        (Some(_), Some(_)) => {
            Err(Error::Config("--scenario and --spec are mutually exclusive".into()))
        }
        (Some(name), None) => {
            if common.window.is_some() && name != "plane" {
                return Err(Error::Config("--window applies to the plane scenario only".into()));
            }
            if let (Some(w), "plane") = (common.window, name.as_str()) {
                let res = common.resolution;
                let mut m = horolab::manifold::build_chart_manifold(
                    horolab::manifold::ChartSpec::flat("plane", -w, w, -w, w, res, res),
                )?;
                m.declare_convex_window();
                let base = m.node_at(0, res / 2, res / 2).unwrap();
                let meta = scenario("plane", res.max(17))?.meta;
                return Ok(Built::Scenario(BuiltScenario {
                    manifold: m,
                    meta,
                    base,
                    h: 2.0 * w / (res - 1) as f64,
                }));
            }
            Ok(Built::Scenario(scenario(name, common.resolution)?))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            Ok(Built::File(parse_manifold(&text)?))
        }
        (None, None) => Err(Error::Config("one of --scenario or --spec is required".into())),
    }
}

fn emit(common: &Common, name: &str, contents: &str) -> Result<(), Error> {
    match &common.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), contents)?;
            Ok(())
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn parse_source(built: &Built, text: &str) -> Result<NodeSet, Error> {
    let m = built.manifold();
    let (kind, rest) = text
        .split_once(':')
        .ok_or(Error::Config(format!("source must be kind:args, got `{text}`")))?;
    match kind {
        "grid" => {
            let (i, j) = rest
                .split_once(',')
                .ok_or(Error::Config("grid source needs I,J".into()))?;
            let i: usize = i.trim().parse().map_err(|_| Error::Config("bad grid index".into()))?;
            let j: usize = j.trim().parse().map_err(|_| Error::Config("bad grid index".into()))?;
            let node = m.node_at(0, i, j).ok_or(Error::NodeOutOfRange(i + j))?;
            NodeSet::new(vec![node])
        }
        "node" => {
            let ids: Result<Vec<NodeId>, _> = rest.split(',').map(|s| s.trim().parse()).collect();
            let ids = ids.map_err(|_| Error::Config("bad node id list".into()))?;
            for &p in &ids {
                if p as usize >= m.node_count() {
                    return Err(Error::NodeOutOfRange(p as usize));
                }
            }
            NodeSet::new(ids)
        }
        "ball" => {
            let r: f64 = rest.parse().map_err(|_| Error::Config("bad ball radius".into()))?;
            let base = match built {
                Built::Scenario(s) => s.base,
                Built::File(_) => 0,
            };
            let d = distance_to_set(m, &NodeSet::singleton(base))?;
            NodeSet::new(
                (0..m.node_count() as NodeId).filter(|&p| d.values[p as usize] <= r).collect(),
            )
        }
        "circle" => {
            let v: f64 = rest.parse().map_err(|_| Error::Config("bad circle height".into()))?;
            let info = &m.charts()[0];
            let j = ((v - info.v0) / info.hv).round() as usize;
            let nodes: Vec<NodeId> = (0..info.nu).filter_map(|i| m.node_at(0, i, j)).collect();
            NodeSet::new(nodes)
        }
        other => Err(Error::Config(format!("unknown source kind `{other}`"))),
    }
}

fn reliability_summary(m: &DiscreteManifold, df: &DistanceField) -> String {
    let reliable = df.reliable.iter().filter(|&&r| r).count();
    let mut s = String::new();
    s.push_str(&format!("nodes = {}\n", m.node_count()));
    s.push_str(&format!("reliable = {reliable}\n"));
    s.push_str(&format!("window_radius = {:.6}\n", m.window_radius()));
    s
}

/// Scenario ray selected by direction (plane) or end label.
fn pick_ray(
    sc: &BuiltScenario,
    direction: Option<f64>,
    end: Option<&str>,
) -> Result<horolab::geodesics::Ray, Error> {
    if sc.meta.name == "plane" {
        let deg = direction.ok_or(Error::Config("plane rays need --direction".into()))?;
        let m = &sc.manifold;
        let step = (deg / 45.0).round() as i64;
        if (deg - step as f64 * 45.0).abs() > 1e-9 {
            return Err(Error::Config("plane directions are multiples of 45 degrees".into()));
        }
        let (du, dv) = [(1i64, 0i64), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]
            [step.rem_euclid(8) as usize];
        let pos = m.grid_pos(sc.base).unwrap();
        let norm = ((du * du + dv * dv) as f64).sqrt();
        let steplen = sc.h * norm;
        let targets: Vec<NodeId> = [0.6, 0.75, 0.85, 0.95]
            .iter()
            .filter_map(|&t| {
                let k = (t / steplen).round() as i64;
                let i = pos.i as i64 + k * du;
                let j = pos.j as i64 + k * dv;
                if i < 0 || j < 0 {
                    return None;
                }
                m.node_at(0, i as usize, j as usize)
            })
            .collect();
        return horolab::geodesics::trace_ray(m, sc.base, &targets);
    }
    let label = end.ok_or(Error::Config("non-plane rays need --end".into()))?;
    let rays = sc.rays()?;
    rays.into_iter()
        .find(|(name, _)| name.ends_with(&format!("_{label}")))
        .map(|(_, r)| r)
        .ok_or(Error::Config(format!("no ray labelled `{label}` in {}", sc.meta.name)))
}

fn scenario_only(built: Built) -> Result<BuiltScenario, Error> {
    match built {
        Built::Scenario(s) => Ok(s),
        Built::File(_) => Err(Error::Config("this command needs --scenario".into())),
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Dist { common, source } => {
            let built = build(&common)?;
            let Some(source) = source else {
                return Err(Error::Config(
                    "--source is required (grid:I,J | node:IDS | ball:R | circle:V)".into(),
                ));
            };
            let k = parse_source(&built, &source)?;
            let m = built.manifold();
            let df = distance_to_set(m, &k)?;
            emit(&common, "dist.csv", &df.to_csv(m))?;
            emit(&common, "dist_summary.txt", &reliability_summary(m, &df))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Busemann { common, direction, end, backend } => {
            let sc = scenario_only(build(&common)?)?;
            let ray = pick_ray(&sc, direction, end.as_deref())?;
            let backend = match backend.as_str() {
                "graph" => Backend::Graph,
                "fmm" => Backend::FastMarch { exact_init_radius: 16.0 * sc.h },
                other => return Err(Error::Config(format!("unknown backend `{other}`"))),
            };
            let opts = LimitOptions {
                backend,
                limit_tol: common.tol_limit.map(|t| t * sc.manifold.window_radius()),
            };
            let (f, rep) = busemann(&sc.manifold, &ray, sc.base, opts)?;
            emit(&common, "busemann.csv", &f.to_csv(&sc.manifold))?;
            emit(&common, "busemann_report.txt", &rep.to_text())?;
            Ok(if rep.converged { ExitCode::SUCCESS } else { ExitCode::from(3) })
        }
        Command::Horo { common, direction, end } => {
            let sc = scenario_only(build(&common)?)?;
            let ray = pick_ray(&sc, direction, end.as_deref())?;
            let span = ray.certified_span;
            let seq: Vec<NodeId> =
                [0.125, 0.25, 0.5, 1.0].iter().map(|&f| ray.snap(f * span).0).collect();
            let opts = LimitOptions {
                backend: Backend::Graph,
                limit_tol: common.tol_limit.map(|t| t * sc.manifold.window_radius()),
            };
            let (f, rep) = horofunction(&sc.manifold, &seq, sc.base, opts)?;
            emit(&common, "horofunction.csv", &f.to_csv(&sc.manifold))?;
            emit(&common, "horofunction_report.txt", &rep.to_text())?;
            Ok(if rep.converged { ExitCode::SUCCESS } else { ExitCode::from(3) })
        }
        Command::Dl { common, sets, end } => {
            let sc = scenario_only(build(&common)?)?;
            let sets = scenario_dl_sets(&sc, &sets, end.as_deref())?;
            let opts = LimitOptions {
                backend: Backend::Graph,
                limit_tol: common.tol_limit.map(|t| t * sc.manifold.window_radius()),
            };
            let (f, rep) = dl_function(&sc.manifold, &sets, sc.base, opts)?;
            emit(&common, "dl.csv", &f.to_csv(&sc.manifold))?;
            emit(&common, "dl_report.txt", &rep.to_text())?;
            Ok(if rep.converged { ExitCode::SUCCESS } else { ExitCode::from(3) })
        }
        Command::Verify { which, common } => {
            if common.resolution < 16 {
                return Err(Error::Config(format!(
                    "verification requires resolution >= 16 per axis, got {}",
                    common.resolution
                )));
            }
            let sc = scenario_only(build(&common)?)?;
            let report = dispatch_verify(&which, &sc, common.seed)?;
            let text = report.to_text();
            emit(&common, &format!("verify_{which}.txt"), &text)?;
            if common.out.is_some() {
                println!("{} = {}", report.title, if report.pass() { "pass" } else { "fail" });
            }
            Ok(if report.pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Describe { common } => {
            let built = build(&common)?;
            let m = built.manifold();
            let mut text = m.describe();
            if let Built::Scenario(sc) = &built {
                if let Ok(e) = sc.ends() {
                    text.push_str(&e.to_text());
                }
            }
            emit(&common, "describe.txt", &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn scenario_dl_sets(
    sc: &BuiltScenario,
    sets: &str,
    end: Option<&str>,
) -> Result<Vec<NodeSet>, Error> {
    let label = end.unwrap_or("up");
    match (sc.meta.name.as_str(), sets) {
        ("plane", "lines") => sc.dl_line_sets(label),
        ("cylinder", "circles") | ("capped_half_cylinder", "circles") => sc.dl_circle_sets(label),
        ("pants", "circles") => sc.dl_leg_sets(label),
        (name, sets) => Err(Error::Config(format!("{name} does not support --sets {sets}"))),
    }
}

fn dispatch_verify(which: &str, sc: &BuiltScenario, seed: u64) -> Result<Report, Error> {
    match which {
        "theorem1" => verify_theorem1(sc, seed),
        "theorem2" => verify_theorem2_path(sc),
        "theorem3" => verify_theorem3(sc),
        "theorem4" => verify_theorem4(sc, seed),
        "ends" => verify_ends(sc),
        "metric" => verify_metric(sc),
        "corays" => verify_corays(sc, seed),
        "min" => verify_min_stability(sc, seed),
        "busemann" => verify_closed_form_busemann(sc),
        other => Err(Error::Config(format!(
            "unknown verification `{other}` (theorem1|theorem2|theorem3|theorem4|ends|metric|corays|min|busemann)"
        ))),
    }
}
