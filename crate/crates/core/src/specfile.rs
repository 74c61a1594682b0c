//! Plain-text manifold spec files.
//!
//! Sections with `key = value` lines; `#` starts a comment. Coordinates and
//! metric entries are decimal literals. Example:
//!
//! ```text
//! [chart]
//! name = tube
//! u0 = 0.0
//! u1 = 1.0
//! v0 = -1.0
//! v1 = 1.0
//! nu = 64
//! nv = 129
//!
//! [metric]
//! chart = tube
//! g11 = 1.0
//! g12 = 0.0
//! g22 = 1.0
//!
//! [identify]
//! chart = tube
//! periodic = u
//!
//! [seam]
//! a = tube:bottom
//! b = other:top
//! reversed = false
//! ```
//!
//! Charts default to the Euclidean metric; non-periodic chart sides that are
//! not consumed by a seam become the truncation boundary.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::manifold::{ChartSpec, DiscreteManifold, ManifoldBuilder, MetricTensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

#[derive(Debug)]
struct Section {
    name: String,
    line: usize,
    entries: BTreeMap<String, (String, usize)>,
}

fn parse_sections(text: &str) -> Result<Vec<Section>> {
    let mut out: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or(Error::SpecParse { line: line_no, msg: "unterminated section header".into() })?;
            out.push(Section { name: name.trim().to_string(), line: line_no, entries: BTreeMap::new() });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(Error::SpecParse {
            line: line_no,
            msg: format!("expected `key = value`, got `{line}`"),
        })?;
        let section = out.last_mut().ok_or(Error::SpecParse {
            line: line_no,
            msg: "entry before any [section] header".into(),
        })?;
        section
            .entries
            .insert(key.trim().to_string(), (value.trim().to_string(), line_no));
    }
    Ok(out)
}

impl Section {
    fn get(&self, key: &str) -> Result<&str> {
        self.entries
            .get(key)
            .map(|(v, _)| v.as_str())
            .ok_or(Error::SpecParse { line: self.line, msg: format!("[{}] is missing `{key}`", self.name) })
    }

    fn get_f64(&self, key: &str) -> Result<f64> {
        let (v, line) = self
            .entries
            .get(key)
            .ok_or(Error::SpecParse { line: self.line, msg: format!("[{}] is missing `{key}`", self.name) })?;
        v.parse().map_err(|_| Error::SpecParse { line: *line, msg: format!("`{key}` is not a number: {v}") })
    }

    fn get_usize(&self, key: &str) -> Result<usize> {
        let (v, line) = self
            .entries
            .get(key)
            .ok_or(Error::SpecParse { line: self.line, msg: format!("[{}] is missing `{key}`", self.name) })?;
        v.parse().map_err(|_| Error::SpecParse { line: *line, msg: format!("`{key}` is not an integer: {v}") })
    }
}

fn parse_side(text: &str, line: usize) -> Result<(String, Side)> {
    let (chart, side) = text.split_once(':').ok_or(Error::SpecParse {
        line,
        msg: format!("expected `chart:side`, got `{text}`"),
    })?;
    let side = match side.trim() {
        "left" => Side::Left,
        "right" => Side::Right,
        "bottom" => Side::Bottom,
        "top" => Side::Top,
        other => {
            return Err(Error::SpecParse { line, msg: format!("unknown side `{other}`") });
        }
    };
    Ok((chart.trim().to_string(), side))
}

fn side_nodes(nu: usize, nv: usize, side: Side) -> Vec<(usize, usize)> {
    match side {
        Side::Left => (0..nv).map(|j| (0, j)).collect(),
        Side::Right => (0..nv).map(|j| (nu - 1, j)).collect(),
        Side::Bottom => (0..nu).map(|i| (i, 0)).collect(),
        Side::Top => (0..nu).map(|i| (i, nv - 1)).collect(),
    }
}

/// Parse a manifold spec file and build the manifold.
pub fn parse_manifold(text: &str) -> Result<DiscreteManifold> {
    let sections = parse_sections(text)?;

    struct ChartDecl {
        name: String,
        u0: f64,
        u1: f64,
        v0: f64,
        v1: f64,
        nu: usize,
        nv: usize,
        metric: MetricTensor,
        periodic_u: bool,
        periodic_v: bool,
    }
    let mut charts: Vec<ChartDecl> = Vec::new();
    let mut seams: Vec<((String, Side), (String, Side), bool, usize)> = Vec::new();

    for s in &sections {
        match s.name.as_str() {
            "chart" => {
                charts.push(ChartDecl {
                    name: s.get("name")?.to_string(),
                    u0: s.get_f64("u0")?,
                    u1: s.get_f64("u1")?,
                    v0: s.get_f64("v0")?,
                    v1: s.get_f64("v1")?,
                    nu: s.get_usize("nu")?,
                    nv: s.get_usize("nv")?,
                    metric: MetricTensor::EUCLIDEAN,
                    periodic_u: false,
                    periodic_v: false,
                });
            }
            "metric" => {
                let name = s.get("chart")?;
                let chart = charts
                    .iter_mut()
                    .find(|c| c.name == name)
                    .ok_or(Error::SpecParse { line: s.line, msg: format!("unknown chart `{name}`") })?;
                chart.metric = MetricTensor {
                    g11: s.get_f64("g11")?,
                    g12: s.get_f64("g12")?,
                    g22: s.get_f64("g22")?,
                };
            }
            "identify" => {
                let name = s.get("chart")?;
                let chart = charts
                    .iter_mut()
                    .find(|c| c.name == name)
                    .ok_or(Error::SpecParse { line: s.line, msg: format!("unknown chart `{name}`") })?;
                match s.get("periodic")? {
                    "u" => chart.periodic_u = true,
                    "v" => chart.periodic_v = true,
                    other => {
                        return Err(Error::SpecParse {
                            line: s.line,
                            msg: format!("periodic must be `u` or `v`, got `{other}`"),
                        });
                    }
                }
            }
            "seam" => {
                let a = parse_side(s.get("a")?, s.line)?;
                let b = parse_side(s.get("b")?, s.line)?;
                let reversed = match s.entries.get("reversed") {
                    Some((v, line)) => v.parse().map_err(|_| Error::SpecParse {
                        line: *line,
                        msg: format!("`reversed` must be true or false, got {v}"),
                    })?,
                    None => false,
                };
                seams.push((a, b, reversed, s.line));
            }
            other => {
                return Err(Error::SpecParse { line: s.line, msg: format!("unknown section [{other}]") });
            }
        }
    }
    if charts.is_empty() {
        return Err(Error::SpecParse { line: 0, msg: "no [chart] section".into() });
    }

    let mut builder = ManifoldBuilder::new();
    let mut ids = BTreeMap::new();
    for c in &charts {
        let metric = c.metric;
        let mut spec = ChartSpec::flat(&c.name, c.u0, c.u1, c.v0, c.v1, c.nu, c.nv)
            .with_constant_metric(metric);
        spec.periodic_u = c.periodic_u;
        spec.periodic_v = c.periodic_v;
        let id = builder.add_chart(spec)?;
        ids.insert(c.name.clone(), (id, c.nu, c.nv));
    }
    for ((an, aside), (bn, bside), reversed, line) in seams {
        let &(aid, anu, anv) = ids
            .get(&an)
            .ok_or(Error::SpecParse { line, msg: format!("unknown chart `{an}`") })?;
        let &(bid, bnu, bnv) = ids
            .get(&bn)
            .ok_or(Error::SpecParse { line, msg: format!("unknown chart `{bn}`") })?;
        let a_nodes = side_nodes(anu, anv, aside);
        let mut b_nodes = side_nodes(bnu, bnv, bside);
        if reversed {
            b_nodes.reverse();
        }
        if a_nodes.len() != b_nodes.len() {
            return Err(Error::SeamMismatch { left: a_nodes.len(), right: b_nodes.len() });
        }
        for (pa, pb) in a_nodes.into_iter().zip(b_nodes) {
            builder.identify(aid, pa, bid, pb)?;
        }
    }
    builder.finalize()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_chart_roundtrip() {
        let text = "\n# a flat window\n[chart]\nname = w\nu0 = 0.0\nu1 = 1.0\nv0 = 0.0\nv1 = 1.0\nnu = 5\nnv = 5\n";
        let m = parse_manifold(text).unwrap();
        assert_eq!(m.node_count(), 25);
        assert!(m.window_radius().is_finite());
    }

    #[test]
    fn periodic_cylinder_from_file() {
        let text = "[chart]\nname = c\nu0 = 0.0\nu1 = 1.0\nv0 = -1.0\nv1 = 1.0\nnu = 16\nnv = 33\n\n[identify]\nchart = c\nperiodic = u\n";
        let m = parse_manifold(text).unwrap();
        let a = m.node_at(0, 0, 5).unwrap();
        let b = m.node_at(0, 15, 5).unwrap();
        assert!(m.neighbors(a).any(|(q, _)| q == b));
    }

    #[test]
    fn seam_joins_two_charts() {
        let text = "\
[chart]\nname = a\nu0 = 0.0\nu1 = 1.0\nv0 = 0.0\nv1 = 1.0\nnu = 5\nnv = 5\n
[chart]\nname = b\nu0 = 1.0\nu1 = 2.0\nv0 = 0.0\nv1 = 1.0\nnu = 5\nnv = 5\n
[seam]\na = a:right\nb = b:left\n";
        let m = parse_manifold(text).unwrap();
        assert_eq!(m.node_count(), 45); // 25 + 25 - 5
    }

    #[test]
    fn metric_scales_edges() {
        let text = "[chart]\nname = s\nu0 = 0.0\nu1 = 1.0\nv0 = 0.0\nv1 = 1.0\nnu = 5\nnv = 5\n\n[metric]\nchart = s\ng11 = 4.0\ng12 = 0.0\ng22 = 1.0\n";
        let m = parse_manifold(text).unwrap();
        let a = m.node_at(0, 0, 0).unwrap();
        let b = m.node_at(0, 1, 0).unwrap();
        assert!((m.edge_len(a, b).unwrap() - 0.5).abs() < 1e-12); // 2 * 0.25
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "[chart]\nname = a\nu0 = zero\n";
        match parse_manifold(text) {
            Err(Error::SpecParse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected SpecParse, got {:?}", other.err()),
        }
        let text = "[nonsense]\nx = 1\n";
        assert!(matches!(parse_manifold(text), Err(Error::SpecParse { line: 1, .. })));
    }
}
