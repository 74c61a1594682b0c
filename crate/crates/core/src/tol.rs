//! Centralized tolerance table.
//!
//! Every threshold used by the verification drivers lives here, with its
//! derivation. The only systematic error sources on the graph backend are
//! the stencil anisotropy (below) and grid quantization `h`; the acceptance
//! thresholds are combinations of the two.

/// Worst-case relative distortion of the 16-neighbour graph metric against
/// the continuum metric for a constant metric tensor.
///
/// The graph metric induced by the kings + knights stencil is the gauge norm
/// whose unit ball is the convex hull of the normalized move vectors. The
/// distortion in a direction between two adjacent moves equals one over the
/// distance from the origin to the chord joining them; the worst chord is the
/// one between (1,0) and (2,1)/√5. A unit test re-derives this value from the
/// move set.
pub const STENCIL_BOUND: f64 = 0.027_486_296_746_015_66;

/// Transverse excess of the 16-stencil gauge near an axis direction:
/// `gauge(a, c) = a + (√5 − 2)·|c|` for `a ≥ 2|c|`. This is why graph-backend
/// Busemann limits along lattice axes carry a crease of slope √5 − 2 and why
/// continuum comparisons use the fast-marching backend instead.
pub const AXIS_TRANSVERSE_EXCESS: f64 = 0.236_067_977_499_789_8;

/// Regular/singular classification threshold for difference quotients.
/// 3 × [`STENCIL_BOUND`]: separates genuine ridges (ascent/descent gap ≈ 1)
/// from stencil noise on every scenario closed form.
pub const GRAD_TOL: f64 = 3.0 * STENCIL_BOUND;

/// Residual acceptance threshold: sup |upwind gradient − 1| over regular
/// nodes must stay below 3 × [`STENCIL_BOUND`]. Graph distance fields meet
/// this exactly (their best descent quotient is 1 by construction).
pub const RESIDUAL_TOL: f64 = 3.0 * STENCIL_BOUND;

/// Semiconcavity cap for distance-like fields, in units of 1/length with the
/// window radius as the length unit: 10 × [`STENCIL_BOUND`]. A convex kink
/// fails with C ≥ 1/(2h), two orders of magnitude above this at the default
/// resolution.
pub const SEMICONCAVITY_CAP: f64 = 10.0 * STENCIL_BOUND;

/// Convergence threshold for certified limits, as a fraction of the window
/// radius: successive iterates must agree pointwise within
/// `LIMIT_TOL_FRACTION × window_radius` on the reported reliable region.
pub const LIMIT_TOL_FRACTION: f64 = 1e-3;

/// Ray certification tolerance per unit of certified span:
/// 2 × [`STENCIL_BOUND`] covers the stencil distortion at both endpoints.
pub const RAY_TOL_PER_SPAN: f64 = 2.0 * STENCIL_BOUND;

/// Absolute tolerance of the one-dimensional shift search in the quotient
/// metric ρ~. The objective is 1-Lipschitz in the shift, so the search error
/// bounds the metric error.
pub const SHIFT_TOL: f64 = 1e-4;

/// Endpoint tolerance for the connectedness path: ρ~ to the endpoint class
/// must drop below this once min{u+t, v} saturates on the largest ball.
pub const PATH_TOL: f64 = 1e-3;

/// Angle (radians) above which two descent directions witness a singular
/// node. One stencil step separates adjacent move directions by at most
/// atan(1/2) ≈ 26.57°; 30° adds slack for curved-metric charts.
pub const SINGULAR_ANGLE: f64 = 30.0 * std::f64::consts::PI / 180.0;

/// Reconstruction tolerance for the sublevel-set identity:
/// error budget of two distance solves plus band quantization.
pub fn reconstruction_tol(window_radius: f64, h: f64) -> f64 {
    STENCIL_BOUND * window_radius + 2.0 * h
}

/// Tolerance of the level-set distance identity |d(x, H_{a2}) − (a1 − a2)|.
pub fn levelset_check_tol(a1: f64, a2: f64, h: f64) -> f64 {
    STENCIL_BOUND * (a1 - a2) + 2.0 * h
}

/// Runtime-adjustable tolerances, seeded from the table above.
#[derive(Debug, Clone)]
pub struct Tolerances {
    pub limit_tol_fraction: f64,
    pub grad_tol: f64,
    pub ray_tol_per_span: f64,
    pub shift_tol: f64,
    pub path_tol: f64,
    pub cluster_eps: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            limit_tol_fraction: LIMIT_TOL_FRACTION,
            grad_tol: GRAD_TOL,
            ray_tol_per_span: RAY_TOL_PER_SPAN,
            shift_tol: SHIFT_TOL,
            path_tol: PATH_TOL,
            cluster_eps: None,
        }
    }
}

impl Tolerances {
    /// Rendered table for `--help-tolerances`.
    pub fn table(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("stencil_bound      = {STENCIL_BOUND:.12}\n"));
        s.push_str(&format!("grad_tol           = {:.12}\n", self.grad_tol));
        s.push_str(&format!("residual_tol       = {RESIDUAL_TOL:.12}\n"));
        s.push_str(&format!("semiconcavity_cap  = {SEMICONCAVITY_CAP:.12}\n"));
        s.push_str(&format!(
            "limit_tol          = {:.12} x window radius\n",
            self.limit_tol_fraction
        ));
        s.push_str(&format!(
            "ray_tol            = {:.12} x certified span\n",
            self.ray_tol_per_span
        ));
        s.push_str(&format!("shift_tol          = {:.12}\n", self.shift_tol));
        s.push_str(&format!("path_tol           = {:.12}\n", self.path_tol));
        s.push_str(&format!(
            "singular_angle     = {:.6} rad\n",
            SINGULAR_ANGLE
        ));
        s.push_str("reconstruction_tol = stencil_bound x window_radius + 2h\n");
        s.push_str("levelset_check_tol = stencil_bound x (a1 - a2) + 2h\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Re-derive the anisotropy bound from the move set: the gauge unit ball
    /// is the convex hull of normalized moves; the distortion on each face is
    /// 1/(distance from the origin to the chord).
    #[test]
    fn stencil_bound_matches_move_geometry() {
        let moves: Vec<(f64, f64)> = [
            (1.0, 0.0),
            (0.0, 1.0),
            (1.0, 1.0),
            (1.0, -1.0),
            (2.0, 1.0),
            (1.0, 2.0),
            (2.0, -1.0),
            (1.0, -2.0),
        ]
        .iter()
        .flat_map(|&(a, b)| [(a, b), (-a, -b)])
        .collect();
        let mut dirs: Vec<(f64, f64)> = moves
            .iter()
            .map(|&(a, b)| {
                let n = (a * a + b * b).sqrt();
                (a / n, b / n)
            })
            .collect();
        dirs.sort_by(|p, q| {
            p.1.atan2(p.0)
                .partial_cmp(&q.1.atan2(q.0))
                .unwrap()
        });
        dirs.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-14);
        let mut worst = 0.0f64;
        for k in 0..dirs.len() {
            let (x1, y1) = dirs[k];
            let (x2, y2) = dirs[(k + 1) % dirs.len()];
            let cross = (x1 * y2 - x2 * y1).abs();
            let chord = ((x2 - x1).powi(2) + (y2 - y1).powi(2)).sqrt();
            if chord < 1e-12 {
                continue;
            }
            worst = worst.max(1.0 / (cross / chord) - 1.0);
        }
        assert!((worst - STENCIL_BOUND).abs() < 1e-12, "got {worst}");
    }

    #[test]
    fn axis_excess_is_sqrt5_minus_2() {
        assert!((AXIS_TRANSVERSE_EXCESS - (5.0f64.sqrt() - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn thresholds_are_ordered() {
        assert!(GRAD_TOL < 0.1);
        assert!(SEMICONCAVITY_CAP > RESIDUAL_TOL);
        assert!(LIMIT_TOL_FRACTION < GRAD_TOL);
    }
}
