//! Property tests for the invariants that hold exactly on the graph backend.

use proptest::prelude::*;

use horolab::eikonal::{distance_to_set, pairwise_distance, ScalarField};
use horolab::ideal_boundary::{rho, rho_quotient, CompactExhaustion};
use horolab::manifold::{build_chart_manifold, ChartSpec, DiscreteManifold, NodeSet};
use horolab::viscosity::min_combine;

fn small_plane() -> DiscreteManifold {
    build_chart_manifold(ChartSpec::flat("p", -1.0, 1.0, -1.0, 1.0, 9, 9)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Distance fields obey the triangle inequality exactly on sampled
    /// triples, and adding sources can only shrink values.
    #[test]
    fn distance_triangle_and_monotonicity(
        a in 0u32..81,
        b in 0u32..81,
        c in 0u32..81,
    ) {
        let m = small_plane();
        let da = distance_to_set(&m, &NodeSet::singleton(a)).unwrap();
        prop_assert!(da.values[b as usize] <= da.values[c as usize] + pairwise_distance(&m, c, b) + 1e-12);

        if a != b {
            let both = distance_to_set(&m, &NodeSet::new(vec![a, b]).unwrap()).unwrap();
            for p in 0..m.node_count() {
                prop_assert!(both.values[p] <= da.values[p]);
            }
        }
    }

    /// Every distance field is 1-Lipschitz edgewise and exactly zero on its
    /// source set.
    #[test]
    fn distance_lipschitz_and_zero_on_source(seed_nodes in proptest::collection::vec(0u32..81, 1..5)) {
        let m = small_plane();
        let k = NodeSet::new(seed_nodes).unwrap();
        let df = distance_to_set(&m, &k).unwrap();
        for p in k.iter() {
            prop_assert_eq!(df.values[p as usize], 0.0);
        }
        df.field.check_lipschitz(&m, 1e-12).unwrap();
    }

    /// min_combine is exactly idempotent, commutative and associative, and
    /// the min of two 1-Lipschitz fields is 1-Lipschitz.
    #[test]
    fn min_algebra_exact(
        a1 in -1.0f64..1.0, b1 in -1.0f64..1.0,
        a2 in -1.0f64..1.0, b2 in -1.0f64..1.0,
        a3 in -1.0f64..1.0, b3 in -1.0f64..1.0,
    ) {
        let m = small_plane();
        let norm = |a: f64, b: f64| {
            let n = (a * a + b * b).sqrt().max(1.0);
            (a / n, b / n)
        };
        let mk = |a: f64, b: f64| {
            let (a, b) = norm(a, b);
            ScalarField::from_fn(&m, move |u, v| a * u + b * v)
        };
        let (f, g, h) = (mk(a1, b1), mk(a2, b2), mk(a3, b3));
        let fg = min_combine(&f, &g).unwrap();
        let gf = min_combine(&g, &f).unwrap();
        prop_assert_eq!(&fg.values, &gf.values);
        let ff = min_combine(&f, &f).unwrap();
        prop_assert_eq!(&ff.values, &f.values);
        let fg_h = min_combine(&fg, &h).unwrap();
        let g_h = min_combine(&g, &h).unwrap();
        let f_gh = min_combine(&f, &g_h).unwrap();
        prop_assert_eq!(&fg_h.values, &f_gh.values);
        fg.check_lipschitz(&m, 1e-12).unwrap();
    }

    /// ρ is a symmetric pseudometric with the triangle inequality, ρ~ never
    /// exceeds it, and shifting an argument by a constant leaves ρ~ fixed.
    #[test]
    fn rho_axioms(
        a1 in -1.0f64..1.0, b1 in -1.0f64..1.0,
        a2 in -1.0f64..1.0, b2 in -1.0f64..1.0,
        shift in -5.0f64..5.0,
    ) {
        let m = small_plane();
        let x0 = m.node_at(0, 4, 4).unwrap();
        let e = CompactExhaustion::balls(&m, x0, &[0.4, 0.8]).unwrap();
        let norm = |a: f64, b: f64| {
            let n = (a * a + b * b).sqrt().max(1.0);
            (a / n, b / n)
        };
        let mk = |a: f64, b: f64| {
            let (a, b) = norm(a, b);
            ScalarField::from_fn(&m, move |u, v| a * u + b * v)
        };
        let (u, v) = (mk(a1, b1), mk(a2, b2));
        let zero = ScalarField::from_fn(&m, |_, _| 0.0);

        let duv = rho(&u, &v, &e).unwrap().value;
        let dvu = rho(&v, &u, &e).unwrap().value;
        prop_assert!((duv - dvu).abs() < 1e-15);
        let duz = rho(&u, &zero, &e).unwrap().value;
        let dzv = rho(&zero, &v, &e).unwrap().value;
        prop_assert!(duv <= duz + dzv + 1e-12);

        let q = rho_quotient(&u, &v, &e).unwrap().value;
        prop_assert!(q <= duv + 1e-15);

        let mut shifted = u.clone();
        for val in &mut shifted.values {
            *val += shift;
        }
        let q2 = rho_quotient(&shifted, &v, &e).unwrap().value;
        prop_assert!((q - q2).abs() <= 2e-4, "shift invariance: {q} vs {q2}");
    }

    /// Minimal segments realize the graph distance exactly, and every
    /// subsegment between sampled vertices is again minimal.
    #[test]
    fn minimal_segments_realize_distance(x in 0u32..81, y in 0u32..81) {
        prop_assume!(x != y);
        let m = small_plane();
        let p = horolab::geodesics::minimal_segment(&m, x, y).unwrap();
        prop_assert_eq!(p.length(), pairwise_distance(&m, x, y));
        let k = p.nodes.len();
        if k > 2 {
            let mid = k / 2;
            let d = pairwise_distance(&m, p.nodes[0], p.nodes[mid]);
            prop_assert!((d - p.cumlen[mid]).abs() < 1e-12);
        }
    }
}
