//! Randomized checks of the structural invariants of the public types.

use proptest::prelude::*;

use crate::branching::{conic_branch_count, quadratic_branch_count, QuadraticBranchProblem, QuadraticCase};
use crate::cli::RunConfig;
use crate::numerics::{conic_intersections, Conic, Grid, QuadratureRule};
use crate::similarity::{alpha0, asymptotic_bundle};
use crate::spectral::{adjoint_polynomial, eigenvalue_linear, MultiIndex};
use crate::unstable::{exponents_unstable, p_critical, unstable_symbol};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn uniform_grids_increase(a in -100.0..100.0f64, len in 1e-3..200.0f64, n in 2usize..2000) {
        let g = Grid::uniform(a, a + len, n).unwrap();
        prop_assert_eq!(g.len(), n);
        prop_assert!(g.points().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(g.points().iter().all(|x| x.is_finite()));
    }

    #[test]
    fn panel_weights_are_positive_and_sum_to_length(
        a in -50.0..50.0f64,
        len in 1e-2..100.0f64,
        panels in 1usize..40,
        order in 1usize..24,
    ) {
        let rule = QuadratureRule::uniform(a, a + len, panels, order).unwrap();
        let nodes = rule.nodes();
        prop_assert!(nodes.iter().all(|(_, w)| *w > 0.0));
        let total: f64 = nodes.iter().map(|(_, w)| w).sum();
        prop_assert!(close(total, len, 1e-12));
    }

    #[test]
    fn mass_conserving_exponents(n in 0.0..10.0f64, dim in 1usize..=3) {
        let e = alpha0(n, dim).unwrap();
        prop_assert!(close(10.0 * e.beta + n * e.alpha, 1.0, 4.0 * f64::EPSILON));
        prop_assert!(close(e.alpha, dim as f64 * e.beta, 4.0 * f64::EPSILON));
    }

    #[test]
    fn stable_bundle_has_five_decaying_ninth_roots(alpha in 1e-3..2.0f64) {
        let b = asymptotic_bundle(alpha).unwrap();
        prop_assert_eq!(b.omegas.len(), 5);
        for w in &b.omegas {
            prop_assert!(w.re > 0.0);
            prop_assert!((w.powu(9) - 1.0).norm() < 1e-12);
        }
        prop_assert!(b.decay_constants().iter().all(|d| *d > 0.0));
    }

    #[test]
    fn adjoint_degree_matches_order(components in prop::collection::vec(0usize..4, 1..=3)) {
        let beta = MultiIndex::new(components);
        let dim = beta.dim();
        let p = adjoint_polynomial(&beta, dim).unwrap();
        prop_assert_eq!(p.degree(), beta.order());
        prop_assert_eq!(eigenvalue_linear(beta.order()), -(beta.order() as f64) / 10.0);
    }

    #[test]
    fn unstable_scaling_identities(n in 0.0..5.0f64, gap in 1e-3..30.0f64, dim in 1usize..=3) {
        let e = exponents_unstable(n, n + 1.0 + gap, dim).unwrap();
        prop_assert!(e.identities_ok(), "{:?}", e.identity_defects());
    }

    #[test]
    fn critical_exponent_recovers_mass_conserving_pair(n in 0.0..5.0f64, dim in 1usize..=3) {
        let e = exponents_unstable(n, p_critical(n, dim), dim).unwrap();
        let m = alpha0(n, dim).unwrap();
        prop_assert!(close(e.alpha, m.alpha, 1e-14));
        prop_assert!(close(e.beta, m.beta, 1e-13));
    }

    #[test]
    fn unstable_symbol_is_even_and_positive_exactly_on_the_band(k in -3.0..3.0f64) {
        prop_assert_eq!(unstable_symbol(k), unstable_symbol(-k));
        let inside = k != 0.0 && k.abs() < 1.0;
        prop_assert_eq!(unstable_symbol(k) > 0.0, inside);
    }

    #[test]
    fn quadratic_roots_lie_in_the_unit_interval(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64) {
        let p = QuadraticBranchProblem::new(a, b, c);
        let q = quadratic_branch_count(&p);
        prop_assume!(q.case != QuadraticCase::IdenticallyZero);
        prop_assert_eq!(q.count, Some(q.roots.len()));
        prop_assert!(q.roots.len() <= 2);
        prop_assert!(q.roots.windows(2).all(|w| w[0] < w[1]));
        let scale = a.abs() + b.abs() + c.abs();
        for r in &q.roots {
            prop_assert!((0.0..=1.0).contains(r));
            prop_assert!(p.eval(*r).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn conic_pairs_meet_in_at_most_four_points(
        p in prop::array::uniform6(-2.0..2.0f64),
        q in prop::array::uniform6(-2.0..2.0f64),
    ) {
        let (p, q) = (Conic::new(p[0], p[1], p[2], p[3], p[4], p[5]), Conic::new(q[0], q[1], q[2], q[3], q[4], q[5]));
        let r = conic_branch_count(&p, &q, [0.0, 0.0]);
        prop_assert!(r.points.len() <= 4);
        if let Some(c) = r.count {
            prop_assert!(c <= 4);
        }
        if let Ok(points) = conic_intersections(&p, &q) {
            let (pn, qn) = (p.normalized(), q.normalized());
            for (x, y) in points {
                let size = 1.0 + x * x + y * y;
                prop_assert!(pn.eval(x, y).abs() <= 1e-9 * size && qn.eval(x, y).abs() <= 1e-9 * size);
            }
        }
    }

    #[test]
    fn config_text_sets_every_field(
        n in 0.0..5.0f64,
        dim in 1usize..=3,
        k in 0usize..10,
        ymax in 1.0..500.0f64,
        points in 64usize..100_000,
        tol in 1e-14..1e-4f64,
    ) {
        let text = format!(
            "# comment\nn = {n:e}\ndim = {dim}\nk = {k}\nymax = {ymax:e}  # trailing\npoints = {points}\ntol = {tol:e}\nshoot-tol = {tol:e}\n"
        );
        let mut c = RunConfig::default();
        c.apply_text(&text).unwrap();
        c.validate().unwrap();
        prop_assert_eq!((c.n, c.dim, c.k, c.y_max, c.points, c.ivp_tol, c.shoot_tol), (n, dim, k, ymax, points, tol, tol));
        let mut moved = c.clone();
        moved.out = Some("elsewhere.csv".into());
        prop_assert_eq!(moved.hash(), c.hash());
        moved.n += 0.5;
        prop_assert_ne!(moved.hash(), c.hash());
    }
}
