use proptest::prelude::*;

use pucci_lab::grid::checks::{duality_trials, monotonicity_trials, quarter_turn_defect};
use pucci_lab::grid::{
    build_domain, discretize_f, principal_eigenvalue_grid, solve_dirichlet, BoundaryData, GridSource, SchemeKind,
    Shape,
};
use pucci_lab::radial::SourceSpec;
use pucci_lab::{PucciParams, Variant};

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Plus), Just(Variant::Minus)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn monotone_for_any_seed(seed in any::<u64>()) {
        let out = monotonicity_trials(seed, 25, SchemeKind::WideStencil).unwrap();
        prop_assert!(out.pass, "{:?}", out);
    }

    #[test]
    fn discrete_duality_for_any_seed(seed in any::<u64>()) {
        let out = duality_trials(seed, 5).unwrap();
        prop_assert!(out.pass, "{:?}", out);
    }

    /// Quadratics are reproduced exactly when `a = A` or when their
    /// eigenframe is a grid axis pair.
    #[test]
    fn exact_on_quadratics(
        a in 0.2f64..2.0,
        k in 1.0f64..3.0,
        q in prop::collection::vec(-3.0f64..3.0, 3),
        v in variant(),
        shape in prop_oneof![Just(Shape::Disk { radius: 1.0 }), Just(Shape::Ellipse { ax: 1.4, ay: 0.9 })],
    ) {
        let dom = build_domain(&shape, 0.1).unwrap();
        let quad = |x: f64, y: f64, q: &[f64]| 0.5 * (q[0] * x * x + 2.0 * q[1] * x * y + q[2] * y * y);
        let weight = |p: &PucciParams, t: f64| p.weight(t) * t;
        // Equal ellipticity, full quadratic.
        let iso = PucciParams::new(a, a, v, 0.0).unwrap();
        let u = dom.field(|x, y| quad(x, y, &q), |x, y| quad(x, y, &q));
        let f = discretize_f(&iso, &dom, &u);
        let want = a * (q[0] + q[2]);
        for &n in &dom.interior {
            prop_assert!((f.values[n] - want).abs() <= 1e-8 * (1.0 + want.abs()));
        }
        // Unequal ellipticity, axis-aligned quadratic.
        let p = PucciParams::new(a, a * k, v, 0.0).unwrap();
        let d = [q[0], 0.0, q[2]];
        let u = dom.field(|x, y| quad(x, y, &d), |x, y| quad(x, y, &d));
        let f = discretize_f(&p, &dom, &u);
        let want = weight(&p, q[0]) + weight(&p, q[2]);
        for &n in &dom.interior {
            prop_assert!((f.values[n] - want).abs() <= 1e-8 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn disk_solution_is_quarter_turn_invariant(a in 0.3f64..1.0, k in 1.0f64..3.0, v in variant()) {
        let dom = build_domain(&Shape::Disk { radius: 1.0 }, 0.1).unwrap();
        let p = PucciParams::new(a, a * k, v, 0.0).unwrap();
        let u = solve_dirichlet(&p, &dom, &GridSource::Spec(SourceSpec::Constant { k: 1.0 }), &BoundaryData::zero())
            .unwrap();
        prop_assert!(quarter_turn_defect(&u, &dom) <= 2.0 * dom.h);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn eigenfield_positive_inside(a in 0.5f64..1.0, k in 1.0f64..2.0, v in variant()) {
        let dom = build_domain(&Shape::Ellipse { ax: 1.2, ay: 0.8 }, 0.08).unwrap();
        let p = PucciParams::new(a, a * k, v, 0.0).unwrap();
        let (lambda, phi) = principal_eigenvalue_grid(&p, &dom).unwrap();
        prop_assert!(lambda > 0.0);
        for &n in &dom.interior {
            prop_assert!(phi.values[n] > 0.0);
        }
        prop_assert!(phi.boundary_values.iter().all(|b| *b == 0.0));
    }
}
