use proptest::prelude::*;

use pucci_lab::sector::{
    assemble_h, gamma_exponent_with, sector_principal_eigenvalue, GammaOptions, SectorField, SectorMesh,
    SectorOperatorParams,
};

/// Field evaluated on every node, boundary included.
fn full(mesh: &SectorMesh, f: impl Fn(&[f64]) -> f64) -> SectorField {
    let values = (0..mesh.node_count())
        .map(|k| {
            let (i, j) = mesh.split(k);
            f(&mesh.theta_of(i, j))
        })
        .collect();
    SectorField { values }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// At `a = A`, `H` is `A` times the Laplace-Beltrami operator, for any
    /// smooth field and any `gamma`, `epsilon`.
    #[test]
    fn equal_ellipticity_is_laplace_beltrami(
        big_a in 0.5f64..2.0,
        gamma in 2.0f64..3.0,
        c in prop::collection::vec(-1.0f64..1.0, 4),
        dim in 2usize..=3,
    ) {
        let mesh = SectorMesh::new(dim, 0.3, 0.02).unwrap();
        let p = SectorOperatorParams::new(big_a, big_a, gamma, 0.0).unwrap();
        // psi = c0 s1 + c1 sin(2 t1) cos(t2) + c2 t1 t2 + c3 t2^2, s1 = sin t1.
        let psi = |t: &[f64]| {
            let t2 = t.get(1).copied().unwrap_or(0.0);
            c[0] * t[0].sin() + c[1] * (2.0 * t[0]).sin() * t2.cos() + c[2] * t[0] * t2 + c[3] * t2 * t2
        };
        let lb = |t: &[f64]| {
            let t2 = t.get(1).copied().unwrap_or(0.0);
            let p11 = -c[0] * t[0].sin() - 4.0 * c[1] * (2.0 * t[0]).sin() * t2.cos();
            if dim == 2 {
                return p11;
            }
            let p2 = -c[1] * (2.0 * t[0]).sin() * t2.sin() + c[2] * t[0] + 2.0 * c[3] * t2;
            let p22 = -c[1] * (2.0 * t[0]).sin() * t2.cos() + 2.0 * c[3];
            p11 / (t2.cos() * t2.cos()) + p22 - t2.tan() * p2
        };
        let h = assemble_h(&p, &mesh, &full(&mesh, psi)).unwrap();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for k in mesh.interior() {
            let (i, j) = mesh.split(k);
            let t = mesh.theta_of(i, j);
            let want = big_a * lb(&t);
            scale = scale.max(want.abs());
            worst = worst.max((h.values[k] - want).abs());
        }
        prop_assert!(worst <= 1e-3 * scale, "{} vs {}", worst, scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn eigenvalue_is_one_homogeneous(ratio in 0.7f64..1.0, t in 0.2f64..5.0) {
        let mesh = SectorMesh::standard(2, 0.2).unwrap();
        let p = SectorOperatorParams::new(ratio, 1.0, 2.2, 0.0).unwrap();
        let (l1, _) = sector_principal_eigenvalue(&p, &mesh).unwrap();
        let (lt, _) = sector_principal_eigenvalue(&p.scaled(t), &mesh).unwrap();
        prop_assert!((lt - t * l1).abs() <= 1e-5 * lt);
    }

    #[test]
    fn eigenvalue_nonincreasing_in_domain(ratio in 0.7f64..=1.0, d in 0.05f64..0.3) {
        let p = SectorOperatorParams::new(ratio, 1.0, 2.0, 0.0).unwrap();
        let small = sector_principal_eigenvalue(&p, &SectorMesh::standard(2, d + 0.05).unwrap()).unwrap().0;
        let large = sector_principal_eigenvalue(&p, &SectorMesh::standard(2, d).unwrap()).unwrap().0;
        prop_assert!(small >= large * (1.0 - 1e-6));
    }

    #[test]
    fn exponent_identity(ratio in 0.8f64..=1.0, eps in 0.0f64..0.1) {
        let mesh = SectorMesh::standard(2, 0.1).unwrap();
        let g = gamma_exponent_with(ratio, 1.0, eps, &mesh, &GammaOptions::default()).unwrap();
        let residual = ratio * g.gamma * g.gamma - g.lambda_bar - eps;
        prop_assert!(residual.abs() <= 1e-5, "{}", residual);
        prop_assert!(g.gamma > 2.0);
    }
}
