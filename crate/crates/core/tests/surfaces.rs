//! Extraction and topology invariants on analytic reference surfaces that
//! are not already exercised by the acceptance criteria: the genus-2
//! surface, refinement consistency under grid halving, and area
//! convergence.

use boundary_geometry::field::{Genus2, Sphere, Torus};
use boundary_geometry::levelset::{extract_surface_3d, sample_grid, GridSpec};
use boundary_geometry::topology::euler_characteristic;
use std::f64::consts::PI;

#[test]
fn genus_two_surface_chi_minus_two() {
    let pretzel = Genus2 { level: 0.04 };
    let spec = GridSpec::new(
        vec![(-1.4, 1.4), (-0.85, 0.85), (-0.45, 0.45)],
        0.02,
    )
    .unwrap();
    let grid = sample_grid(&pretzel, &spec).unwrap();
    let mesh = extract_surface_3d(&pretzel, &grid).unwrap();
    let report = euler_characteristic(&pretzel, &mesh, spec.lambda).unwrap();
    assert!(report.closed && report.oriented, "{report:?}");
    assert_eq!(report.chi_mesh, -2, "{report:?}");
    assert_eq!(report.chi_rounded, -2, "{report:?}");
    // integral estimate within 5% of the combinatorial value (in chi units)
    assert!(
        (report.chi_estimate - report.chi_mesh as f64).abs() < 0.15,
        "chi estimate {:.4} vs mesh {}",
        report.chi_estimate,
        report.chi_mesh
    );
}

#[test]
fn chi_rounded_is_stable_under_grid_refinement() {
    let sphere = Sphere::centered(3, 1.0);
    let torus = Torus {
        major: 2.0,
        minor: 0.5,
    };
    for lambda in [0.08, 0.04] {
        let spec = GridSpec::new(vec![(-1.4, 1.4); 3], lambda).unwrap();
        let grid = sample_grid(&sphere, &spec).unwrap();
        let mesh = extract_surface_3d(&sphere, &grid).unwrap();
        let report = euler_characteristic(&sphere, &mesh, lambda).unwrap();
        assert_eq!(report.chi_rounded, 2, "sphere at lambda {lambda}: {report:?}");
    }
    for lambda in [0.08, 0.04] {
        let spec =
            GridSpec::new(vec![(-2.8, 2.8), (-2.8, 2.8), (-0.8, 0.8)], lambda).unwrap();
        let grid = sample_grid(&torus, &spec).unwrap();
        let mesh = extract_surface_3d(&torus, &grid).unwrap();
        let report = euler_characteristic(&torus, &mesh, lambda).unwrap();
        assert_eq!(report.chi_rounded, 0, "torus at lambda {lambda}: {report:?}");
        assert_eq!(report.chi_mesh, 0, "torus at lambda {lambda}: {report:?}");
    }
}

#[test]
fn sphere_area_converges_under_grid_halving() {
    let sphere = Sphere::centered(3, 1.0);
    let area = |lambda: f64| -> f64 {
        let spec = GridSpec::new(vec![(-1.3, 1.3); 3], lambda).unwrap();
        let grid = sample_grid(&sphere, &spec).unwrap();
        extract_surface_3d(&sphere, &grid).unwrap().total_area()
    };
    let coarse = area(0.05);
    let fine = area(0.025);
    let exact = 4.0 * PI;
    assert!((coarse - exact).abs() / exact < 0.01);
    assert!((fine - exact).abs() / exact < 0.01);
    assert!(
        (fine - coarse).abs() / coarse < 0.005,
        "halving lambda moved the area by {:.3}%",
        100.0 * (fine - coarse).abs() / coarse
    );
}

#[test]
fn torus_area_matches_analytic_value() {
    let torus = Torus {
        major: 2.0,
        minor: 0.5,
    };
    let spec = GridSpec::new(vec![(-2.8, 2.8), (-2.8, 2.8), (-0.8, 0.8)], 0.04).unwrap();
    let grid = sample_grid(&torus, &spec).unwrap();
    let mesh = extract_surface_3d(&torus, &grid).unwrap();
    // 4 pi^2 R r
    let exact = 4.0 * PI * PI * 2.0 * 0.5;
    assert!(
        (mesh.total_area() - exact).abs() / exact < 0.01,
        "area {:.4} vs {:.4}",
        mesh.total_area(),
        exact
    );
}
