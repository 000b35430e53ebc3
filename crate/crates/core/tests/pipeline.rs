use spectral_bounds::bounds::{quadratic_bounds, yang_check, SpectralData, Tolerance};
use spectral_bounds::eigensolve::{solve_smallest, SolverOptions};
use spectral_bounds::geometry::{
    apply_dirichlet, assemble_laplacian, disc, flat_torus, icosphere, parse_off, schrodinger, to_off,
};
use spectral_bounds::verify::{mesh_verify, MeshOptions, MeshSource};

fn smallest(op: &spectral_bounds::geometry::DiscreteOperator, k: usize) -> Vec<f64> {
    solve_smallest(op, k, &SolverOptions::default()).unwrap().eigenvalues
}

#[test]
fn flat_torus_matches_lattice_spectrum() {
    // Rectangle 1 × 2: eigenvalues 4π²(a² + b²/4) over integer pairs.
    let mut exact: Vec<f64> = (-4i32..=4)
        .flat_map(|a| (-4i32..=4).map(move |b| 4.0 * std::f64::consts::PI.powi(2) * f64::from(a * a * 4 + b * b) / 4.0))
        .collect();
    exact.sort_by(f64::total_cmp);
    let got = smallest(&assemble_laplacian(&flat_torus(1.0, 2.0, 40).unwrap()).unwrap(), 9);
    for (g, e) in got.iter().zip(&exact).skip(1) {
        assert!((g - e).abs() / e < 0.02, "{g} vs {e}");
    }
    assert!(got[0].abs() < 1e-8);
}

#[test]
fn constant_potential_shifts_spectrum() {
    let op = assemble_laplacian(&icosphere(2).unwrap()).unwrap();
    let base = smallest(&op, 8);
    let shifted = smallest(&schrodinger(&op, &vec![2.5; op.dim()]).unwrap(), 8);
    for (a, b) in base.iter().zip(&shifted) {
        assert!((b - a - 2.5).abs() < 1e-7, "{a} + 2.5 vs {b}");
    }
}

#[test]
fn off_round_trip_preserves_spectrum() {
    let mesh = icosphere(2).unwrap();
    let again = parse_off(&to_off(&mesh)).unwrap();
    let a = smallest(&assemble_laplacian(&mesh).unwrap(), 6);
    let b = smallest(&assemble_laplacian(&again).unwrap(), 6);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0));
    }
}

#[test]
fn dirichlet_disc_satisfies_flat_inequality() {
    // Planar domain: |h|² = 0 and q = 0, so δ_i = 0.
    let mesh = disc(1.0, 16).unwrap();
    let op = apply_dirichlet(&assemble_laplacian(&mesh).unwrap(), mesh.boundary()).unwrap();
    let values = smallest(&op, 11);
    for k in 1..=10 {
        let data = SpectralData::from_prefix(2, &values, k).unwrap().with_deltas(vec![0.0; k]).unwrap();
        assert!(yang_check(&data, Tolerance::Relative(0.05)).unwrap().satisfied, "k = {k}");
        let b = quadratic_bounds(&data, None).unwrap();
        assert!(b.contains(values[k], Tolerance::Relative(0.05)), "k = {k}: {b:?} vs {}", values[k]);
    }
}

#[test]
fn ellipsoid_pipeline_passes_with_potential() {
    let mut opts = MeshOptions::new(MeshSource::Ellipsoid { a: 1.0, b: 0.8, c: 1.3, level: 3 }, 15);
    opts.potential = "gh2:-0.5".parse().unwrap();
    let report = mesh_verify(&opts).unwrap();
    assert!(report.pass, "{:?}", report.failures().collect::<Vec<_>>());
    assert_eq!(report.rows("yang").count(), 15);
}
