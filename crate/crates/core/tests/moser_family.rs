use std::f64::consts::PI;

mod common;

use common::polar_oracle;
use kirchhoff_core::{DomainSpec, Grid64, MoserFamily64};

#[test]
fn reduced_formula_matches_polar_quadrature() {
    for n in [2u64, 8, 32] {
        let fam = MoserFamily64::new(n, 1.0, [0.0, 0.0]).unwrap();
        let reduced = fam.limite_integral().unwrap();
        let oracle = polar_oracle(&fam);
        assert!(
            (reduced - oracle).abs() <= 1e-6 * oracle,
            "n={n}: {reduced} vs {oracle}"
        );
    }
    // Off-center, non-unit radius.
    let fam = MoserFamily64::new(8, 0.4, [0.3, -0.2]).unwrap();
    let oracle = polar_oracle(&fam);
    assert!((fam.limite_integral().unwrap() - oracle).abs() <= 1e-6 * oracle);
}

#[test]
fn unit_norm() {
    for n in [2u64, 10, 100, 10_000] {
        let fam = MoserFamily64::new(n, 1.0, [0.0, 0.0]).unwrap();
        assert!((fam.norm_sq() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn lower_bound_chain() {
    let mut prev = 0.0;
    for n in 2u64..=2000 {
        let fam = MoserFamily64::new(n, 1.0, [0.0, 0.0]).unwrap();
        let li = fam.limite_integral().unwrap();
        let lb = fam.lower_bound();
        assert!((lb - PI * (3.0 - 2.0 / n as f64)).abs() < 1e-13);
        assert!(li >= lb, "n={n}: {li} < {lb}");
        assert!(lb >= PI);
        assert!(lb > prev && lb < 3.0 * PI);
        prev = lb;
    }
}

#[test]
fn scaling_in_d() {
    // The integral scales like d².
    let a = MoserFamily64::new(16, 1.0, [0.0, 0.0])
        .unwrap()
        .limite_integral()
        .unwrap();
    let b = MoserFamily64::new(16, 0.5, [0.0, 0.0])
        .unwrap()
        .limite_integral()
        .unwrap();
    assert!((b - 0.25 * a).abs() < 1e-12 * a);
}

#[test]
fn interpolant_energy_within_five_percent() {
    let d = 1.0;
    let grid = Grid64::new(DomainSpec::unit_disk(), d / 200.0).unwrap();
    for n in [2u64, 4, 8] {
        let fam = MoserFamily64::inscribed(n, &grid).unwrap();
        let e = fam.field(&grid).dirichlet_energy();
        assert!((e - 1.0).abs() < 0.05, "n={n}: discrete energy {e}");
    }
}

#[test]
fn interpolant_center_and_support() {
    let grid = Grid64::new(DomainSpec::unit_disk(), 1.0 / 32.0).unwrap();
    let fam = MoserFamily64::inscribed(8, &grid).unwrap();
    let g = fam.field(&grid);
    let top = (8f64.ln() / (2.0 * PI)).sqrt();
    assert!((g.max_value() - top).abs() < 1e-15);
    assert!(g.min_value() >= 0.0);
}
