use std::f64::consts::PI;
use std::sync::Arc;

use kirchhoff_core::{DomainSpec, Field, Field32, Grid, Grid32};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_field(grid: &Arc<Grid<f64>>, seed: u64) -> Field<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Field::from_values(grid, v).unwrap()
}

fn domains() -> [DomainSpec<f64>; 3] {
    [
        DomainSpec::unit_square(),
        DomainSpec::unit_disk(),
        DomainSpec::Rectangle {
            width: 2.0,
            height: 0.7,
        },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn laplacian_is_symmetric_positive(seed in any::<u64>(), which in 0usize..3, k in 3u32..7) {
        let grid = Grid::new(domains()[which], 1.0 / f64::from(1 << k)).unwrap();
        let u = random_field(&grid, seed);
        let v = random_field(&grid, seed ^ 0x9e37_79b9);
        let (auv, uav) = (u.neg_laplacian().l2_dot(&v), u.l2_dot(&v.neg_laplacian()));
        prop_assert!((auv - uav).abs() <= 1e-12 * (auv.abs() + 1.0));
        let e = u.dirichlet_energy();
        prop_assert!(e > 0.0);
        prop_assert!((e - u.l2_dot(&u.neg_laplacian())).abs() <= 1e-12 * e);
        prop_assert!((u.dirichlet_dot(&v) - auv).abs() <= 1e-12 * (auv.abs() + 1.0));
    }

    #[test]
    fn poisson_solve_inverts_laplacian(seed in any::<u64>(), which in 0usize..3) {
        let grid = Grid::new(domains()[which], 1.0 / 32.0).unwrap();
        let rhs = random_field(&grid, seed);
        let v = rhs.poisson_solve(1e-11).unwrap();
        let r = v.neg_laplacian().add_scaled(-1.0, &rhs).vec_norm();
        prop_assert!(r <= 1e-11 * rhs.vec_norm());
    }
}

fn eigen_quotient(h: f64) -> f64 {
    let grid = Grid::new(DomainSpec::unit_square(), h).unwrap();
    let u = Field::from_fn(&grid, |p| (PI * p[0]).sin() * (PI * p[1]).sin());
    u.dirichlet_energy() / u.l2_dot(&u)
}

#[test]
fn eigenfunction_energy_converges_at_second_order() {
    let hs = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];
    let errs: Vec<f64> = hs.iter().map(|&h| (eigen_quotient(h) - 2.0 * PI * PI).abs()).collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.8, "observed order {order}");
    }
    // The sampled eigenfunction is an exact discrete eigenvector.
    for &h in &hs {
        let discrete = 8.0 / (h * h) * (PI * h / 2.0).sin().powi(2);
        assert!((eigen_quotient(h) - discrete).abs() < 1e-10 * discrete);
    }
}

#[test]
fn inverse_power_iteration_finds_discrete_eigenvalue() {
    let h = 1.0 / 32.0;
    let grid = Grid::new(DomainSpec::unit_square(), h).unwrap();
    let mut u = Field::from_fn(&grid, |p| p[0] * (1.0 - p[0]) * p[1] * (1.0 - p[1]) * (1.0 + p[0]));
    let mut lambda = 0.0;
    for _ in 0..60 {
        let v = u.poisson_solve(1e-13).unwrap();
        lambda = u.l2_dot(&u) / u.l2_dot(&v);
        u = v.scaled(1.0 / v.vec_norm());
    }
    let exact = 8.0 / (h * h) * (PI * h / 2.0).sin().powi(2);
    assert!((lambda - exact).abs() < 1e-9 * exact, "{lambda} vs {exact}");
}

#[test]
fn unit_load_center_value() {
    let grid = Grid::<f64>::new(DomainSpec::unit_square(), 1.0 / 64.0).unwrap();
    let one = Field::from_fn(&grid, |_| 1.0);
    let v = one.poisson_solve(1e-12).unwrap();
    let k = grid.interior_index(32, 32).unwrap();
    assert_eq!(grid.coords()[k], [0.5, 0.5]);
    // Series solution of −Δv = 1 on the unit square: v(½, ½) = 0.0736713532...
    assert!((v.values()[k] - 0.07367).abs() < 1e-4, "{}", v.values()[k]);
    assert!(v.min_value() > 0.0);
}

#[test]
fn disk_grid_is_mirror_symmetric() {
    let grid = Grid::<f64>::new(DomainSpec::unit_disk(), 1.0 / 16.0).unwrap();
    let one = Field::from_fn(&grid, |_| 1.0);
    let v = one.poisson_solve(1e-12).unwrap();
    let (nx, ny) = grid.box_dims();
    for k in 0..grid.len() {
        let (i, j) = grid.node(k);
        for (mi, mj) in [(nx - 1 - i, j), (i, ny - 1 - j), (j, i)] {
            let m = grid.interior_index(mi, mj).expect("mirror node is interior");
            assert!((v.values()[k] - v.values()[m]).abs() < 1e-10);
        }
    }
}

#[test]
fn single_precision_grid() {
    let grid: Arc<Grid32> = Grid::new(DomainSpec::unit_square(), 1.0 / 16.0).unwrap();
    let one: Field32 = Field::from_fn(&grid, |_| 1.0);
    let v = one.poisson_solve(1e-5).unwrap();
    let k = grid.interior_index(8, 8).unwrap();
    assert!((v.values()[k] - 0.0737).abs() < 5e-4);
}

#[test]
fn resolution_error_for_tiny_disk() {
    let spec = DomainSpec::Disk {
        center: [0.0, 0.0],
        radius: 0.05,
    };
    assert!(Grid::new(spec, 0.1).is_err());
}
