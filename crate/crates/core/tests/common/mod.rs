#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use kirchhoff_core::{Field, Grid, MoserFamily};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `∫_{B_d} exp(4π G_n²)` as a tensor Gauss–Legendre rule in `(r, θ)`,
/// with the radial range split at the kink `r = d/n` and graded panels
/// towards the center.
pub fn polar_oracle(fam: &MoserFamily<f64>) -> f64 {
    let rule = GaussLegendre::new(30).unwrap();
    let d = fam.d();
    let inner = d / fam.n() as f64;
    let c = fam.center();
    let integrand = |r: f64, th: f64| {
        let g = fam.value([c[0] + r * th.cos(), c[1] + r * th.sin()]);
        (4.0 * PI * g * g).exp() * r
    };
    let angular = |r: f64| {
        (0..4)
            .map(|q| {
                let (a, b) = (q as f64 * PI / 2.0, (q + 1) as f64 * PI / 2.0);
                rule.integrate(a, b, |th| integrand(r, th))
            })
            .sum::<f64>()
    };
    // Geometric panels on [d/n, d].
    let panels = 40;
    let ratio = (d / inner).powf(1.0 / panels as f64);
    let outer: f64 = (0..panels)
        .map(|k| {
            let (a, b) = (inner * ratio.powi(k), inner * ratio.powi(k + 1));
            rule.integrate(a, b, angular)
        })
        .sum();
    rule.integrate(0.0, inner, angular) + outer
}

/// Smooth random field: a few sine modes with random amplitudes, plus a
/// positive offset mode when `positive` is set.
pub fn smooth_random(grid: &Arc<Grid<f64>>, rng: &mut ChaCha8Rng, amplitude: f64, positive: bool) -> Field<f64> {
    let modes: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.gen_range(1..4) as f64,
                rng.gen_range(1..4) as f64,
                rng.gen_range(-0.3..0.3),
            )
        })
        .collect();
    Field::from_fn(grid, |p| {
        let base = (PI * p[0]).sin() * (PI * p[1]).sin();
        let wiggle: f64 = modes
            .iter()
            .map(|&(k, l, a)| a * (k * PI * p[0]).sin() * (l * PI * p[1]).sin())
            .sum();
        let v = amplitude
            * (if positive {
                base + 0.3 * wiggle * base
            } else {
                base + wiggle
            });
        if positive {
            v.max(0.0)
        } else {
            v
        }
    })
}

/// Ground state of the discrete Lane–Emden problem `−Δ_h u = u³` by the
/// Petviashvili iteration `u ← S(u)^{3/2} (−Δ_h)⁻¹ u³` with stabilizing
/// factor `S(u) = ⟨u, −Δ_h u⟩ / ⟨u, u³⟩`. Returns the energy `¼ ∫ u⁴`.
pub fn lane_emden_energy(grid: &Arc<Grid<f64>>, tol: f64) -> f64 {
    let mut u = Field::from_fn(grid, |p| {
        let c = grid.center();
        let r2 = (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2);
        (1.0 - 4.0 * r2).max(0.0) + 1e-3
    });
    let mut prev = f64::INFINITY;
    for _ in 0..500 {
        let cube = u.map(|s| s * s * s);
        let s = u.dirichlet_energy() / u.l2_dot(&cube);
        u = cube.poisson_solve(1e-11).unwrap().scaled(s.powf(1.5));
        let energy = 0.25 * u.integrate(|_, v| Ok(v.powi(4))).unwrap();
        if (energy - prev).abs() <= tol * energy && (s - 1.0).abs() <= tol {
            return energy;
        }
        prev = energy;
    }
    panic!("Petviashvili iteration did not settle");
}
