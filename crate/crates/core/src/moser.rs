//! Moser's concentrating family and the level estimates built on it.
//!
//! `G_n` is the truncated logarithmic profile centred at `x0` with support
//! in `B_d(x0)`:
//!
//! ```text
//!            ⎧ (log n)^{1/2}                  r ≤ d/n
//! √(2π) G_n = ⎨ log(d/r) / (log n)^{1/2}       d/n ≤ r ≤ d
//!            ⎩ 0                              r ≥ d
//! ```
//!
//! Its Dirichlet energy is exactly one, and
//! `∫_{B_d} exp(4π G_n²) = πd² + 2πd² log n ∫₀¹ n^{2s²−2s} ds`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::model::{KirchhoffCoefficient, Point};
use crate::quadrature;
use crate::scalar::Real;

/// Absolute tolerance for the reduced integral `Q(n)`.
pub const Q_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoserFamily<T> {
    n: u64,
    d: T,
    center: Point<T>,
}

/// One row of the lower-bound table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoserRow {
    pub n: u64,
    pub q: f64,
    pub limite_integral: f64,
    pub lower_bound: f64,
    pub limit: f64,
}

impl<T: Real> MoserFamily<T> {
    pub fn new(n: u64, d: T, center: Point<T>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("Moser index must be at least 2, got {n}")));
        }
        if !(d > T::zero()) || !d.is_finite() {
            return Err(Error::Domain(format!("ball radius must be positive, got {d}")));
        }
        Ok(Self { n, d, center })
    }

    /// Family centred in the largest inscribed ball of `grid`'s domain.
    pub fn inscribed(n: u64, grid: &Grid<T>) -> Result<Self> {
        Self::new(n, grid.inradius(), grid.center())
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn d(&self) -> T {
        self.d
    }

    pub fn center(&self) -> Point<T> {
        self.center
    }

    fn log_n(&self) -> T {
        T::from_u64(self.n).expect("n representable").ln()
    }

    /// Profile as a function of the distance `r` to the center.
    pub fn radial(&self, r: T) -> T {
        let inv_sqrt_2pi = (T::TAU()).sqrt().recip();
        let log_n = self.log_n();
        let inner = self.d / T::from_u64(self.n).expect("n representable");
        if r <= inner {
            inv_sqrt_2pi * log_n.sqrt()
        } else if r < self.d {
            inv_sqrt_2pi * (self.d / r).ln() / log_n.sqrt()
        } else {
            T::zero()
        }
    }

    pub fn value(&self, x: Point<T>) -> T {
        let (dx, dy) = (x[0] - self.center[0], x[1] - self.center[1]);
        self.radial(dx.hypot(dy))
    }

    /// Analytic Dirichlet energy `2π ∫_{d/n}^{d} |G_n'(r)|² r dr`.
    ///
    /// On the annulus `|G_n'(r)|² = 1/(2π r² log n)`, so the integrand is
    /// `1/(r log n)` and the integral is `[ln r]_{d/n}^{d} / log n`.
    pub fn norm_sq(&self) -> T {
        let log_n = self.log_n();
        let inner = self.d / T::from_u64(self.n).expect("n representable");
        let two_pi = T::TAU();
        let prefactor = two_pi / (two_pi * log_n);
        prefactor * (self.d.ln() - inner.ln())
    }

    /// `Q(n) = ∫₀¹ n^{2s²−2s} ds` by adaptive quadrature.
    pub fn q_integral(&self) -> Result<T> {
        let log_n = self.log_n();
        let two = T::lit(2.0);
        let integrand = |s: T| Ok((log_n * (two * s * s - two * s)).exp());
        let tol = T::lit(Q_TOLERANCE).max(T::epsilon() * T::lit(16.0));
        let half = T::lit(0.5);
        // Split at the interior minimum s = 1/2.
        let left = quadrature::integrate(integrand, T::zero(), half, tol * half)?;
        let right = quadrature::integrate(integrand, half, T::one(), tol * half)?;
        Ok(left.value + right.value)
    }

    /// `∫_{B_d(x0)} exp(4π G_n²) dx` through the reduced one-dimensional form.
    pub fn limite_integral(&self) -> Result<T> {
        let pi_d2 = T::PI() * self.d * self.d;
        Ok(pi_d2 + T::lit(2.0) * pi_d2 * self.log_n() * self.q_integral()?)
    }

    /// `πd²(1 + 2(1 − 1/n))`, the bound obtained from `2s² − 2s ≥ −2s` on
    /// `[0, ½]` and `≥ 2s − 2` on `[½, 1]`.
    pub fn lower_bound(&self) -> T {
        let n = T::from_u64(self.n).expect("n representable");
        T::PI() * self.d * self.d * (T::one() + T::lit(2.0) * (T::one() - n.recip()))
    }

    /// Limit `3πd²` of the lower bounds.
    pub fn limit(&self) -> T {
        T::lit(3.0) * T::PI() * self.d * self.d
    }

    pub fn row(&self) -> Result<MoserRow> {
        let q = self.q_integral()?;
        let pi_d2 = T::PI() * self.d * self.d;
        let li = pi_d2 + T::lit(2.0) * pi_d2 * self.log_n() * q;
        Ok(MoserRow {
            n: self.n,
            q: q.as_f64(),
            limite_integral: li.as_f64(),
            lower_bound: self.lower_bound().as_f64(),
            limit: self.limit().as_f64(),
        })
    }

    /// Nodal interpolant on `grid`.
    pub fn field(&self, grid: &Arc<Grid<T>>) -> Field<T> {
        Field::from_fn(grid, |x| self.value(x))
    }
}

/// `½ M(4π/α₀)`: the strict upper bound for the mountain-pass level.
pub fn level_threshold<T: Real>(coef: &KirchhoffCoefficient<T>, alpha0: T) -> Result<T> {
    if !(alpha0 > T::zero()) {
        return Err(Error::Domain(format!("alpha0 must be positive, got {alpha0}")));
    }
    Ok(T::lit(0.5) * coef.eval_M(T::lit(4.0) * T::PI() / alpha0)?)
}

/// `(2/(α₀d²))·m(4π/α₀)`, the value β₀ must exceed.
pub fn f3_threshold<T: Real>(coef: &KirchhoffCoefficient<T>, alpha0: T, d: T) -> Result<T> {
    if !(alpha0 > T::zero()) || !(d > T::zero()) {
        return Err(Error::Domain(format!(
            "alpha0 and d must be positive, got {alpha0} and {d}"
        )));
    }
    Ok(T::lit(2.0) / (alpha0 * d * d) * coef.eval_m(T::lit(4.0) * T::PI() / alpha0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn fam(n: u64) -> MoserFamily<f64> {
        MoserFamily::new(n, 1.0, [0.0, 0.0]).unwrap()
    }

    #[test]
    fn center_value() {
        // (ln 8)^{1/2} / √(2π)
        assert!((fam(8).value([0.0, 0.0]) - 0.575_285_494_540_734_4).abs() < 1e-15);
    }

    #[test]
    fn breakpoints() {
        let f = fam(8);
        assert_eq!(f.radial(1.0), 0.0);
        assert_eq!(f.radial(2.0), 0.0);
        let inner = (8f64.ln()).sqrt() / (2.0 * PI).sqrt();
        assert!((f.radial(1.0 / 8.0) - inner).abs() < 1e-15);
        assert!((f.radial(1.0 / 8.0 + 1e-12) - inner).abs() < 1e-10);
    }

    #[test]
    fn rejects_small_n() {
        assert!(MoserFamily::new(1, 1.0, [0.0, 0.0]).is_err());
        assert!(MoserFamily::new(2, 0.0, [0.0, 0.0]).is_err());
    }

    #[test]
    fn unit_norm_independent_of_d() {
        for d in [0.1f64, 1.0, 7.5] {
            let f = MoserFamily::new(37, d, [1.0, 2.0]).unwrap();
            assert!((f.norm_sq() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reduced_integral_reference_values() {
        // mpmath, 30 digits.
        let cases = [
            (2, 0.798_039_139_327_817_7, 6.617_190_512_226_021),
            (8, 0.526_059_746_044_789_4, 10.014_834_967_524_465),
            (65536, 0.102_479_707_707_568, 10.282_661_006_945_918),
        ];
        for (n, q, li) in cases {
            let f = fam(n);
            assert!((f.q_integral().unwrap() - q).abs() < 1e-10, "n={n}");
            assert!((f.limite_integral().unwrap() - li).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn thresholds() {
        let unit = KirchhoffCoefficient::constant(1.0).unwrap();
        let affine = KirchhoffCoefficient::affine(1.0, 1.0).unwrap();
        assert!((level_threshold(&unit, 4.0 * PI).unwrap() - 0.5).abs() < 1e-15);
        assert!((level_threshold(&unit, 1.0).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((level_threshold(&affine, 1.0).unwrap() - (2.0 * PI + 4.0 * PI * PI)).abs() < 1e-12);
        assert!((f3_threshold(&unit, 1.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((f3_threshold(&affine, 1.0, 1.0).unwrap() - 2.0 * (1.0 + 4.0 * PI)).abs() < 1e-12);
        assert!((f3_threshold(&unit, 1.0, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(level_threshold(&unit, 0.0).is_err());
    }
}
