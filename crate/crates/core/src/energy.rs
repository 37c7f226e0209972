//! The energy functional `I(u) = ½M(‖u‖²) − ∫F(x, u)`, its Riesz gradient
//! in the Dirichlet inner product, and the fibering map `h(t) = I(tu)`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{CgStats, Field, Grid};
use crate::model::{validate_hypotheses, HypothesisReport, KirchhoffCoefficient, Nonlinearity, SamplingSpec};
use crate::scalar::Real;

/// Relative tolerance on `h'(t*)` accepted by the Nehari projection.
pub const NEHARI_TOL: f64 = 1e-10;

/// Iteration cap for the bracketed root search along a ray.
pub const ROOT_STEPS: usize = 200;

/// Coefficient, nonlinearity and grid of one discrete problem.
#[derive(Debug, Clone)]
pub struct EnergyContext<T: Real> {
    pub coef: KirchhoffCoefficient<T>,
    pub nl: Nonlinearity<T>,
    pub grid: Arc<Grid<T>>,
}

/// Energy split into its two parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyParts<T> {
    pub dirichlet: T,
    pub kirchhoff: T,
    pub potential: T,
    pub total: T,
}

#[derive(Debug, Clone)]
pub struct GradientEval<T: Real> {
    /// Riesz representative `m(‖u‖²) u − (−Δ_h)⁻¹ f(·, u)`.
    pub gradient: Field<T>,
    /// `(−Δ_h)⁻¹ f(·, u)`, reusable as a warm start.
    pub riesz_source: Field<T>,
    pub m_value: T,
    pub cg: CgStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiberingSample<T> {
    pub t: T,
    pub h: T,
    pub h_prime: T,
}

#[derive(Debug, Clone)]
pub struct NehariProjection<T: Real> {
    pub t_star: T,
    pub field: Field<T>,
    /// `|h'(t*)| / (1 + m(t*²E) t* E)`.
    pub relative_residual: T,
    /// The ray had a negative part, outside the setting of the fibering
    /// analysis.
    pub sign_changing: bool,
}

impl<T: Real> EnergyContext<T> {
    pub fn new(coef: KirchhoffCoefficient<T>, nl: Nonlinearity<T>, grid: Arc<Grid<T>>) -> Self {
        Self { coef, nl, grid }
    }

    /// Construct after checking that (M1), (M3) and (f2) hold on `spec`.
    pub fn validated(
        coef: KirchhoffCoefficient<T>,
        nl: Nonlinearity<T>,
        grid: Arc<Grid<T>>,
        spec: &SamplingSpec,
    ) -> Result<(Self, HypothesisReport)> {
        let report = validate_hypotheses(&coef, &nl, grid.inradius(), spec)?;
        if let Some(e) = report.hard_failure() {
            return Err(Error::Hypothesis {
                name: e.hypothesis.name().to_string(),
                witness: e.witness.as_ref().and_then(|w| w.first().copied()),
            });
        }
        Ok((Self::new(coef, nl, grid), report))
    }

    fn check_field(&self, u: &Field<T>) {
        assert!(
            Arc::ptr_eq(u.grid(), &self.grid) || u.len() == self.grid.len(),
            "field does not live on the context grid"
        );
    }

    pub fn energy_parts(&self, u: &Field<T>) -> Result<EnergyParts<T>> {
        self.check_field(u);
        let dirichlet = u.dirichlet_energy();
        let kirchhoff = T::lit(0.5) * self.coef.eval_M(dirichlet)?;
        let potential = u.integrate(|x, s| self.nl.eval_F(x, s))?;
        Ok(EnergyParts {
            dirichlet,
            kirchhoff,
            potential,
            total: kirchhoff - potential,
        })
    }

    pub fn energy(&self, u: &Field<T>) -> Result<T> {
        Ok(self.energy_parts(u)?.total)
    }

    /// Pointwise `f(x_k, u_k)` as a field.
    pub fn source(&self, u: &Field<T>) -> Result<Field<T>> {
        self.check_field(u);
        let values = self
            .grid
            .coords()
            .iter()
            .zip(u.values())
            .map(|(&x, &s)| self.nl.eval_f(x, s))
            .collect::<Result<Vec<_>>>()?;
        Field::from_values(&self.grid, values)
    }

    pub fn gradient(&self, u: &Field<T>, tol: T) -> Result<Field<T>> {
        Ok(self.gradient_eval(u, None, tol)?.gradient)
    }

    /// Gradient with the CG solve started from `warm`.
    pub fn gradient_eval(&self, u: &Field<T>, warm: Option<&Field<T>>, tol: T) -> Result<GradientEval<T>> {
        let rhs = self.source(u)?;
        let solved = rhs.poisson_solve_from(warm, tol)?;
        let m_value = self.coef.eval_m(u.dirichlet_energy())?;
        let gradient = u.scaled(m_value).add_scaled(-T::one(), &solved.field);
        Ok(GradientEval {
            gradient,
            riesz_source: solved.field,
            m_value,
            cg: solved.stats,
        })
    }

    /// `⟨I'(u), φ⟩ = m(‖u‖²)⟨u, φ⟩_D − h² Σ f(x, u) φ`, without any solve.
    pub fn directional_derivative(&self, u: &Field<T>, phi: &Field<T>) -> Result<T> {
        let m_value = self.coef.eval_m(u.dirichlet_energy())?;
        let mut acc = T::zero();
        for ((&x, &s), &p) in self.grid.coords().iter().zip(u.values()).zip(phi.values()) {
            acc += self.nl.eval_f(x, s)? * p;
        }
        Ok(m_value * u.dirichlet_dot(phi) - acc * self.grid.cell_area())
    }

    /// `h'(t) = m(t²E) t E − ∫ f(x, t u) u` with `E = ‖u‖²`.
    pub fn fibering_derivative(&self, u: &Field<T>, t: T) -> Result<T> {
        if !(t > T::zero()) {
            return Err(Error::Domain(format!("fibering parameter must be positive, got {t}")));
        }
        self.fibering_derivative_with(u, u.dirichlet_energy(), t)
    }

    fn fibering_derivative_with(&self, u: &Field<T>, e: T, t: T) -> Result<T> {
        let m_value = self.coef.eval_m(t * t * e)?;
        let mut acc = T::zero();
        for (&x, &s) in self.grid.coords().iter().zip(u.values()) {
            if s > T::zero() {
                acc += self.nl.eval_f(x, t * s)? * s;
            }
        }
        Ok(m_value * t * e - acc * self.grid.cell_area())
    }

    pub fn fibering_sample(&self, u: &Field<T>, t: T) -> Result<FiberingSample<T>> {
        Ok(FiberingSample {
            t,
            h: self.energy(&u.scaled(t))?,
            h_prime: self.fibering_derivative(u, t)?,
        })
    }

    /// Largest `t` for which `f(·, t u)` stays below the overflow cap.
    pub fn ray_cap(&self, u: &Field<T>) -> T {
        let peak = u.max_value();
        if peak > T::zero() {
            self.nl.max_safe_amplitude() * (T::one() - T::lit(1e-12)) / peak
        } else {
            T::infinity()
        }
    }

    /// Scale `u` onto the Nehari manifold: find the root `t*` of `h'` by
    /// bracket doubling followed by bisection.
    pub fn nehari_project(&self, u: &Field<T>) -> Result<NehariProjection<T>> {
        self.check_field(u);
        if !(u.max_value() > T::zero()) {
            return Err(Error::Precondition(
                "Nehari projection needs a ray with a positive part".into(),
            ));
        }
        let sign_changing = u.min_value() < T::zero();
        let e = u.dirichlet_energy();
        let cap = self.ray_cap(u);
        let hp = |t: T| self.fibering_derivative_with(u, e, t);

        let mut t = T::one().min(cap);
        let mut v = hp(t)?;
        let (mut lo, mut hi);
        if v > T::zero() {
            lo = t;
            loop {
                if t >= cap {
                    return Err(Error::Projection {
                        t_max: cap.as_f64(),
                        h_prime: v.as_f64(),
                    });
                }
                t = (t + t).min(cap);
                v = hp(t)?;
                if v <= T::zero() {
                    hi = t;
                    break;
                }
                lo = t;
            }
        } else {
            hi = t;
            loop {
                t *= T::lit(0.5);
                if !(t > T::min_positive_value()) {
                    return Err(Error::Projection {
                        t_max: 0.0,
                        h_prime: v.as_f64(),
                    });
                }
                v = hp(t)?;
                if v > T::zero() {
                    lo = t;
                    break;
                }
                hi = t;
            }
        }
        // Illinois (bracketed secant), bisecting whenever the bracket fails
        // to halve over two steps.
        let (mut vlo, mut vhi) = (hp(lo)?, if v <= T::zero() { v } else { hp(hi)? });
        let (mut t_star, mut best) = if vlo.abs() < vhi.abs() {
            (lo, vlo.abs())
        } else {
            (hi, vhi.abs())
        };
        let mut side = 0i8;
        let mut width = hi - lo;
        for k in 0..ROOT_STEPS {
            if vlo == T::zero() || vhi == T::zero() || hi - lo <= T::lit(4.0) * T::epsilon() * hi {
                break;
            }
            let secant = hi - vhi * (hi - lo) / (vhi - vlo);
            let mid = if k % 2 == 1 && hi - lo > T::lit(0.5) * width {
                T::lit(0.5) * (lo + hi)
            } else if secant > lo && secant < hi {
                secant
            } else {
                T::lit(0.5) * (lo + hi)
            };
            if k % 2 == 1 {
                width = hi - lo;
            }
            if !(mid > lo && mid < hi) {
                break;
            }
            let vm = hp(mid)?;
            if vm > T::zero() {
                lo = mid;
                vlo = vm;
                if side == 1 {
                    vhi *= T::lit(0.5);
                }
                side = 1;
            } else {
                hi = mid;
                vhi = vm;
                if side == -1 {
                    vlo *= T::lit(0.5);
                }
                side = -1;
            }
            if vm.abs() <= best {
                t_star = mid;
                best = vm.abs();
            }
        }
        let residual = hp(t_star)?.abs();
        let scale = T::one() + self.coef.eval_m(t_star * t_star * e)? * t_star * e;
        Ok(NehariProjection {
            t_star,
            field: u.scaled(t_star),
            relative_residual: residual / scale,
            sign_changing,
        })
    }

    /// `max_{t>0} I(tu)`, attained at the Nehari projection.
    pub fn nehari_energy(&self, u: &Field<T>) -> Result<T> {
        let proj = self.nehari_project(u)?;
        self.energy(&proj.field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DomainSpec;

    fn ctx(coef: KirchhoffCoefficient<f64>, nl: Nonlinearity<f64>, h: f64) -> EnergyContext<f64> {
        let g = Grid::new(DomainSpec::unit_square(), h).unwrap();
        EnergyContext::new(coef, nl, g)
    }

    fn bump(g: &Arc<Grid<f64>>) -> Field<f64> {
        Field::from_fn(g, |p| {
            (std::f64::consts::PI * p[0]).sin() * (std::f64::consts::PI * p[1]).sin()
        })
    }

    #[test]
    fn zero_field() {
        let c = ctx(
            KirchhoffCoefficient::affine(1.0, 1.0).unwrap(),
            Nonlinearity::paper_example(1.0).unwrap(),
            0.1,
        );
        let z = Field::zeros(&c.grid);
        assert_eq!(c.energy(&z).unwrap(), 0.0);
        assert!(c.gradient(&z, 1e-12).unwrap().is_zero());
        assert!(matches!(c.nehari_project(&z), Err(Error::Precondition(_))));
    }

    #[test]
    fn single_node_closed_form() {
        let c = ctx(
            KirchhoffCoefficient::affine(1.0, 1.0).unwrap(),
            Nonlinearity::paper_example(1.0).unwrap(),
            0.25,
        );
        let mut u = Field::zeros(&c.grid);
        let s = 0.7;
        u.values_mut()[4] = s;
        // Four boundary-or-zero edges around an isolated node.
        let t = 4.0 * s * s;
        let big_f = s.powi(4) / 4.0 + s * s * (s * s).exp_m1();
        let expected = 0.5 * (t + t * t / 2.0) - big_f * 0.0625;
        assert!((c.energy(&u).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn fibering_at_one_matches_gradient_pairing() {
        let c = ctx(
            KirchhoffCoefficient::affine(1.0, 1.0).unwrap(),
            Nonlinearity::paper_example(1.0).unwrap(),
            1.0 / 16.0,
        );
        let u = bump(&c.grid).scaled(1.3);
        let g = c.gradient(&u, 1e-13).unwrap();
        let pairing = g.dirichlet_dot(&u);
        let hp = c.fibering_derivative(&u, 1.0).unwrap();
        assert!((pairing - hp).abs() < 1e-8 * (1.0 + hp.abs()), "{pairing} vs {hp}");
    }

    #[test]
    fn projection_closed_form_cubic() {
        let c = ctx(
            KirchhoffCoefficient::constant(1.0).unwrap(),
            Nonlinearity::power(3.0).unwrap(),
            0.1,
        );
        let u = bump(&c.grid);
        let e = u.dirichlet_energy();
        let l4 = u.integrate(|_, s| Ok(s.powi(4))).unwrap();
        let p = c.nehari_project(&u).unwrap();
        assert!((p.t_star - (e / l4).sqrt()).abs() < 1e-10 * p.t_star);
        let b = c.nehari_energy(&u).unwrap();
        assert!((b - e * e / (4.0 * l4)).abs() < 1e-10 * b);
    }

    #[test]
    fn projection_affine_cubic_and_error_branch() {
        // h'(t)/t = m0·E + t²(a·E² − ∫u⁴): a root exists iff a·E² < ∫u⁴.
        let grid = Grid::new(DomainSpec::unit_square(), 0.1).unwrap();
        let u = bump(&grid);
        let e = u.dirichlet_energy();
        let l4 = u.integrate(|_, s| Ok(s.powi(4))).unwrap();
        let a = 0.5 * l4 / (e * e);
        let c = EnergyContext::new(
            KirchhoffCoefficient::affine(1.0, a).unwrap(),
            Nonlinearity::power(3.0).unwrap(),
            Arc::clone(&grid),
        );
        let p = c.nehari_project(&u).unwrap();
        assert!((p.t_star - (e / (l4 - a * e * e)).sqrt()).abs() < 1e-10 * p.t_star);

        let c = EnergyContext::new(
            KirchhoffCoefficient::affine(1.0, 2.0 * l4 / (e * e)).unwrap(),
            Nonlinearity::power(3.0).unwrap(),
            grid,
        );
        assert!(matches!(c.nehari_project(&u), Err(Error::Projection { .. })));
    }

    #[test]
    fn fibering_positive_near_zero() {
        let c = ctx(
            KirchhoffCoefficient::affine(1.0, 1.0).unwrap(),
            Nonlinearity::paper_example(1.0).unwrap(),
            0.1,
        );
        let u = bump(&c.grid);
        for t in [1e-4, 1e-3, 1e-2] {
            assert!(c.fibering_derivative(&u, t).unwrap() > 0.0);
        }
        assert!(c.fibering_derivative(&u, 0.0).is_err());
    }

    #[test]
    fn overflowing_field_reports_overflow() {
        let c = ctx(
            KirchhoffCoefficient::affine(1.0, 1.0).unwrap(),
            Nonlinearity::paper_example(1.0).unwrap(),
            0.1,
        );
        let u = bump(&c.grid).scaled(40.0);
        assert!(c.energy(&u).unwrap_err().is_overflow());
    }

    #[test]
    fn validated_context_rejects_linear_f() {
        let g = Grid::new(DomainSpec::unit_square(), 0.1).unwrap();
        let r = EnergyContext::validated(
            KirchhoffCoefficient::constant(1.0).unwrap(),
            Nonlinearity::power(1.0).unwrap(),
            g,
            &SamplingSpec::default(),
        );
        assert!(matches!(r, Err(Error::Hypothesis { .. })));
    }
}
