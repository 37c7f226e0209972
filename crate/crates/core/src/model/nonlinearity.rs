use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::scalar::Real;

/// A point of the plane.
pub type Point<T> = [T; 2];

pub type PointwiseFn<T> = Arc<dyn Fn(Point<T>, T) -> T + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearityKind {
    PaperExample,
    Power,
    Custom,
}

/// Parameters of the growth hypotheses on `f`: the ratio bound
/// `F ≤ K0·f` for `s ≥ s0`, and the limit constant `beta0`
/// (`None` selects the validator default).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthParams<T> {
    pub s0: T,
    pub k0: T,
    pub beta0: Option<T>,
}

#[derive(Clone)]
enum Shape<T> {
    /// `F(s) = s⁴/4 + s²(exp(α₀s²) − 1)`.
    Exponential {
        alpha0: T,
    },
    Power {
        p: T,
    },
    Custom {
        name: String,
        f: PointwiseFn<T>,
        primitive: Option<PointwiseFn<T>>,
        alpha0: Option<T>,
        max_amplitude: T,
    },
}

/// The nonlinearity `f(x, s)` and its primitive `F(x, s) = ∫₀ˢ f(x, τ) dτ`.
///
/// Every instance vanishes for `s ≤ 0`.
#[derive(Clone)]
pub struct Nonlinearity<T: Real> {
    shape: Shape<T>,
    params: GrowthParams<T>,
}

impl<T: Real> fmt::Debug for Nonlinearity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("Nonlinearity");
        match &self.shape {
            Shape::Exponential { alpha0 } => s.field("kind", &"paper_example").field("alpha0", alpha0),
            Shape::Power { p } => s.field("kind", &"power").field("p", p),
            Shape::Custom { name, alpha0, .. } => s.field("kind", name).field("alpha0", alpha0),
        };
        s.field("params", &self.params).finish()
    }
}

fn default_params<T: Real>() -> GrowthParams<T> {
    GrowthParams {
        s0: T::one(),
        k0: T::one(),
        beta0: None,
    }
}

impl<T: Real> Nonlinearity<T> {
    /// Exponential critical growth with exponent `alpha0`.
    pub fn paper_example(alpha0: T) -> Result<Self> {
        if !(alpha0 > T::zero()) || !alpha0.is_finite() {
            return Err(Error::Domain(format!("alpha0 must be positive, got {alpha0}")));
        }
        Ok(Self {
            shape: Shape::Exponential { alpha0 },
            params: default_params(),
        })
    }

    /// `f(s) = s^p` for `s > 0`.
    pub fn power(p: T) -> Result<Self> {
        if !(p > T::zero()) || !p.is_finite() {
            return Err(Error::Domain(format!("power exponent must be positive, got {p}")));
        }
        Ok(Self {
            shape: Shape::Power { p },
            params: default_params(),
        })
    }

    /// User-supplied `f`. The closure is only called for `s > 0`.
    pub fn custom(name: impl Into<String>, f: impl Fn(Point<T>, T) -> T + Send + Sync + 'static) -> Self {
        Self {
            shape: Shape::Custom {
                name: name.into(),
                f: Arc::new(f),
                primitive: None,
                alpha0: None,
                max_amplitude: T::infinity(),
            },
            params: default_params(),
        }
    }

    pub fn with_primitive(mut self, primitive: impl Fn(Point<T>, T) -> T + Send + Sync + 'static) -> Self {
        if let Shape::Custom { primitive: p, .. } = &mut self.shape {
            *p = Some(Arc::new(primitive));
        }
        self
    }

    /// Declare the critical exponent and the largest safe amplitude of a
    /// custom nonlinearity.
    pub fn with_critical_growth(mut self, alpha0: Option<T>, max_amplitude: T) -> Self {
        if let Shape::Custom {
            alpha0: a,
            max_amplitude: m,
            ..
        } = &mut self.shape
        {
            *a = alpha0;
            *m = max_amplitude;
        }
        self
    }

    pub fn with_params(mut self, params: GrowthParams<T>) -> Self {
        self.params = params;
        self
    }

    pub fn params(&self) -> GrowthParams<T> {
        self.params
    }

    pub fn kind(&self) -> NonlinearityKind {
        match self.shape {
            Shape::Exponential { .. } => NonlinearityKind::PaperExample,
            Shape::Power { .. } => NonlinearityKind::Power,
            Shape::Custom { .. } => NonlinearityKind::Custom,
        }
    }

    /// Critical exponent α₀, if the growth is exponential-critical.
    pub fn alpha0(&self) -> Option<T> {
        match &self.shape {
            Shape::Exponential { alpha0 } => Some(*alpha0),
            Shape::Power { .. } => None,
            Shape::Custom { alpha0, .. } => *alpha0,
        }
    }

    pub fn power_exponent(&self) -> Option<T> {
        match self.shape {
            Shape::Power { p } => Some(p),
            _ => None,
        }
    }

    /// Largest `s` at which `f` and `F` can be evaluated without overflow.
    pub fn max_safe_amplitude(&self) -> T {
        match &self.shape {
            Shape::Exponential { alpha0 } => (T::exp_cap() / *alpha0).sqrt(),
            Shape::Power { p } => (T::exp_cap() / (*p + T::one())).exp(),
            Shape::Custom { max_amplitude, .. } => *max_amplitude,
        }
    }

    fn check_amplitude(&self, s: T) -> Result<()> {
        match &self.shape {
            Shape::Exponential { alpha0 } => {
                let arg = *alpha0 * s * s;
                if arg > T::exp_cap() {
                    return Err(Error::overflow(arg.as_f64(), T::EXP_ARG_CAP));
                }
            }
            Shape::Power { p } => {
                let arg = (*p + T::one()) * s.ln();
                if arg > T::exp_cap() {
                    return Err(Error::overflow(arg.as_f64(), T::EXP_ARG_CAP));
                }
            }
            Shape::Custom { max_amplitude, .. } => {
                if s > *max_amplitude {
                    return Err(Error::overflow(s.as_f64(), max_amplitude.as_f64()));
                }
            }
        }
        Ok(())
    }

    fn finite(v: T, s: T) -> Result<T> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::overflow(s.as_f64(), f64::NAN))
        }
    }

    pub fn eval_f(&self, x: Point<T>, s: T) -> Result<T> {
        if !(s > T::zero()) {
            return Ok(T::zero());
        }
        self.check_amplitude(s)?;
        let two = T::lit(2.0);
        let v = match &self.shape {
            Shape::Exponential { alpha0 } => {
                let arg = *alpha0 * s * s;
                let s3 = s * s * s;
                s3 + two * s * arg.exp_m1() + two * *alpha0 * s3 * arg.exp()
            }
            Shape::Power { p } => pow(s, *p),
            Shape::Custom { f, .. } => f(x, s),
        };
        Self::finite(v, s)
    }

    #[allow(non_snake_case)]
    pub fn eval_F(&self, x: Point<T>, s: T) -> Result<T> {
        if !(s > T::zero()) {
            return Ok(T::zero());
        }
        self.check_amplitude(s)?;
        let v = match &self.shape {
            Shape::Exponential { alpha0 } => {
                let s2 = s * s;
                s2 * s2 * T::lit(0.25) + s2 * (*alpha0 * s2).exp_m1()
            }
            Shape::Power { p } => pow(s, *p + T::one()) / (*p + T::one()),
            Shape::Custom {
                primitive: Some(prim), ..
            } => prim(x, s),
            Shape::Custom { f, .. } => {
                let tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
                quadrature::integrate(|tau| Ok(f(x, tau)), T::zero(), s, tol)?.value
            }
        };
        Self::finite(v, s)
    }
}

fn pow<T: Real>(s: T, p: T) -> T {
    if p.fract() == T::zero() && p.abs() < T::lit(64.0) {
        s.powi(p.to_i32().unwrap_or(0))
    } else {
        s.powf(p)
    }
}
