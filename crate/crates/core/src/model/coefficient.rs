use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::scalar::Real;

pub type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientKind {
    Constant,
    Affine,
    Logarithmic,
    Custom,
}

/// Parameters of the growth bound `m(t) ≤ a1 + a2·t^σ` for `t ≥ t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBound<T> {
    pub a1: T,
    pub a2: T,
    pub sigma: T,
    pub t0: T,
}

#[derive(Clone)]
enum Shape<T> {
    Affine {
        m0: T,
        a: T,
    },
    Logarithmic,
    Custom {
        name: String,
        m: ScalarFn<T>,
        primitive: Option<ScalarFn<T>>,
    },
}

/// The Kirchhoff coefficient `m` together with its primitive `M(t) = ∫₀ᵗ m`.
#[derive(Clone)]
pub struct KirchhoffCoefficient<T: Real> {
    shape: Shape<T>,
    kind: CoefficientKind,
    m0: T,
    growth: GrowthBound<T>,
}

impl<T: Real> fmt::Debug for KirchhoffCoefficient<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("KirchhoffCoefficient");
        s.field("kind", &self.kind).field("m0", &self.m0);
        match &self.shape {
            Shape::Affine { a, .. } => s.field("a", a),
            Shape::Logarithmic => &mut s,
            Shape::Custom { name, .. } => s.field("name", name),
        };
        s.field("growth", &self.growth).finish()
    }
}

impl<T: Real> KirchhoffCoefficient<T> {
    /// `m ≡ m0`.
    pub fn constant(m0: T) -> Result<Self> {
        let mut c = Self::affine(m0, T::zero())?;
        c.kind = CoefficientKind::Constant;
        Ok(c)
    }

    /// `m(t) = m0 + a·t`.
    pub fn affine(m0: T, a: T) -> Result<Self> {
        if !(m0 > T::zero()) || !m0.is_finite() {
            return Err(Error::Domain(format!("m0 must be positive, got {m0}")));
        }
        if !(a >= T::zero()) || !a.is_finite() {
            return Err(Error::Domain(format!("affine slope must be nonnegative, got {a}")));
        }
        let growth = GrowthBound {
            a1: m0,
            a2: if a > T::zero() { a } else { T::one() },
            sigma: T::one(),
            t0: T::one(),
        };
        Ok(Self {
            shape: Shape::Affine { m0, a },
            kind: if a == T::zero() {
                CoefficientKind::Constant
            } else {
                CoefficientKind::Affine
            },
            m0,
            growth,
        })
    }

    /// `m(t) = 1 + ln(1 + t)`.
    pub fn logarithmic() -> Self {
        Self {
            shape: Shape::Logarithmic,
            kind: CoefficientKind::Logarithmic,
            m0: T::one(),
            growth: GrowthBound {
                a1: T::one(),
                a2: T::one(),
                sigma: T::one(),
                t0: T::one(),
            },
        }
    }

    /// User-supplied coefficient. `m0` is the claimed lower bound; it is
    /// checked by the hypothesis validator, not here. Without a primitive,
    /// `M` is evaluated by adaptive quadrature.
    pub fn custom(name: impl Into<String>, m0: T, m: impl Fn(T) -> T + Send + Sync + 'static) -> Result<Self> {
        if !(m0 > T::zero()) {
            return Err(Error::Domain(format!("m0 must be positive, got {m0}")));
        }
        Ok(Self {
            shape: Shape::Custom {
                name: name.into(),
                m: Arc::new(m),
                primitive: None,
            },
            kind: CoefficientKind::Custom,
            m0,
            growth: GrowthBound {
                a1: T::one(),
                a2: T::one(),
                sigma: T::one(),
                t0: T::one(),
            },
        })
    }

    /// Attach a closed-form primitive to a custom coefficient.
    pub fn with_primitive(mut self, primitive: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        if let Shape::Custom { primitive: p, .. } = &mut self.shape {
            *p = Some(Arc::new(primitive));
        }
        self
    }

    pub fn with_growth(mut self, growth: GrowthBound<T>) -> Self {
        self.growth = growth;
        self
    }

    pub fn kind(&self) -> CoefficientKind {
        self.kind
    }

    pub fn m0(&self) -> T {
        self.m0
    }

    pub fn growth(&self) -> GrowthBound<T> {
        self.growth
    }

    /// Affine slope, when the coefficient is affine or constant.
    pub fn slope(&self) -> Option<T> {
        match self.shape {
            Shape::Affine { a, .. } => Some(a),
            _ => None,
        }
    }

    /// True when `m` is a constant function.
    pub fn is_constant(&self) -> bool {
        matches!(self.shape, Shape::Affine { a, .. } if a == T::zero())
    }

    fn check_arg(t: T) -> Result<()> {
        if t >= T::zero() && t.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "coefficient argument must be a finite t ≥ 0, got {t}"
            )))
        }
    }

    pub fn eval_m(&self, t: T) -> Result<T> {
        Self::check_arg(t)?;
        Ok(self.m_unchecked(t))
    }

    fn m_unchecked(&self, t: T) -> T {
        match &self.shape {
            Shape::Affine { m0, a } => *m0 + *a * t,
            Shape::Logarithmic => T::one() + t.ln_1p(),
            Shape::Custom { m, .. } => m(t),
        }
    }

    /// Primitive `M(t) = ∫₀ᵗ m(s) ds`.
    #[allow(non_snake_case)]
    pub fn eval_M(&self, t: T) -> Result<T> {
        Self::check_arg(t)?;
        match &self.shape {
            Shape::Affine { m0, a } => Ok(*m0 * t + *a * t * t * T::lit(0.5)),
            Shape::Logarithmic => Ok((T::one() + t) * t.ln_1p()),
            Shape::Custom { primitive: Some(p), .. } => Ok(p(t)),
            Shape::Custom { m, .. } => {
                let tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0) * (T::one() + t));
                let q = quadrature::integrate(|s| Ok(m(s)), T::zero(), t, tol)?;
                Ok(q.value)
            }
        }
    }
}
