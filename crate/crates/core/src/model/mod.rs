//! Kirchhoff coefficients, nonlinearities and sampled checks of their
//! structural hypotheses.

mod coefficient;
mod hypotheses;
mod nonlinearity;

pub use coefficient::{CoefficientKind, GrowthBound, KirchhoffCoefficient, ScalarFn};
pub use hypotheses::{validate_hypotheses, Hypothesis, HypothesisEntry, HypothesisReport, SamplingSpec, Status};
pub use nonlinearity::{GrowthParams, Nonlinearity, NonlinearityKind, Point, PointwiseFn};
