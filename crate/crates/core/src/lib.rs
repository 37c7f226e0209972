//! Positive ground states of the nonlocal Kirchhoff problem
//!
//! ```text
//! −m(‖u‖²) Δu = f(x, u)  in Ω,    u = 0  on ∂Ω,
//! ```
//!
//! on planar disks and rectangles, with `f` of exponential critical growth.
//! The crate discretizes the problem with 5-point finite differences,
//! computes ground states by Nehari-constrained Sobolev-gradient descent,
//! and checks the quantitative estimates around the mountain-pass level:
//! the Moser-family integral bound, the level threshold `½M(4π/α₀)`, the
//! fibering structure of the energy, and the hypotheses on `m` and `f`.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`.

// `!(x > 0)` style guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod energy;
mod error;
pub mod grid;
pub mod model;
pub mod moser;
pub mod quadrature;
mod scalar;
pub mod solver;

pub use energy::{EnergyContext, FiberingSample, NehariProjection};
pub use error::{Error, Result};
pub use grid::{DomainSpec, Field, Grid};
pub use model::{
    validate_hypotheses, Hypothesis, HypothesisReport, KirchhoffCoefficient, Nonlinearity, SamplingSpec, Status,
};
pub use moser::{f3_threshold, level_threshold, MoserFamily};
pub use scalar::Real;
pub use solver::{SolveReport, SolverOptions};

pub type Grid64 = Grid<f64>;
pub type Field64 = Field<f64>;
pub type DomainSpec64 = DomainSpec<f64>;
pub type KirchhoffCoefficient64 = KirchhoffCoefficient<f64>;
pub type Nonlinearity64 = Nonlinearity<f64>;
pub type EnergyContext64 = EnergyContext<f64>;
pub type MoserFamily64 = MoserFamily<f64>;

pub type Grid32 = Grid<f32>;
pub type Field32 = Field<f32>;
pub type EnergyContext32 = EnergyContext<f32>;
