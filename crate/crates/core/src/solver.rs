//! Ground states by Nehari-constrained Sobolev-gradient descent, plus
//! numerical probes of the mountain-pass geometry and the level bound.
//!
//! Each descent step moves against the Riesz gradient of `I` in the
//! Dirichlet inner product, truncates to the positive part, and rescales
//! back onto the Nehari manifold along the ray. Trial steps come from the
//! Barzilai–Borwein formula and are Armijo-backtracked.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::EnergyContext;
use crate::error::{Error, Result};
use crate::grid::{Field, Grid, GridMetadata};
use crate::model::{validate_hypotheses, SamplingSpec};
use crate::moser::{level_threshold, MoserFamily};
use crate::scalar::Real;

/// Barzilai–Borwein trial steps are clamped to `step·[1/R, R]`.
pub const STEP_RANGE: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialGuess {
    /// `max(0, 1 − |x − x0|²/d²)` on the inscribed ball, unit Dirichlet norm.
    Bump,
    Moser {
        n: u64,
    },
    /// CSV file with `x,y,u` rows in interior-node order.
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// Initial descent step, in units of `1/m(‖u‖²)`.
    pub step: f64,
    pub armijo_c: f64,
    pub backtrack: f64,
    /// Stop when the Dirichlet norm of the gradient drops below this.
    pub grad_tol: f64,
    /// Relative residual for the inner Poisson solves.
    pub linear_tol: f64,
    pub initial_guess: InitialGuess,
    pub seed: u64,
    /// Additional randomized starts; the lowest-energy result is kept.
    pub restarts: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            step: 0.5,
            armijo_c: 1e-4,
            backtrack: 0.5,
            grad_tol: 1e-7,
            linear_tol: 1e-12,
            initial_guess: InitialGuess::Bump,
            seed: 0,
            restarts: 0,
        }
    }
}

impl SolverOptions {
    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Configuration(format!("solver options: {m}")));
        if self.max_iters < 1 {
            return bad("max_iters must be at least 1");
        }
        for (name, v) in [
            ("step", self.step),
            ("armijo_c", self.armijo_c),
            ("grad_tol", self.grad_tol),
            ("linear_tol", self.linear_tol),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return bad(&format!("{name} must be positive"));
            }
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return bad("backtrack must lie in (0, 1)");
        }
        if !(self.armijo_c < 1.0) {
            return bad("armijo_c must be below 1");
        }
        if let InitialGuess::Moser { n } = self.initial_guess {
            if n < 2 {
                return bad("Moser initial guess needs n ≥ 2");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    /// Armijo backtracking could not decrease the energy any further.
    Stalled,
    /// A trial point ran into the exponential overflow cap.
    Overflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub energy: f64,
    pub gradient_residual: f64,
    pub step: f64,
    pub cg_iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport<T: Real> {
    pub status: SolveStatus,
    #[serde(skip)]
    pub field: Field<T>,
    pub grid: GridMetadata,
    pub energy: f64,
    pub dirichlet_energy: f64,
    pub potential: f64,
    /// `⟨I'(u), u⟩`.
    pub nehari_residual: f64,
    /// `⟨I'(u), u⟩ / (1 + m(‖u‖²)‖u‖²)`.
    pub nehari_relative: f64,
    /// Dirichlet norm of the gradient.
    pub gradient_residual: f64,
    /// `‖m(‖u‖²)(−Δ_h u) − f(u)‖₂ / ‖f(u)‖₂`.
    pub weak_residual: f64,
    pub iterations: usize,
    pub level_threshold: Option<f64>,
    pub margin: Option<f64>,
    pub positive: bool,
    pub min_value: f64,
    pub max_value: f64,
    pub seeds: Vec<u64>,
    pub trace: Vec<TraceEntry>,
    pub note: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Quadratic bump on the inscribed ball, scaled to unit Dirichlet norm.
pub fn bump_field<T: Real>(grid: &Arc<Grid<T>>) -> Result<Field<T>> {
    let (d, c) = (grid.inradius(), grid.center());
    let u = Field::from_fn(grid, |p| {
        let r2 = ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)) / (d * d);
        (T::one() - r2).max(T::zero())
    });
    normalize(u)
}

fn normalize<T: Real>(u: Field<T>) -> Result<Field<T>> {
    let e = u.dirichlet_energy();
    if !(e > T::zero()) {
        return Err(Error::Resolution("initial guess vanishes on the grid".into()));
    }
    Ok(u.scaled(e.sqrt().recip()))
}

pub fn initial_field<T: Real>(grid: &Arc<Grid<T>>, guess: &InitialGuess) -> Result<Field<T>> {
    match guess {
        InitialGuess::Bump => bump_field(grid),
        InitialGuess::Moser { n } => normalize(MoserFamily::inscribed(*n, grid)?.field(grid)),
        InitialGuess::File { path } => {
            let u = Field::read_csv(grid, path)?;
            if u.min_value() < T::zero() || u.is_zero() {
                return Err(Error::Precondition(
                    "initial guess must be nonnegative and nonzero".into(),
                ));
            }
            Ok(u)
        }
    }
}

fn perturbed<T: Real>(base: &Field<T>, seed: u64) -> Result<Field<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let peak = base.max_value();
    let values = base
        .values()
        .iter()
        .map(|&v| v * (T::one() + T::lit(rng.gen_range(-0.3..0.3))) + peak * T::lit(rng.gen_range(0.0..0.05)))
        .collect();
    normalize(Field::from_values(base.grid(), values)?)
}

fn overflow_like(e: &Error) -> bool {
    match e {
        Error::Overflow { .. } => true,
        Error::Projection { t_max, .. } => t_max.is_finite() && *t_max > 0.0,
        _ => false,
    }
}

struct Run<T: Real> {
    status: SolveStatus,
    u: Field<T>,
    energy: T,
    gradient_residual: T,
    iterations: usize,
    trace: Vec<TraceEntry>,
    note: Option<String>,
}

fn descend<T: Real>(ctx: &EnergyContext<T>, start: &Field<T>, opts: &SolverOptions) -> Result<Run<T>> {
    let lin_tol = T::lit(opts.linear_tol);
    let grad_tol = T::lit(opts.grad_tol);
    let c = T::lit(opts.armijo_c);
    let shrink = T::lit(opts.backtrack);
    let base_step = T::lit(opts.step);
    let (lo_step, hi_step) = (base_step / T::lit(STEP_RANGE), base_step * T::lit(STEP_RANGE));
    let min_step = base_step * T::lit(1e-14);
    let noise = |k: T, p: T| T::epsilon() * T::lit(16.0) * (k.abs() + p.abs());

    let mut u = match ctx.nehari_project(start) {
        Ok(p) => p.field,
        Err(e) if overflow_like(&e) => {
            let energy = ctx.energy(start).unwrap_or(T::nan());
            return Ok(Run {
                status: SolveStatus::Overflow,
                u: start.clone(),
                energy,
                gradient_residual: T::nan(),
                iterations: 0,
                trace: Vec::new(),
                note: Some(format!("initial projection: {e}")),
            });
        }
        Err(e) => return Err(e),
    };
    let mut parts = ctx.energy_parts(&u)?;
    let mut step = base_step;
    let mut previous: Option<(Field<T>, Field<T>)> = None;
    let mut warm: Option<Field<T>> = None;
    let mut trace = Vec::new();
    let mut status = SolveStatus::MaxIterations;
    let mut residual = T::nan();
    let mut note = None;
    let mut iterations = 0;

    for k in 0..opts.max_iters {
        let ge = ctx.gradient_eval(&u, warm.as_ref(), lin_tol)?;
        residual = ge.gradient.dirichlet_energy().max(T::zero()).sqrt();
        // Descend along d = g/m(‖u‖²), so that `step` is dimensionless.
        let inv_m = ge.m_value.recip();
        let direction = ge.gradient.scaled(inv_m);
        // Barzilai–Borwein trial step from the last accepted move.
        if let Some((pu, pd)) = &previous {
            let du = u.add_scaled(-T::one(), pu);
            let dd = direction.add_scaled(-T::one(), pd);
            let sy = du.dirichlet_dot(&dd);
            step = if sy > T::zero() {
                (du.dirichlet_energy() / sy).max(lo_step).min(hi_step)
            } else {
                base_step
            };
        }
        trace.push(TraceEntry {
            iteration: k,
            energy: parts.total.as_f64(),
            gradient_residual: residual.as_f64(),
            step: step.as_f64(),
            cg_iterations: ge.cg.iterations,
        });
        iterations = k;
        if residual <= grad_tol {
            status = SolveStatus::Converged;
            break;
        }
        let slope = residual * residual * inv_m;
        let mut s = step;
        let mut accepted = None;
        let mut overflowed = false;
        while s >= min_step {
            let trial = u.add_scaled(-s, &direction).positive_part();
            if trial.max_value() > T::zero() {
                let outcome = ctx
                    .nehari_project(&trial)
                    .and_then(|p| ctx.energy_parts(&p.field).map(|e| (p.field, e)));
                match outcome {
                    Ok((v, e)) => {
                        if e.total <= parts.total - c * s * slope + noise(parts.kirchhoff, parts.potential) {
                            accepted = Some((v, e));
                            break;
                        }
                    }
                    Err(e) if overflow_like(&e) => overflowed = true,
                    Err(e) => return Err(e),
                }
            }
            s *= shrink;
        }
        match accepted {
            Some((v, e)) => {
                previous = Some((std::mem::replace(&mut u, v), direction));
                parts = e;
                warm = Some(ge.riesz_source);
                iterations = k + 1;
            }
            None => {
                status = if overflowed {
                    SolveStatus::Overflow
                } else {
                    SolveStatus::Stalled
                };
                note = Some(format!(
                    "no admissible step down to {:.3e} at iteration {k}",
                    min_step.as_f64()
                ));
                break;
            }
        }
    }
    Ok(Run {
        status,
        u,
        energy: parts.total,
        gradient_residual: residual,
        iterations,
        trace,
        note,
    })
}

/// Compute a positive ground state of the discrete problem.
pub fn solve_ground_state<T: Real>(ctx: &EnergyContext<T>, opts: &SolverOptions) -> Result<SolveReport<T>> {
    opts.check()?;
    let hyp = validate_hypotheses(&ctx.coef, &ctx.nl, ctx.grid.inradius(), &SamplingSpec::default())?;
    if let Some(e) = hyp.hard_failure() {
        return Err(Error::Hypothesis {
            name: e.hypothesis.name().to_string(),
            witness: e.witness.as_ref().and_then(|w| w.first().copied()),
        });
    }
    let clock = Instant::now();
    let start = initial_field(&ctx.grid, &opts.initial_guess)?;
    if start.min_value() < T::zero() || start.is_zero() {
        return Err(Error::Precondition(
            "initial guess must be nonnegative and nonzero".into(),
        ));
    }

    let mut seeds = Vec::new();
    let mut best = descend(ctx, &start, opts)?;
    for r in 0..opts.restarts {
        let seed = opts.seed.wrapping_add(r as u64);
        seeds.push(seed);
        let run = descend(ctx, &perturbed(&start, seed)?, opts)?;
        let better = match (run.status, best.status) {
            (SolveStatus::Converged, SolveStatus::Converged) => run.energy < best.energy,
            (SolveStatus::Converged, _) => true,
            (_, SolveStatus::Converged) => false,
            _ => run.energy < best.energy,
        };
        if better {
            best = run;
        }
    }
    finish_report(ctx, best, seeds, clock.elapsed())
}

fn finish_report<T: Real>(
    ctx: &EnergyContext<T>,
    run: Run<T>,
    seeds: Vec<u64>,
    elapsed: Duration,
) -> Result<SolveReport<T>> {
    let u = run.u;
    let threshold = match ctx.nl.alpha0() {
        Some(a) => Some(level_threshold(&ctx.coef, a)?.as_f64()),
        None => None,
    };
    let stats = (|| -> Result<(f64, f64, f64, f64, f64)> {
        let parts = ctx.energy_parts(&u)?;
        let e = parts.dirichlet;
        let m_value = ctx.coef.eval_m(e)?;
        let nehari = ctx.fibering_derivative_with_energy(&u, e)?;
        let f = ctx.source(&u)?;
        let weak = u.neg_laplacian().scaled(m_value).add_scaled(-T::one(), &f).vec_norm();
        let f_norm = f.vec_norm();
        let weak_rel = if f_norm > T::zero() { weak / f_norm } else { weak };
        Ok((
            e.as_f64(),
            parts.potential.as_f64(),
            nehari.as_f64(),
            (nehari.abs() / (T::one() + m_value * e)).as_f64(),
            weak_rel.as_f64(),
        ))
    })();
    let (dirichlet, potential, nehari, nehari_rel, weak) =
        stats.unwrap_or((f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN));
    let energy = run.energy.as_f64();
    Ok(SolveReport {
        status: run.status,
        grid: ctx.grid.metadata(),
        energy,
        dirichlet_energy: dirichlet,
        potential,
        nehari_residual: nehari,
        nehari_relative: nehari_rel,
        gradient_residual: run.gradient_residual.as_f64(),
        weak_residual: weak,
        iterations: run.iterations,
        level_threshold: threshold,
        margin: threshold.map(|t| t - energy),
        positive: u.min_value() > T::zero(),
        min_value: u.min_value().as_f64(),
        max_value: u.max_value().as_f64(),
        seeds,
        trace: run.trace,
        note: run.note,
        elapsed,
        field: u,
    })
}

impl<T: Real> EnergyContext<T> {
    /// `⟨I'(u), u⟩` given `E = ‖u‖²`.
    pub(crate) fn fibering_derivative_with_energy(&self, u: &Field<T>, e: T) -> Result<T> {
        let m_value = self.coef.eval_m(e)?;
        let pairing = u.integrate(|x, s| Ok(self.nl.eval_f(x, s)? * s))?;
        Ok(m_value * e - pairing)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeLevel {
    pub rho: f64,
    pub min_energy: f64,
    pub max_energy: f64,
    pub directions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub levels: Vec<ProbeLevel>,
    /// Largest probed radius with positive minimum energy, and that minimum.
    pub rho: Option<f64>,
    pub tau: Option<f64>,
    /// Multiple of `u0/‖u0‖` with negative energy.
    pub e_norm: f64,
    pub e_energy: f64,
    pub e_beyond_rho: bool,
    pub seed: u64,
}

/// Random smooth nonnegative direction: `(−Δ_h)⁻¹` of i.i.d. uniform noise.
fn random_direction<T: Real>(grid: &Arc<Grid<T>>, rng: &mut ChaCha8Rng, tol: T) -> Result<Field<T>> {
    let noise = Field::from_values(grid, (0..grid.len()).map(|_| T::lit(rng.gen_range(0.0..1.0))).collect())?;
    normalize(noise.poisson_solve(tol)?)
}

/// Empirical mountain-pass geometry: a sphere `‖u‖ = ρ` on which the
/// energy stays positive, and a point `e` beyond it with `I(e) < 0`.
pub fn geometry_probe<T: Real>(
    ctx: &EnergyContext<T>,
    rho_grid: &[f64],
    u0: &Field<T>,
    directions: usize,
    seed: u64,
) -> Result<ProbeReport> {
    if u0.min_value() < T::zero() || u0.is_zero() {
        return Err(Error::Precondition("probe ray must be nonnegative and nonzero".into()));
    }
    if rho_grid.is_empty() || rho_grid.iter().any(|&r| !(r > 0.0)) || directions == 0 {
        return Err(Error::Configuration(
            "probe needs positive radii and at least one direction".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs = (0..directions)
        .map(|_| random_direction(&ctx.grid, &mut rng, T::lit(1e-10)))
        .collect::<Result<Vec<_>>>()?;
    let mut levels = Vec::with_capacity(rho_grid.len());
    for &rho in rho_grid {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for d in &dirs {
            let e = match ctx.energy(&d.scaled(T::lit(rho))) {
                Ok(e) => e.as_f64(),
                Err(e) if e.is_overflow() => f64::NEG_INFINITY,
                Err(e) => return Err(e),
            };
            lo = lo.min(e);
            hi = hi.max(e);
        }
        levels.push(ProbeLevel {
            rho,
            min_energy: lo,
            max_energy: hi,
            directions,
        });
    }
    let best = levels
        .iter()
        .filter(|l| l.min_energy > 0.0)
        .max_by(|a, b| a.rho.total_cmp(&b.rho));
    let (rho, tau) = match best {
        Some(l) => (Some(l.rho), Some(l.min_energy)),
        None => (None, None),
    };

    let unit = normalize(u0.clone())?;
    let cap = ctx.ray_cap(&unit);
    let mut t = T::one();
    let e_energy = loop {
        if t > cap {
            return Err(Error::Probe(format!(
                "no negative-energy point along the ray below the overflow cap t = {:.6e}",
                cap.as_f64()
            )));
        }
        let val = ctx.energy(&unit.scaled(t))?;
        if val < T::zero() {
            break val;
        }
        t = t + t;
    };
    let e_norm = t.as_f64();
    Ok(ProbeReport {
        levels,
        rho,
        tau,
        e_norm,
        e_energy: e_energy.as_f64(),
        e_beyond_rho: rho.is_some_and(|r| e_norm > r),
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RayMaximum<T> {
    pub t_max: T,
    pub value: T,
}

/// `max_{t>0} I(t u0)`, attained at the Nehari point of the ray.
pub fn minimax_along_ray<T: Real>(ctx: &EnergyContext<T>, u0: &Field<T>) -> Result<RayMaximum<T>> {
    if u0.min_value() < T::zero() || u0.is_zero() {
        return Err(Error::Precondition("ray must be nonnegative and nonzero".into()));
    }
    let p = ctx.nehari_project(u0)?;
    Ok(RayMaximum {
        t_max: p.t_star,
        value: ctx.energy(&p.field)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoserRay {
    pub n: u64,
    pub t_max: Option<f64>,
    pub value: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub pass: bool,
    pub threshold: f64,
    pub estimate: f64,
    pub margin: f64,
    pub alpha0: f64,
    pub solve_status: SolveStatus,
    pub solve_energy: f64,
    pub solve_gradient_residual: f64,
    pub moser_rays: Vec<MoserRay>,
    pub options: SolverOptions,
    pub grid: GridMetadata,
}

/// Default Moser indices probed by [`verify_level_bound`].
pub const DEFAULT_MOSER_NS: [u64; 4] = [2, 4, 8, 16];

/// Check `c* < ½M(4π/α₀)` with `c*` estimated from above by the computed
/// ground state and by the ray maxima along Moser functions.
pub fn verify_level_bound<T: Real>(
    ctx: &EnergyContext<T>,
    opts: &SolverOptions,
    moser_ns: &[u64],
) -> Result<(BoundReport, SolveReport<T>)> {
    let alpha0 = ctx.nl.alpha0().ok_or_else(|| {
        Error::Configuration("level bound needs a nonlinearity with finite critical exponent α0".into())
    })?;
    let threshold = level_threshold(&ctx.coef, alpha0)?.as_f64();
    let solve = solve_ground_state(ctx, opts)?;
    let mut estimate = if solve.energy.is_finite() && solve.status != SolveStatus::Overflow {
        solve.energy
    } else {
        f64::INFINITY
    };
    let mut rays = Vec::with_capacity(moser_ns.len());
    for &n in moser_ns {
        let ray = MoserFamily::inscribed(n, &ctx.grid)
            .map(|fam| fam.field(&ctx.grid))
            .and_then(|g| minimax_along_ray(ctx, &g));
        rays.push(match ray {
            Ok(r) => {
                estimate = estimate.min(r.value.as_f64());
                MoserRay {
                    n,
                    t_max: Some(r.t_max.as_f64()),
                    value: Some(r.value.as_f64()),
                    error: None,
                }
            }
            Err(e) => MoserRay {
                n,
                t_max: None,
                value: None,
                error: Some(e.to_string()),
            },
        });
    }
    let report = BoundReport {
        pass: estimate < threshold,
        threshold,
        estimate,
        margin: threshold - estimate,
        alpha0: alpha0.as_f64(),
        solve_status: solve.status,
        solve_energy: solve.energy,
        solve_gradient_residual: solve.gradient_residual,
        moser_rays: rays,
        options: opts.clone(),
        grid: ctx.grid.metadata(),
    };
    Ok((report, solve))
}
