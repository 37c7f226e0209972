//! Jacobi-preconditioned conjugate gradients for `−Δ_h v = rhs`.

use super::{Field, Grid};
use crate::error::{Error, Result};
use crate::scalar::{dot, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgStats {
    pub iterations: usize,
    /// Final `‖−Δ_h v − rhs‖₂ / ‖rhs‖₂`.
    pub relative_residual: f64,
}

#[derive(Debug, Clone)]
pub struct PoissonSolution<T: Real> {
    pub field: Field<T>,
    pub stats: CgStats,
}

/// Iteration cap `50·√N + 1000`.
pub fn iteration_cap(n: usize) -> usize {
    50 * (n as f64).sqrt().ceil() as usize + 1000
}

impl<T: Real> Field<T> {
    /// Solve `−Δ_h v = self` to relative residual `tol`.
    pub fn poisson_solve(&self, tol: T) -> Result<Field<T>> {
        Ok(self.poisson_solve_from(None, tol)?.field)
    }

    /// As [`Field::poisson_solve`], starting CG from `guess`.
    pub fn poisson_solve_from(&self, guess: Option<&Field<T>>, tol: T) -> Result<PoissonSolution<T>> {
        if !(tol > T::zero()) {
            return Err(Error::Domain(format!("solver tolerance must be positive, got {tol}")));
        }
        let grid = self.grid();
        let mut x = match guess {
            Some(g) => {
                self.assert_same_grid(g);
                g.values().to_vec()
            }
            None => vec![T::zero(); self.len()],
        };
        let stats = pcg(grid, self.values(), &mut x, tol)?;
        Ok(PoissonSolution {
            field: Field::from_raw(grid, x),
            stats,
        })
    }
}

fn pcg<T: Real>(grid: &Grid<T>, b: &[T], x: &mut [T], tol: T) -> Result<CgStats> {
    let n = b.len();
    let b_norm = dot(b, b).sqrt();
    if b_norm == T::zero() {
        x.iter_mut().for_each(|v| *v = T::zero());
        return Ok(CgStats {
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let target = tol * b_norm;
    // Inverse diagonal of −Δ_h; constant on a uniform grid.
    let inv_diag = vec![grid.cell_area() / T::lit(4.0); n];

    let mut ax = vec![T::zero(); n];
    grid.neg_laplacian_into(x, &mut ax);
    let mut r: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
    let mut r_norm = dot(&r, &r).sqrt();
    if r_norm <= target {
        return Ok(CgStats {
            iterations: 0,
            relative_residual: (r_norm / b_norm).as_f64(),
        });
    }
    let mut z: Vec<T> = r.iter().zip(&inv_diag).map(|(&ri, &di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![T::zero(); n];
    let cap = iteration_cap(n);
    for it in 1..=cap {
        grid.neg_laplacian_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > T::zero()) {
            return Err(Error::Solver {
                iterations: it,
                residual: (r_norm / b_norm).as_f64(),
                target: tol.as_f64(),
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        r_norm = dot(&r, &r).sqrt();
        let mut restart = false;
        if r_norm <= target {
            // The recursive residual drifts; confirm against b − A x.
            grid.neg_laplacian_into(x, &mut ax);
            for i in 0..n {
                r[i] = b[i] - ax[i];
            }
            r_norm = dot(&r, &r).sqrt();
            if r_norm <= target {
                return Ok(CgStats {
                    iterations: it,
                    relative_residual: (r_norm / b_norm).as_f64(),
                });
            }
            restart = true;
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = if restart { T::zero() } else { rz_new / rz };
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Solver {
        iterations: cap,
        residual: (r_norm / b_norm).as_f64(),
        target: tol.as_f64(),
    })
}
