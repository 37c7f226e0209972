//! Masked uniform finite-difference grids with homogeneous Dirichlet data.
//!
//! Nodes sit at `origin + (i·h, j·h)` where `origin` is the lower-left
//! corner of the domain's bounding box. A node is interior when it lies
//! strictly inside the domain; every other node carries the value zero.

mod field;
mod io;
mod poisson;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use field::Field;
pub use poisson::{CgStats, PoissonSolution};

use crate::error::{Error, Result};
use crate::model::Point;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec<T> {
    Disk {
        center: [T; 2],
        radius: T,
    },
    /// The rectangle `[0, width] × [0, height]`.
    Rectangle {
        width: T,
        height: T,
    },
}

impl<T: Real> DomainSpec<T> {
    pub fn unit_disk() -> Self {
        DomainSpec::Disk {
            center: [T::zero(), T::zero()],
            radius: T::one(),
        }
    }

    pub fn unit_square() -> Self {
        DomainSpec::Rectangle {
            width: T::one(),
            height: T::one(),
        }
    }

    fn check(&self) -> Result<()> {
        let ok = match *self {
            DomainSpec::Disk { center, radius } => {
                radius > T::zero() && radius.is_finite() && center.iter().all(|c| c.is_finite())
            }
            DomainSpec::Rectangle { width, height } => {
                width > T::zero() && height > T::zero() && width.is_finite() && height.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid domain {self:?}")))
        }
    }

    /// Radius of the largest inscribed ball and its center.
    pub fn inscribed_ball(&self) -> (T, Point<T>) {
        let half = T::lit(0.5);
        match *self {
            DomainSpec::Disk { center, radius } => (radius, center),
            DomainSpec::Rectangle { width, height } => (width.min(height) * half, [width * half, height * half]),
        }
    }

    fn bounding_box(&self) -> (Point<T>, Point<T>) {
        match *self {
            DomainSpec::Disk { center, radius } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            DomainSpec::Rectangle { width, height } => ([T::zero(), T::zero()], [width, height]),
        }
    }

    fn strictly_inside(&self, p: Point<T>, slack: T) -> bool {
        match *self {
            DomainSpec::Disk { center, radius } => {
                let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
                (dx * dx + dy * dy).sqrt() < radius - slack
            }
            DomainSpec::Rectangle { width, height } => {
                p[0] > slack && p[0] < width - slack && p[1] > slack && p[1] < height - slack
            }
        }
    }
}

pub(crate) const NONE: usize = usize::MAX;

/// Discretization of a domain: interior nodes, their coordinates and the
/// 5-point neighbour table.
#[derive(Debug, Clone)]
pub struct Grid<T> {
    spec: DomainSpec<T>,
    h: T,
    origin: Point<T>,
    nx: usize,
    ny: usize,
    /// Box node `(i, j)` ↦ interior index, or `NONE`.
    index: Vec<usize>,
    nodes: Vec<(usize, usize)>,
    coords: Vec<Point<T>>,
    /// Interior neighbours in the order east, west, north, south.
    neighbors: Vec<[usize; 4]>,
    inradius: T,
    center: Point<T>,
}

/// Serializable summary of a grid for reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridMetadata {
    pub domain: DomainSpec<f64>,
    pub h: f64,
    pub inradius: f64,
    pub center: [f64; 2],
    pub interior_nodes: usize,
}

impl<T: Real> Grid<T> {
    pub fn new(spec: DomainSpec<T>, h: T) -> Result<Arc<Self>> {
        spec.check()?;
        if !(h > T::zero()) || !h.is_finite() {
            return Err(Error::Domain(format!("spacing must be positive, got {h}")));
        }
        let (lo, hi) = spec.bounding_box();
        let count = |len: T| -> Result<usize> {
            let k = (len / h + T::lit(1e-9)).floor();
            k.to_usize()
                .filter(|&k| k < 1 << 15)
                .map(|k| k + 1)
                .ok_or_else(|| Error::Resolution(format!("spacing {h} too fine for the domain")))
        };
        let nx = count(hi[0] - lo[0])?;
        let ny = count(hi[1] - lo[1])?;
        let slack = h * T::lit(1e-9);
        let mut index = vec![NONE; nx * ny];
        let mut nodes = Vec::new();
        let mut coords = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let p = [lo[0] + h * T::from_usize_lossy(i), lo[1] + h * T::from_usize_lossy(j)];
                if spec.strictly_inside(p, slack) {
                    index[j * nx + i] = nodes.len();
                    nodes.push((i, j));
                    coords.push(p);
                }
            }
        }
        if nodes.is_empty() {
            return Err(Error::Resolution(format!(
                "no interior nodes for {spec:?} at spacing {h}"
            )));
        }
        let at = |i: isize, j: isize| -> usize {
            if i < 0 || j < 0 || i as usize >= nx || j as usize >= ny {
                NONE
            } else {
                index[j as usize * nx + i as usize]
            }
        };
        let neighbors = nodes
            .iter()
            .map(|&(i, j)| {
                let (i, j) = (i as isize, j as isize);
                [at(i + 1, j), at(i - 1, j), at(i, j + 1), at(i, j - 1)]
            })
            .collect();
        let (inradius, center) = spec.inscribed_ball();
        Ok(Arc::new(Self {
            spec,
            h,
            origin: lo,
            nx,
            ny,
            index,
            nodes,
            coords,
            neighbors,
            inradius,
            center,
        }))
    }

    pub fn spec(&self) -> &DomainSpec<T> {
        &self.spec
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn cell_area(&self) -> T {
        self.h * self.h
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn inradius(&self) -> T {
        self.inradius
    }

    /// Center of the largest inscribed ball.
    pub fn center(&self) -> Point<T> {
        self.center
    }

    pub fn coords(&self) -> &[Point<T>] {
        &self.coords
    }

    pub fn origin(&self) -> Point<T> {
        self.origin
    }

    /// Bounding-box node counts along x and y.
    pub fn box_dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Bounding-box indices `(i, j)` of interior node `k`.
    pub fn node(&self, k: usize) -> (usize, usize) {
        self.nodes[k]
    }

    /// Interior index of box node `(i, j)`, if it is interior.
    pub fn interior_index(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.nx || j >= self.ny {
            return None;
        }
        match self.index[j * self.nx + i] {
            NONE => None,
            k => Some(k),
        }
    }

    /// Apply the 5-point operator `−Δ_h` to interior values.
    pub fn neg_laplacian(&self, u: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); u.len()];
        self.neg_laplacian_into(u, &mut out);
        out
    }

    pub(crate) fn neg_laplacian_into(&self, u: &[T], out: &mut [T]) {
        debug_assert_eq!(u.len(), self.len());
        let inv_h2 = (self.h * self.h).recip();
        let four = T::lit(4.0);
        for (k, nb) in self.neighbors.iter().enumerate() {
            let mut acc = four * u[k];
            for &n in nb {
                if n != NONE {
                    acc -= u[n];
                }
            }
            out[k] = acc * inv_h2;
        }
    }

    /// Discrete Dirichlet inner product `Σ_edges (u_a − u_b)(v_a − v_b)`,
    /// equal to `h² u·(−Δ_h v)`; edges to boundary nodes use zero there.
    pub fn dirichlet_form(&self, u: &[T], v: &[T]) -> T {
        debug_assert_eq!(u.len(), self.len());
        debug_assert_eq!(v.len(), self.len());
        let mut acc = T::zero();
        for (k, nb) in self.neighbors.iter().enumerate() {
            for &n in nb {
                if n == NONE {
                    acc += u[k] * v[k];
                } else if n > k {
                    acc += (u[k] - u[n]) * (v[k] - v[n]);
                }
            }
        }
        acc
    }

    pub fn metadata(&self) -> GridMetadata {
        let spec = match self.spec {
            DomainSpec::Disk { center, radius } => DomainSpec::Disk {
                center: [center[0].as_f64(), center[1].as_f64()],
                radius: radius.as_f64(),
            },
            DomainSpec::Rectangle { width, height } => DomainSpec::Rectangle {
                width: width.as_f64(),
                height: height.as_f64(),
            },
        };
        GridMetadata {
            domain: spec,
            h: self.h.as_f64(),
            inradius: self.inradius.as_f64(),
            center: [self.center[0].as_f64(), self.center[1].as_f64()],
            interior_nodes: self.len(),
        }
    }
}
