use std::sync::Arc;

use super::Grid;
use crate::error::{Error, Result};
use crate::model::Point;
use crate::scalar::{self, Real};

/// One real value per interior node of a grid.
#[derive(Debug, Clone)]
pub struct Field<T: Real> {
    grid: Arc<Grid<T>>,
    values: Vec<T>,
}

impl<T: Real> PartialEq for Field<T> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) && self.values == other.values
    }
}

impl<T: Real> Field<T> {
    pub fn zeros(grid: &Arc<Grid<T>>) -> Self {
        Self {
            grid: Arc::clone(grid),
            values: vec![T::zero(); grid.len()],
        }
    }

    pub fn from_values(grid: &Arc<Grid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!(
                "field has {} values but the grid has {} interior nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite field value at node {k}")));
        }
        Ok(Self {
            grid: Arc::clone(grid),
            values,
        })
    }

    /// Interpolate a pointwise function at the interior nodes.
    pub fn from_fn(grid: &Arc<Grid<T>>, f: impl Fn(Point<T>) -> T) -> Self {
        let values = grid.coords().iter().map(|&p| f(p)).collect();
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub(crate) fn from_raw(grid: &Arc<Grid<T>>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
    }

    pub(crate) fn assert_same_grid(&self, other: &Self) {
        assert!(
            self.same_grid(other) || self.len() == other.len(),
            "fields live on different grids"
        );
    }

    /// `‖u‖² = Σ_edges (difference quotient)²·h²`.
    pub fn dirichlet_energy(&self) -> T {
        self.grid.dirichlet_form(&self.values, &self.values)
    }

    /// Dirichlet inner product with another field on the same grid.
    pub fn dirichlet_dot(&self, other: &Self) -> T {
        self.assert_same_grid(other);
        self.grid.dirichlet_form(&self.values, &other.values)
    }

    /// Discrete `L²` inner product `h² Σ u v`.
    pub fn l2_dot(&self, other: &Self) -> T {
        self.assert_same_grid(other);
        scalar::dot(&self.values, &other.values) * self.grid.cell_area()
    }

    /// Euclidean norm of the value vector (no `h` weighting).
    pub fn vec_norm(&self) -> T {
        scalar::norm2(&self.values)
    }

    /// Composite midpoint quadrature `h² Σ g(x_k, u_k)`.
    pub fn integrate<G>(&self, mut g: G) -> Result<T>
    where
        G: FnMut(Point<T>, T) -> Result<T>,
    {
        let mut acc = T::zero();
        for (&x, &u) in self.grid.coords().iter().zip(&self.values) {
            acc += g(x, u)?;
        }
        Ok(acc * self.grid.cell_area())
    }

    /// Apply `−Δ_h` (zero Dirichlet data).
    pub fn neg_laplacian(&self) -> Self {
        Self::from_raw(&self.grid, self.grid.neg_laplacian(&self.values))
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_raw(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: T, other: &Self) -> Self {
        self.assert_same_grid(other);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a + c * b)
            .collect();
        Self::from_raw(&self.grid, values)
    }

    pub fn positive_part(&self) -> Self {
        self.map(|v| v.max(T::zero()))
    }

    pub fn max_value(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::super::DomainSpec;
    use super::*;

    #[test]
    fn zero_field_has_zero_energy() {
        let g = Grid::new(DomainSpec::<f64>::unit_square(), 0.1).unwrap();
        assert_eq!(Field::zeros(&g).dirichlet_energy(), 0.0);
    }

    #[test]
    fn energy_equals_quadratic_form() {
        let g = Grid::new(DomainSpec::<f64>::unit_disk(), 0.1).unwrap();
        let u = Field::from_fn(&g, |p| (3.0 * p[0]).sin() + p[1] * p[1]);
        let form = u.l2_dot(&u.neg_laplacian());
        let e = u.dirichlet_energy();
        assert!((e - form).abs() < 1e-12 * e);
    }

    #[test]
    fn integrate_constant_gives_area() {
        let g = Grid::new(DomainSpec::<f64>::unit_square(), 1.0 / 200.0).unwrap();
        let u = Field::zeros(&g);
        let area = u.integrate(|_, _| Ok(1.0)).unwrap();
        // Interior cells only: (1 − h)².
        assert!((area - 1.0).abs() < 2.0 / 200.0);
    }

    #[test]
    fn integrate_square_of_one() {
        let g = Grid::new(
            DomainSpec::Rectangle {
                width: 2.0,
                height: 1.0,
            },
            1.0 / 100.0,
        )
        .unwrap();
        let u = Field::from_fn(&g, |_| 1.0);
        let v: f64 = u.integrate(|_, s| Ok(s * s)).unwrap();
        assert!((v - 2.0).abs() < 3.0 * 3.0 / 100.0);
    }

    #[test]
    fn from_values_validates() {
        let g = Grid::new(DomainSpec::<f64>::unit_square(), 0.25).unwrap();
        assert!(Field::from_values(&g, vec![0.0; 3]).is_err());
        let mut v = vec![0.0; g.len()];
        v[0] = f64::NAN;
        assert!(Field::from_values(&g, v).is_err());
    }
}
