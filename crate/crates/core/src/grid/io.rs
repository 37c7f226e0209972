//! CSV export and import of nodal fields (`x,y,u`, interior-node order).

use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use super::{Field, Grid};
use crate::error::{Error, Result};
use crate::scalar::Real;

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let kind = std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string());
    io_err(path, kind)
}

impl<T: Real> Field<T> {
    /// Write `x,y,u` rows with full round-trip precision.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "u"])?;
        for (p, v) in self.grid().coords().iter().zip(self.values()) {
            w.write_record([
                format!("{:e}", p[0].as_f64()),
                format!("{:e}", p[1].as_f64()),
                format!("{:e}", v.as_f64()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| io_err(path, e))?;
        self.write_csv(file).map_err(|e| csv_err(path, e))
    }

    /// Read a field written by [`Field::save_csv`] on the same grid.
    /// Coordinates must match the interior nodes to within `h/1000`.
    pub fn read_csv(grid: &Arc<Grid<T>>, path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
        let tol = grid.h().as_f64() * 1e-3;
        let mut values = Vec::with_capacity(grid.len());
        for (k, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| csv_err(path, e))?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::Domain(format!("{}: bad value in row {}", path.display(), k + 1)))
            };
            let (x, y, u) = (parse(0)?, parse(1)?, parse(2)?);
            let p = grid.coords().get(k).ok_or_else(|| {
                Error::Domain(format!(
                    "{}: more rows than interior nodes ({})",
                    path.display(),
                    grid.len()
                ))
            })?;
            if (p[0].as_f64() - x).abs() > tol || (p[1].as_f64() - y).abs() > tol {
                return Err(Error::Domain(format!(
                    "{}: row {} at ({x}, {y}) does not match node ({}, {})",
                    path.display(),
                    k + 1,
                    p[0],
                    p[1]
                )));
            }
            values.push(T::lit(u));
        }
        Field::from_values(grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::super::DomainSpec;
    use super::*;

    #[test]
    fn round_trip() {
        let g = Grid::new(DomainSpec::<f64>::unit_disk(), 0.2).unwrap();
        let u = Field::from_fn(&g, |p| (p[0] * 3.0).sin() + 1e-17 * p[1]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.csv");
        u.save_csv(&path).unwrap();
        let v = Field::read_csv(&g, &path).unwrap();
        assert_eq!(u.values(), v.values());
    }

    #[test]
    fn wrong_grid_is_rejected() {
        let g = Grid::new(DomainSpec::<f64>::unit_disk(), 0.2).unwrap();
        let g2 = Grid::new(DomainSpec::<f64>::unit_square(), 0.2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.csv");
        Field::zeros(&g).save_csv(&path).unwrap();
        assert!(Field::read_csv(&g2, &path).is_err());
    }
}
