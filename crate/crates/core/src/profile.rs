//! Sampled profiles with derivative columns.

use crate::error::{invalid, Error, Result};
use crate::numerics::Grid;
use crate::odeshoot::chain::{chain_to_derivatives, RadialChain};
use crate::odeshoot::integrator::{IvpResult, OdeSystem};
use crate::spectral::kernel::{fmt17, sphere_area, Kernel};

/// Whether the abscissa is a radius (y ≥ 0, radially or evenly extended) or the
/// whole real line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Radial,
    Line,
}

/// f(y) and its derivatives on a grid, plus the interface when the support is finite.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    pub dim: usize,
    pub domain: Domain,
    pub grid: Grid,
    /// `columns[j][i]` = f⁽ʲ⁾ at grid point i; column 0 is f itself.
    pub columns: Vec<Vec<f64>>,
    pub interface: Option<f64>,
}

impl RadialProfile {
    pub fn new(dim: usize, domain: Domain, grid: Grid, columns: Vec<Vec<f64>>) -> Result<Self> {
        if columns.is_empty() || columns.iter().any(|c| c.len() != grid.len()) {
            return invalid("profile columns must match the grid");
        }
        if domain == Domain::Radial && grid.first() < 0.0 {
            return invalid("radial profiles live on y >= 0");
        }
        if domain == Domain::Line && dim != 1 {
            return invalid("line profiles are one-dimensional");
        }
        Ok(Self { dim, domain, grid, columns, interface: None })
    }

    /// Line functions from values alone.
    pub fn line(grid: Grid, values: Vec<f64>) -> Result<Self> {
        Self::new(1, Domain::Line, grid, vec![values])
    }

    pub fn from_kernel(kernel: &Kernel) -> Self {
        let domain = if kernel.dim == 1 && kernel.grid.first() < 0.0 { Domain::Line } else { Domain::Radial };
        Self {
            dim: kernel.dim,
            domain,
            grid: kernel.grid.clone(),
            columns: kernel.derivatives.clone(),
            interface: None,
        }
    }

    /// Samples a chain trajectory at its marked points and expands the state into
    /// f, f′, …, f⁽⁹⁾.
    pub fn from_chain(chain: &RadialChain, traj: &IvpResult) -> Result<Self> {
        let mut ys = Vec::with_capacity(traj.marks.len());
        let mut columns = vec![Vec::with_capacity(traj.marks.len()); 10];
        let mut dz = vec![0.0; chain.dim()];
        for (y, z) in traj.marked() {
            chain.rhs(y, z, &mut dz);
            let d = if y == 0.0 { origin_derivatives(z, chain.dim) } else { chain_to_derivatives(z, dz[8], y, chain.dim) };
            ys.push(y);
            for (c, v) in columns.iter_mut().zip(d) {
                c.push(v);
            }
        }
        let uniform = ys.len() >= 2 && {
            let h = ys[1] - ys[0];
            ys.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
        };
        let grid = if uniform {
            Grid::uniform(ys[0], *ys.last().unwrap(), ys.len())?
        } else {
            Grid::from_points(ys)?
        };
        let mut p = Self::new(chain.dim, Domain::Radial, grid, columns)?;
        p.interface = Some(traj.end());
        Ok(p)
    }

    pub fn values(&self) -> &[f64] {
        &self.columns[0]
    }

    pub fn column(&self, j: usize) -> Result<&[f64]> {
        self.columns
            .get(j)
            .map(|c| c.as_slice())
            .ok_or_else(|| Error::Unsupported(format!("derivative order {j} not tabulated")))
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        for c in self.columns.iter_mut() {
            for v in c.iter_mut() {
                *v *= factor;
            }
        }
        self
    }

    /// ∫ f over ℝᴺ (radial) or ℝ (line). One-dimensional radial profiles are
    /// extended evenly.
    pub fn mass(&self) -> f64 {
        match self.domain {
            Domain::Line => self.grid.integrate(self.values()),
            Domain::Radial => {
                let w: Vec<f64> = self
                    .grid
                    .points()
                    .iter()
                    .zip(self.values())
                    .map(|(r, f)| r.powi(self.dim as i32 - 1) * f)
                    .collect();
                sphere_area(self.dim) * self.grid.integrate(&w)
            }
        }
    }

    /// Positions of strict sign alternations of f within `[a, b]`, ignoring samples
    /// with |f| ≤ `dead_band`; each is placed midway between the bracketing samples.
    pub fn sign_changes(&self, dead_band: f64, a: f64, b: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut last: Option<(f64, f64)> = None;
        for (y, f) in self.grid.points().iter().zip(self.values()) {
            if *y < a || *y > b || f.abs() <= dead_band {
                continue;
            }
            if let Some((yl, fl)) = last {
                if fl.signum() != f.signum() {
                    out.push(0.5 * (yl + y));
                }
            }
            last = Some((*y, *f));
        }
        out
    }

    /// Linear interpolation of column `j`; zero outside the grid.
    pub fn interpolate(&self, j: usize, y: f64) -> f64 {
        let p = self.grid.points();
        let c = &self.columns[j];
        if y < p[0] || y > *p.last().unwrap() {
            return 0.0;
        }
        let i = p.partition_point(|v| *v <= y).clamp(1, p.len() - 1);
        let t = (y - p[i - 1]) / (p[i] - p[i - 1]);
        c[i - 1] + t * (c[i] - c[i - 1])
    }

    /// CSV with header `y,f,f1,...`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("y,f");
        for j in 1..self.columns.len() {
            out.push_str(&format!(",f{j}"));
        }
        out.push('\n');
        for (i, y) in self.grid.points().iter().enumerate() {
            out.push_str(&fmt17(*y));
            for c in &self.columns {
                out.push(',');
                out.push_str(&fmt17(c[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// Derivatives at r = 0 from the chain state: odd ones vanish, even ones follow
/// from the Laplacians; f⁽⁹⁾(0) = 0 as well.
fn origin_derivatives(z: &[f64], dim: usize) -> [f64; 10] {
    use crate::odeshoot::chain::even_derivative_at_origin;
    let mut out = [0.0; 10];
    for k in 0..=4 {
        out[2 * k] = even_derivative_at_origin(k, dim, z[2 * k]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_changes_respect_dead_band() {
        let grid = Grid::uniform(0.0, 10.0, 1001).unwrap();
        let f: Vec<f64> = grid.points().iter().map(|y| y.cos() * (-0.5 * y).exp() + 1e-12).collect();
        let p = RadialProfile::new(1, Domain::Radial, grid, vec![f]).unwrap();
        assert_eq!(p.sign_changes(0.0, 0.0, 10.0).len(), 3);
        assert_eq!(p.sign_changes(0.05, 0.0, 10.0).len(), 1);
    }

    #[test]
    fn even_extension_doubles_half_line_mass() {
        let grid = Grid::uniform(0.0, 40.0, 4001).unwrap();
        let f: Vec<f64> = grid.points().iter().map(|y| (-y * y).exp()).collect();
        let p = RadialProfile::new(1, Domain::Radial, grid, vec![f]).unwrap();
        assert!((p.mass() - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }
}
