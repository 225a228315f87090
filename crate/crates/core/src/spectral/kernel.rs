//! The rescaled fundamental kernel F of u_t = Δ⁵u, i.e. the inverse Fourier
//! transform of e^{−|k|¹⁰}, in one dimension and radially in dimensions 1–3.
//!
//! The line kernel is evaluated on a contour shifted through the saddle point of
//! e^{iky − k¹⁰}, which keeps full relative accuracy far into the tail where F is
//! below 1e−30. The radial kernel is a Hankel transform on the real axis and is
//! accurate in absolute terms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::numerics::quadrature::pairwise_sum;
use crate::numerics::special::{bessel_j_scaled, gamma};
use crate::numerics::Grid;

/// Number of tabulated derivative columns F, F′, …, F⁽⁹⁾.
pub const DERIVATIVE_COLUMNS: usize = 10;

/// Laplacian powers carried by a radial jet: Δ^j F for j = 0..=6.
pub const LAPLACIAN_LEVELS: usize = 7;

/// Decay constant of the envelope e^{−d|y|^{10/9}} for the drift coefficient 1/10.
pub fn decay_constant() -> f64 {
    0.9 * 0.1f64.powf(1.0 / 9.0) * (4.0 * PI / 9.0).cos()
}

/// Evaluator for the line kernel of e^{−k^{2m}} and its derivatives.
#[derive(Clone, Debug)]
pub struct LineKernel {
    m: usize,
    gauss: crate::numerics::GaussLegendre,
}

impl Default for LineKernel {
    fn default() -> Self {
        Self::new(5)
    }
}

impl LineKernel {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "kernel order must be positive");
        Self { m, gauss: crate::numerics::GaussLegendre::new(16) }
    }

    pub fn order(&self) -> usize {
        self.m
    }

    /// F⁽ʲ⁾(y) for j = 0..=jmax.
    pub fn derivatives(&self, y: f64, jmax: usize) -> Vec<f64> {
        let ay = y.abs();
        let p = 2 * self.m;
        let tilt = PI / (2.0 * (p as f64 - 1.0));
        let saddle = (ay / p as f64).powf(1.0 / (p as f64 - 1.0));
        let shift = saddle * tilt.sin();
        let t_max = 1.2 * 745f64.powf(1.0 / p as f64) + 1.0;
        let panels = 50usize.max((0.5 * t_max * ay).ceil() as usize);
        let h = t_max / panels as f64;
        let mut acc = vec![Vec::with_capacity(panels * 16); jmax + 1];
        for panel in 0..panels {
            let mid = (panel as f64 + 0.5) * h;
            for (x, w) in self.gauss.nodes.iter().zip(&self.gauss.weights) {
                let k = Complex64::new(mid + 0.5 * h * x, shift);
                let phase = Complex64::i() * k * ay - k.powu(p as u32);
                let mut term = phase.exp() * (0.5 * h * w);
                let ik = Complex64::i() * k;
                for a in acc.iter_mut() {
                    a.push(term.re);
                    term *= ik;
                }
            }
        }
        acc.iter()
            .enumerate()
            .map(|(j, terms)| {
                let v = pairwise_sum(terms) / PI;
                if y < 0.0 && j % 2 == 1 {
                    -v
                } else {
                    v
                }
            })
            .collect()
    }

    pub fn value(&self, y: f64) -> f64 {
        self.derivatives(y, 0)[0]
    }
}

/// Δ^j F and (Δ^j F)′ at one radius, j = 0..=6.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RadialJet {
    pub lap: [f64; LAPLACIAN_LEVELS],
    pub dlap: [f64; LAPLACIAN_LEVELS],
}

impl RadialJet {
    /// Second radial derivative of Δ^j F: (Δ^j F)″ = Δ^{j+1}F − (N−1)/r·(Δ^j F)′.
    pub fn second(&self, j: usize, r: f64, dim: usize) -> f64 {
        if r == 0.0 {
            return self.lap[j + 1] / dim as f64;
        }
        self.lap[j + 1] - (dim as f64 - 1.0) / r * self.dlap[j]
    }

    /// Third radial derivative of Δ^j F for r > 0.
    pub fn third(&self, j: usize, r: f64, dim: usize) -> f64 {
        let nm1 = dim as f64 - 1.0;
        self.dlap[j + 1] - nm1 * (self.second(j, r, dim) / r - self.dlap[j] / (r * r))
    }
}

/// Radially symmetric kernel in ℝᴺ via the Hankel transform
/// F(r) = (2π)^{−N/2} r^{−ν} ∫ J_ν(kr) k^{ν+1} e^{−k¹⁰} dk, ν = N/2 − 1.
#[derive(Clone, Debug)]
pub struct RadialKernel {
    dim: usize,
    cutoff: f64,
    gauss: crate::numerics::GaussLegendre,
}

impl RadialKernel {
    /// Truncation of the Fourier integral: e^{−k¹⁰} < 1e−300 beyond k ≈ 1.93.
    pub const DEFAULT_CUTOFF: f64 = 2.2;

    pub fn new(dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Unsupported(format!("radial kernel in dimension {dim}")));
        }
        Ok(Self { dim, cutoff: Self::DEFAULT_CUTOFF, gauss: crate::numerics::GaussLegendre::new(16) })
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn nu(&self) -> f64 {
        0.5 * self.dim as f64 - 1.0
    }

    pub fn jet(&self, r: f64) -> RadialJet {
        let nu = self.nu();
        let norm = (2.0 * PI).powf(-0.5 * self.dim as f64);
        let panels = 24usize.max((0.5 * self.cutoff * r).ceil() as usize);
        let h = self.cutoff / panels as f64;
        let n = panels * self.gauss.nodes.len();
        let mut lap = vec![Vec::with_capacity(n); LAPLACIAN_LEVELS];
        let mut dlap = vec![Vec::with_capacity(n); LAPLACIAN_LEVELS];
        for panel in 0..panels {
            let mid = (panel as f64 + 0.5) * h;
            for (x, w) in self.gauss.nodes.iter().zip(&self.gauss.weights) {
                let k = mid + 0.5 * h * x;
                let weight = 0.5 * h * w * (-k.powi(10)).exp();
                let s0 = bessel_j_scaled(nu, k * r).expect("supported order");
                let s1 = bessel_j_scaled(nu + 1.0, k * r).expect("supported order");
                let mut a = weight * (0.5 * k).powf(nu) * s0 * k.powf(nu + 1.0);
                let mut b = -weight * r * (0.5 * k).powf(nu + 1.0) * s1 * k.powf(nu + 2.0);
                for j in 0..LAPLACIAN_LEVELS {
                    lap[j].push(a);
                    dlap[j].push(b);
                    a *= -k * k;
                    b *= -k * k;
                }
            }
        }
        let mut jet = RadialJet::default();
        for j in 0..LAPLACIAN_LEVELS {
            jet.lap[j] = norm * pairwise_sum(&lap[j]);
            jet.dlap[j] = norm * pairwise_sum(&dlap[j]);
        }
        jet
    }

    /// Even Taylor coefficients a_i of F(r) = Σ a_i r^{2i}.
    pub fn taylor_coefficients(&self, count: usize) -> Vec<f64> {
        let nu = self.nu();
        let n = self.dim as f64;
        let norm = (2.0 * PI).powf(-0.5 * n);
        (0..count)
            .map(|i| {
                let i_f = i as f64;
                let moment = gamma((2.0 * i_f + n) / 10.0) / 10.0;
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                norm * sign * moment
                    / (2f64.powf(2.0 * i_f + nu) * gamma(i_f + 1.0) * gamma(i_f + nu + 1.0))
            })
            .collect()
    }

    /// d^j F / dr^j for j = 0..=9.
    pub fn radial_derivatives(&self, r: f64) -> [f64; DERIVATIVE_COLUMNS] {
        if r < 1.0 {
            let a = self.taylor_coefficients(40);
            let mut out = [0.0; DERIVATIVE_COLUMNS];
            for (j, o) in out.iter_mut().enumerate() {
                *o = a
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| 2 * i >= j)
                    .map(|(i, c)| {
                        let p = 2 * i;
                        let falling: f64 = ((p - j + 1)..=p).map(|v| v as f64).product();
                        c * falling * r.powi((p - j) as i32)
                    })
                    .sum();
            }
            return out;
        }
        let jet = self.jet(r);
        let mut state = [0.0; 9];
        for k in 0..4 {
            state[2 * k] = jet.lap[k];
            state[2 * k + 1] = jet.dlap[k];
        }
        state[8] = jet.lap[4];
        crate::odeshoot::chain::chain_to_derivatives(&state, jet.dlap[4], r, self.dim)
    }
}

/// Tabulated kernel: F and its first nine derivatives (radial derivatives for N > 1)
/// on a grid, with the envelope decay constant and the weight exponent.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub dim: usize,
    pub order: usize,
    pub grid: Grid,
    /// `derivatives[j][i]` = F⁽ʲ⁾ at grid point i.
    pub derivatives: Vec<Vec<f64>>,
    pub decay: f64,
    /// Exponent a of the weight e^{a|y|^{10/9}}, fixed to d inside (0, 2d).
    pub weight_exponent: f64,
    /// Largest relative residual of Δ⁵F + (1/10)y·∇F + (N/10)F over the grid.
    pub residual: f64,
    /// Grid indices where that residual exceeds 1e−6.
    pub flagged: Vec<usize>,
}

impl Kernel {
    pub fn values(&self) -> &[f64] {
        &self.derivatives[0]
    }

    pub fn derivative(&self, j: usize) -> Result<&[f64]> {
        self.derivatives
            .get(j)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::Unsupported(format!("derivative order {j} beyond the table")))
    }

    /// ∫_{ℝᴺ} F using the grid's quadrature and the surface measure of the sphere.
    /// One-dimensional grids starting at 0 are doubled by evenness.
    pub fn mass(&self) -> f64 {
        let pts = self.grid.points();
        match self.dim {
            1 => {
                let m = self.grid.integrate(self.values());
                if pts[0] >= 0.0 {
                    2.0 * m
                } else {
                    m
                }
            }
            n => {
                let w: Vec<f64> =
                    pts.iter().zip(self.values()).map(|(r, f)| r.powi(n as i32 - 1) * f).collect();
                sphere_area(n) * self.grid.integrate(&w)
            }
        }
    }

    /// CSV with header `y,F,F1,...,F9`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("y,F");
        for j in 1..self.derivatives.len() {
            out.push_str(&format!(",F{j}"));
        }
        out.push('\n');
        for (i, y) in self.grid.points().iter().enumerate() {
            out.push_str(&fmt17(*y));
            for col in &self.derivatives {
                out.push(',');
                out.push_str(&fmt17(col[i]));
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Surface area of the unit sphere in ℝᴺ (2 for N = 1).
pub fn sphere_area(dim: usize) -> f64 {
    let n = dim as f64;
    2.0 * PI.powf(0.5 * n) / gamma(0.5 * n)
}

/// Tabulates the line kernel (order m = 5) on `grid`.
pub fn kernel_1d(grid: &Grid) -> Result<Kernel> {
    kernel_1d_order(grid, 5)
}

/// Line kernel of e^{−k^{2m}}; the residual check is specific to m = 5.
pub fn kernel_1d_order(grid: &Grid, m: usize) -> Result<Kernel> {
    if grid.first() > 0.0 || grid.last() < 10.0 {
        return invalid(format!(
            "kernel grid must cover [0, y_max] with y_max >= 10, got [{}, {}]",
            grid.first(),
            grid.last()
        ));
    }
    let lk = LineKernel::new(m);
    let jmax = if m == 5 { 10 } else { DERIVATIVE_COLUMNS - 1 };
    let rows: Vec<Vec<f64>> = grid.points().par_iter().map(|&y| lk.derivatives(y, jmax)).collect();
    let mut derivatives = vec![Vec::with_capacity(grid.len()); DERIVATIVE_COLUMNS];
    for row in &rows {
        for (j, col) in derivatives.iter_mut().enumerate() {
            col.push(row[j]);
        }
    }
    let (residual, flagged) = if m == 5 {
        let mut worst = 0.0f64;
        let mut flagged = Vec::new();
        for (i, (y, row)) in grid.points().iter().zip(&rows).enumerate() {
            let terms = [row[10], 0.1 * y * row[1], 0.1 * row[0]];
            let scale: f64 = terms.iter().map(|t| t.abs()).sum();
            if scale == 0.0 {
                continue;
            }
            let rel = terms.iter().sum::<f64>().abs() / scale;
            worst = worst.max(rel);
            if rel > 1e-6 {
                flagged.push(i);
            }
        }
        (worst, flagged)
    } else {
        (0.0, Vec::new())
    };
    let d = decay_constant();
    Ok(Kernel {
        dim: 1,
        order: m,
        grid: grid.clone(),
        derivatives,
        decay: d,
        weight_exponent: d,
        residual,
        flagged,
    })
}

/// Tabulates the radial kernel in ℝᴺ, N ∈ {1, 2, 3}, on a grid of radii.
pub fn kernel_radial(dim: usize, grid: &Grid) -> Result<Kernel> {
    let rk = RadialKernel::new(dim)?;
    if grid.first() < 0.0 {
        return invalid("radial grid must be nonnegative");
    }
    let rows: Vec<([f64; DERIVATIVE_COLUMNS], f64)> = grid
        .points()
        .par_iter()
        .map(|&r| {
            let d = rk.radial_derivatives(r);
            let jet = rk.jet(r);
            let n = dim as f64;
            let terms = [jet.lap[5], 0.1 * r * jet.dlap[0], 0.1 * n * jet.lap[0]];
            let scale: f64 = terms.iter().map(|t| t.abs()).sum();
            let rel = if scale > 0.0 { terms.iter().sum::<f64>().abs() / scale } else { 0.0 };
            (d, rel)
        })
        .collect();
    let mut derivatives = vec![Vec::with_capacity(grid.len()); DERIVATIVE_COLUMNS];
    let mut residual = 0.0f64;
    let mut flagged = Vec::new();
    for (i, (row, rel)) in rows.iter().enumerate() {
        for (j, col) in derivatives.iter_mut().enumerate() {
            col.push(row[j]);
        }
        residual = residual.max(*rel);
        if *rel > 1e-6 {
            flagged.push(i);
        }
    }
    let d = decay_constant();
    Ok(Kernel {
        dim,
        order: 5,
        grid: grid.clone(),
        derivatives,
        decay: d,
        weight_exponent: d,
        residual,
        flagged,
    })
}

/// Interpolating table of radial jets on a uniform mesh, for quadratures that need
/// the kernel at many scattered radii.
#[derive(Clone, Debug)]
pub struct RadialTable {
    dim: usize,
    step: f64,
    jets: Vec<RadialJet>,
}

impl RadialTable {
    pub fn build(kernel: &RadialKernel, r_max: f64, step: f64) -> Result<Self> {
        if !(r_max > 0.0 && step > 0.0) {
            return invalid("radial table needs positive extent and step");
        }
        let n = (r_max / step).ceil() as usize + 1;
        let jets = (0..n).into_par_iter().map(|i| kernel.jet(i as f64 * step)).collect();
        Ok(Self { dim: kernel.dim(), step, jets })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r_max(&self) -> f64 {
        (self.jets.len() - 1) as f64 * self.step
    }

    /// Cubic Hermite interpolation of every Δ^j F (using its derivative) and of every
    /// (Δ^j F)′ (using (Δ^j F)″ from the chain identity).
    pub fn jet(&self, r: f64) -> RadialJet {
        let n = self.jets.len();
        if r >= self.r_max() {
            return RadialJet::default();
        }
        let pos = r / self.step;
        let i = (pos.floor() as usize).min(n - 2);
        let t = pos - i as f64;
        let (r0, r1) = (i as f64 * self.step, (i + 1) as f64 * self.step);
        let (a, b) = (&self.jets[i], &self.jets[i + 1]);
        let h = self.step;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let mut out = RadialJet::default();
        for j in 0..LAPLACIAN_LEVELS {
            out.lap[j] = h00 * a.lap[j] + h10 * h * a.dlap[j] + h01 * b.lap[j] + h11 * h * b.dlap[j];
            if j + 1 < LAPLACIAN_LEVELS {
                let da = a.second(j, r0, self.dim);
                let db = b.second(j, r1, self.dim);
                out.dlap[j] = h00 * a.dlap[j] + h10 * h * da + h01 * b.dlap[j] + h11 * h * db;
            } else {
                out.dlap[j] = (1.0 - t) * a.dlap[j] + t * b.dlap[j];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_at_origin_is_gamma_over_pi() {
        let f0 = LineKernel::default().value(0.0);
        assert!((f0 - gamma(1.1) / PI).abs() < 1e-15);
    }

    #[test]
    fn far_tail_keeps_relative_accuracy() {
        let lk = LineKernel::default();
        let f100 = lk.value(100.0);
        assert!((f100 / 4.0467e-11 - 1.0).abs() < 1e-3, "{f100}");
        assert!(lk.value(300.0).abs() < 1e-30);
    }

    #[test]
    fn odd_derivatives_flip_sign() {
        let lk = LineKernel::default();
        let p = lk.derivatives(3.7, 3);
        let m = lk.derivatives(-3.7, 3);
        assert_eq!(p[0], m[0]);
        assert_eq!(p[1], -m[1]);
        assert_eq!(p[2], m[2]);
        assert_eq!(p[3], -m[3]);
    }

    #[test]
    fn radial_n1_matches_line_kernel() {
        let rk = RadialKernel::new(1).unwrap();
        let lk = LineKernel::default();
        for r in [0.0, 0.7, 3.0, 12.5, 40.0] {
            let a = rk.jet(r);
            let b = lk.derivatives(r, 2);
            assert!((a.lap[0] - b[0]).abs() < 1e-12, "{r}");
            assert!((a.dlap[0] - b[1]).abs() < 1e-12, "{r}");
            assert!((a.lap[1] - b[2]).abs() < 1e-12, "{r}");
        }
    }

    #[test]
    fn taylor_series_matches_hankel_near_origin() {
        for dim in 1..=3 {
            let rk = RadialKernel::new(dim).unwrap();
            let d = rk.radial_derivatives(0.5);
            let jet = rk.jet(0.5);
            assert!((d[0] - jet.lap[0]).abs() < 1e-13);
            assert!((d[1] - jet.dlap[0]).abs() < 1e-13);
        }
    }

    #[test]
    fn table_interpolation_is_accurate() {
        let rk = RadialKernel::new(2).unwrap();
        let table = RadialTable::build(&rk, 12.0, 0.01).unwrap();
        for r in [0.003, 1.2345, 7.777] {
            let a = table.jet(r);
            let b = rk.jet(r);
            for j in 0..6 {
                assert!((a.lap[j] - b.lap[j]).abs() < 1e-9, "lap {j} at {r}");
                assert!((a.dlap[j] - b.dlap[j]).abs() < 1e-9, "dlap {j} at {r}");
            }
        }
    }
}
