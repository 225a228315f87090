//! The linear flow u_t = Δ⁵u in one dimension, its rescaled form
//! w(y, τ) = e^{τ/10} u(e^{τ/10} y, e^τ), moments, and the eigen-expansion
//! w = Σ_k e^{−kτ/10} M_k ψ_k.
//!
//! Everything goes through the Fourier transform û₀(q) = ∫ u₀(z) e^{−iqz} dz, since
//! the flow multiplies it by e^{−q¹⁰t} and the rescaled solution has
//! ŵ(q, τ) = û₀(q e^{−τ/10}) e^{−q¹⁰}. L² distances use Plancherel.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::numerics::quadrature::QuadratureRule;
use crate::numerics::Grid;
use crate::profile::{Domain, RadialProfile};
use crate::spectral::eigen::{eigenfunction, MultiIndex};
use crate::spectral::kernel::Kernel;

/// Fourier cutoff for the rescaled problem: e^{−q¹⁰} underflows beyond it.
const Q_RESCALED: f64 = 2.2;

/// M_k = (1/√k!) ∫ z^k u₀(z) dz for k = 0..=kmax.
#[derive(Clone, Debug, Serialize)]
pub struct MomentSet {
    pub values: Vec<f64>,
}

impl MomentSet {
    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }
}

fn check_line(u0: &RadialProfile) -> Result<()> {
    if u0.dim != 1 {
        return invalid("the linear flow is implemented in one dimension");
    }
    Ok(())
}

/// Quadrature weights matching `Grid::integrate`.
fn weights(grid: &Grid) -> Vec<f64> {
    use crate::numerics::Spacing;
    let n = grid.len();
    match grid.spacing() {
        Spacing::PanelComposite { weights } => weights.clone(),
        Spacing::Uniform { step } if n % 2 == 1 && n >= 3 => (0..n)
            .map(|i| {
                let c = if i == 0 || i == n - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * step / 3.0
            })
            .collect(),
        _ => {
            let p = grid.points();
            (0..n)
                .map(|i| {
                    let left = if i > 0 { p[i] - p[i - 1] } else { 0.0 };
                    let right = if i + 1 < n { p[i + 1] - p[i] } else { 0.0 };
                    0.5 * (left + right)
                })
                .collect()
        }
    }
}

pub fn moments(u0: &RadialProfile, kmax: usize) -> Result<MomentSet> {
    check_line(u0)?;
    let w = weights(&u0.grid);
    let pts = u0.grid.points();
    let values = (0..=kmax)
        .map(|k| {
            let fact: f64 = (1..=k).map(|v| v as f64).product();
            let raw: f64 = pts.iter().zip(u0.values()).zip(&w).map(|((z, u), wi)| wi * z.powi(k as i32) * u).sum();
            let full = match u0.domain {
                Domain::Line => raw,
                Domain::Radial if k % 2 == 0 => 2.0 * raw,
                Domain::Radial => 0.0,
            };
            full / fact.sqrt()
        })
        .collect();
    Ok(MomentSet { values })
}

/// Evaluator of û₀ from the samples of u₀.
struct Transform {
    z: Vec<f64>,
    wu: Vec<f64>,
    even: bool,
}

impl Transform {
    fn new(u0: &RadialProfile) -> Result<Self> {
        check_line(u0)?;
        let w = weights(&u0.grid);
        Ok(Self {
            z: u0.grid.points().to_vec(),
            wu: w.iter().zip(u0.values()).map(|(a, b)| a * b).collect(),
            even: u0.domain == Domain::Radial,
        })
    }

    fn at(&self, q: f64) -> Complex64 {
        if self.even {
            let re: f64 = self.z.iter().zip(&self.wu).map(|(z, w)| w * (q * z).cos()).sum();
            Complex64::new(2.0 * re, 0.0)
        } else {
            let (mut re, mut im) = (0.0, 0.0);
            for (z, w) in self.z.iter().zip(&self.wu) {
                let (s, c) = (q * z).sin_cos();
                re += w * c;
                im -= w * s;
            }
            Complex64::new(re, im)
        }
    }

    fn extent(&self) -> f64 {
        self.z.iter().fold(0.0f64, |m, z| m.max(z.abs()))
    }
}

/// (1/π) ∫₀^Q Re(ĝ(q) e^{iqx}) dq on a panel rule fine enough for the oscillation.
fn inverse_transform(spectrum: &[(f64, f64, Complex64)], x: f64) -> f64 {
    spectrum.iter().map(|(q, w, g)| w * (g * Complex64::new(0.0, q * x).exp()).re).sum::<f64>() / PI
}

fn spectral_rule(q_max: f64, extent: f64) -> Result<Vec<(f64, f64)>> {
    let panels = 32usize.max((q_max * extent / 2.0).ceil() as usize);
    Ok(QuadratureRule::uniform(0.0, q_max, panels, 16)?.nodes())
}

/// u(·, t) on the grid of u₀.
pub fn evolve_linear(u0: &RadialProfile, t: f64) -> Result<RadialProfile> {
    if !(t > 0.0) {
        return invalid("evolution time must be positive");
    }
    let tr = Transform::new(u0)?;
    let q_max = (745.0 / t).powf(0.1);
    let extent = 2.0 * tr.extent();
    let spectrum: Vec<(f64, f64, Complex64)> = spectral_rule(q_max, extent)?
        .into_iter()
        .map(|(q, w)| (q, w, tr.at(q) * (-q.powi(10) * t).exp()))
        .collect();
    let values: Vec<f64> = u0.grid.points().iter().map(|x| inverse_transform(&spectrum, *x)).collect();
    RadialProfile::new(1, u0.domain, u0.grid.clone(), vec![values])
}

/// w(·, τ) on `grid`.
pub fn rescaled_profile(u0: &RadialProfile, tau: f64, grid: &Grid) -> Result<RadialProfile> {
    let tr = Transform::new(u0)?;
    let shrink = (-tau / 10.0).exp();
    let extent = grid.last().abs().max(grid.first().abs()) + shrink * tr.extent();
    let spectrum: Vec<(f64, f64, Complex64)> = spectral_rule(Q_RESCALED, extent)?
        .into_iter()
        .map(|(q, w)| (q, w, tr.at(q * shrink) * (-q.powi(10)).exp()))
        .collect();
    let values: Vec<f64> = grid.points().iter().map(|x| inverse_transform(&spectrum, *x)).collect();
    let domain = if grid.first() < 0.0 { Domain::Line } else { Domain::Radial };
    RadialProfile::new(1, domain, grid.clone(), vec![values])
}

/// Σ_{k<K} e^{−kτ/10} M_k ψ_k on the kernel's grid.
pub fn truncated_expansion(m: &MomentSet, kernel: &Kernel, tau: f64, terms: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; kernel.grid.len()];
    for k in 0..terms {
        let psi = eigenfunction(&MultiIndex::scalar(k), kernel)?;
        let c = (-(k as f64) * tau / 10.0).exp() * m.get(k);
        for (o, p) in out.iter_mut().zip(psi.values()) {
            *o += c * p;
        }
    }
    Ok(out)
}

/// √∫ (a − b)² over the grid.
pub fn l2_distance(grid: &Grid, a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).collect();
    grid.integrate(&d).sqrt()
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceTable {
    pub taus: Vec<f64>,
    pub errors: Vec<f64>,
    /// −slope of ln(error) against τ.
    pub rate: f64,
    pub first_moment: f64,
    pub warning: Option<String>,
}

/// ‖w(·, τ) − M₀ψ₀‖_{L²} for each τ and the fitted exponential rate.
pub fn rescaled_convergence(u0: &RadialProfile, taus: &[f64]) -> Result<ConvergenceTable> {
    if taus.len() < 2 {
        return invalid("need at least two values of τ");
    }
    let m = moments(u0, 1)?;
    if (m.get(0) - 1.0).abs() > 1e-6 {
        return invalid(format!("initial datum must have unit mass, found {}", m.get(0)));
    }
    let tr = Transform::new(u0)?;
    let m0 = tr.at(0.0);
    let rule = QuadratureRule::uniform(0.0, Q_RESCALED, 32, 16)?.nodes();
    let errors: Vec<f64> = taus
        .iter()
        .map(|tau| {
            let shrink = (-tau / 10.0).exp();
            let s: f64 = rule
                .iter()
                .map(|(q, w)| w * (tr.at(q * shrink) - m0).norm_sqr() * (-2.0 * q.powi(10)).exp())
                .sum();
            (s / PI).sqrt()
        })
        .collect();
    let x: Vec<f64> = taus.to_vec();
    let v: Vec<f64> = errors.iter().map(|e| e.max(f64::MIN_POSITIVE).ln()).collect();
    let (_, slope, _) = crate::spectral::decay::linear_fit(&x, &v);
    let span = taus.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - taus.iter().cloned().fold(f64::INFINITY, f64::min);
    let warning = (span < 30.0).then(|| format!("τ spans {span}, fewer than three e-folds of the leading mode"));
    Ok(ConvergenceTable { taus: x, errors, rate: -slope, first_moment: m.get(1), warning })
}

/// Unit-mass Gaussian bump centred at `shift` with width `sigma`, sampled on `grid`.
pub fn gaussian_bump(grid: &Grid, shift: f64, sigma: f64) -> Result<RadialProfile> {
    let c = 1.0 / (sigma * (2.0 * PI).sqrt());
    let v = grid.points().iter().map(|z| c * (-(z - shift).powi(2) / (2.0 * sigma * sigma)).exp()).collect();
    RadialProfile::line(grid.clone(), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_of_a_gaussian() {
        let grid = Grid::uniform(-30.0, 30.0, 6001).unwrap();
        let u = gaussian_bump(&grid, 0.5, 1.0).unwrap();
        let m = moments(&u, 2).unwrap();
        assert!((m.get(0) - 1.0).abs() < 1e-12);
        assert!((m.get(1) - 0.5).abs() < 1e-12);
        assert!((m.get(2) - 1.25 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn evolution_conserves_mass_and_zero_mean() {
        // At t = 1 the oscillating tail still carries 1e−4 of the mass beyond |x| = 30.
        let grid = Grid::uniform(-100.0, 100.0, 10001).unwrap();
        let u = gaussian_bump(&grid, 0.0, 1.0).unwrap();
        let v = evolve_linear(&u, 1.0).unwrap();
        assert!((v.mass() - 1.0).abs() < 1e-9, "mass {}", v.mass());
        let odd: Vec<f64> = grid.points().iter().map(|z| z * (-z * z / 2.0).exp()).collect();
        let w = evolve_linear(&RadialProfile::line(grid, odd).unwrap(), 1.0).unwrap();
        assert!(w.mass().abs() < 1e-12);
    }
}
