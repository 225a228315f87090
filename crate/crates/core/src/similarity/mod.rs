//! Mass-conserving similarity exponents, the far-field bundle of the rescaled
//! equation, and the nonlinear eigenfunctions f₀ (n > 0) and f_k (n = 0).

pub(crate) mod f0;
mod linear;

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::profile::RadialProfile;

pub use f0::{default_delta, kernel_distance, shoot_f0, solve_f0, Drift, F0Options, ACCEPT, INTERIOR_LIMIT};
pub use linear::{solve_fk_linear, LINEAR_RESIDUAL_LIMIT};

/// u = t^{−α} f(x/t^β) with 10β + nα = 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SimilarityExponents {
    pub alpha: f64,
    pub beta: f64,
    pub n: f64,
    pub dim: usize,
}

/// The mass-conserving pair α₀ = N/(10+Nn), β₀ = 1/(10+Nn).
pub fn alpha0(n: f64, dim: usize) -> Result<SimilarityExponents> {
    let denom = 10.0 + dim as f64 * n;
    if !(denom > 0.0) || dim == 0 {
        return invalid(format!("10 + N n = {denom} must be positive"));
    }
    Ok(SimilarityExponents { alpha: dim as f64 / denom, beta: 1.0 / denom, n, dim })
}

/// α_k(0) = −λ_k + N/10 = (k + N)/10.
pub fn alpha_k_linear(k: usize, dim: usize) -> f64 {
    (k + dim) as f64 / 10.0
}

/// Tail modes A|y|^{−4N/9} exp(−(9/10)α^{1/9} ω |y|^{10/9}) with ω⁹ = 1, Re ω > 0.
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticBundle {
    pub alpha: f64,
    /// ω = exp(2πim/9) for m = 0, ±1, ±2.
    #[serde(serialize_with = "serialize_complex")]
    pub omegas: Vec<Complex64>,
    pub modes: Vec<i32>,
    /// Power of |y| in the amplitude, per unit dimension: −4/9.
    pub amplitude_exponent: f64,
    /// Real decay constant (9/10)α^{1/9} Re ω of the slowest pair (m = ±2).
    pub slowest_decay: f64,
}

fn serialize_complex<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&(z.re, z.im))?;
    }
    seq.end()
}

pub fn asymptotic_bundle(alpha: f64) -> Result<AsymptoticBundle> {
    if !(alpha > 0.0) {
        return invalid("bundle needs α > 0");
    }
    let modes = vec![0, 1, -1, 2, -2];
    let omegas: Vec<Complex64> =
        modes.iter().map(|m| Complex64::from_polar(1.0, 2.0 * PI * *m as f64 / 9.0)).collect();
    let scale = 0.9 * alpha.powf(1.0 / 9.0);
    let slowest = omegas.iter().map(|w| scale * w.re).fold(f64::INFINITY, f64::min);
    Ok(AsymptoticBundle { alpha, omegas, modes, amplitude_exponent: -4.0 / 9.0, slowest_decay: slowest })
}

impl AsymptoticBundle {
    /// Amplitude exponent −4N/9 in dimension N.
    pub fn amplitude_power(&self, dim: usize) -> f64 {
        self.amplitude_exponent * dim as f64
    }

    pub fn decay_constants(&self) -> Vec<f64> {
        let scale = 0.9 * self.alpha.powf(1.0 / 9.0);
        self.omegas.iter().map(|w| scale * w.re).collect()
    }
}

/// ∫ f over ℝᴺ with the surface measure (even extension in 1D).
pub fn mass(profile: &RadialProfile) -> f64 {
    profile.mass()
}

/// −α + βN = 0, the condition for ∫u to be constant in time, up to rounding.
pub fn check_mass_conservation(exponents: &SimilarityExponents) -> bool {
    let defect = exponents.alpha - exponents.beta * exponents.dim as f64;
    defect.abs() <= 4.0 * f64::EPSILON * exponents.alpha.abs()
}

/// A solved similarity profile: f₀ at n > 0 or f_k at n = 0.
#[derive(Clone, Debug)]
pub struct NonlinearEigenfunction {
    pub k: usize,
    pub n: f64,
    pub dim: usize,
    pub alpha: f64,
    pub profile: RadialProfile,
    /// Interface position; `None` for the infinite support at n = 0.
    pub y0: Option<f64>,
    /// f(0) for even profiles, f′(0) for odd ones.
    pub normalization: f64,
    /// Even origin derivatives f″(0), f⁗(0), f⁽⁶⁾(0), f⁽⁸⁾(0) (empty at n = 0).
    pub origin_derivatives: Vec<f64>,
    /// Interface residuals f, f′, …, f⁗ at y₀ (chain components at N > 1).
    pub residuals: Vec<f64>,
    pub interior_residual: f64,
    pub converged: bool,
    pub iterations: usize,
    pub delta: f64,
    /// Fitted tail decay constant when the grid resolves the far field.
    pub tail_decay: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct Record<'a> {
    k: usize,
    n: f64,
    #[serde(rename = "N")]
    dim: usize,
    alpha: f64,
    y0: Option<f64>,
    normalization: f64,
    residuals: &'a [f64],
    origin_derivatives: &'a [f64],
    interior_residual: f64,
    converged: bool,
    iterations: usize,
    delta: f64,
    tail_decay: Option<f64>,
    warnings: &'a [String],
}

impl NonlinearEigenfunction {
    pub fn residual_norm(&self) -> f64 {
        self.residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()))
    }

    /// Sign changes of f with dead band 10δ (or none at δ = 0) on [a, b].
    pub fn sign_changes(&self, a: f64, b: f64) -> Vec<f64> {
        self.profile.sign_changes(10.0 * self.delta, a, b)
    }

    pub fn mass(&self) -> f64 {
        self.profile.mass()
    }

    /// JSON record {k, n, N, alpha, y0, normalization, residuals, …}.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&Record {
            k: self.k,
            n: self.n,
            dim: self.dim,
            alpha: self.alpha,
            y0: self.y0,
            normalization: self.normalization,
            residuals: &self.residuals,
            origin_derivatives: &self.origin_derivatives,
            interior_residual: self.interior_residual,
            converged: self.converged,
            iterations: self.iterations,
            delta: self.delta,
            tail_decay: self.tail_decay,
            warnings: &self.warnings,
        })?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents() {
        let e = alpha0(0.0, 1).unwrap();
        assert_eq!((e.alpha, e.beta), (0.1, 0.1));
        let e = alpha0(1.0, 1).unwrap();
        assert!((e.alpha - 1.0 / 11.0).abs() < 1e-16 && (e.beta - 1.0 / 11.0).abs() < 1e-16);
        let e = alpha0(0.0, 2).unwrap();
        assert_eq!((e.alpha, e.beta), (0.2, 0.1));
        assert!(check_mass_conservation(&e));
        let bad = SimilarityExponents { alpha: 0.2, beta: 0.1, n: 0.0, dim: 1 };
        assert!(!check_mass_conservation(&bad));
    }

    #[test]
    fn linear_alphas() {
        assert_eq!(alpha_k_linear(0, 1), 0.1);
        assert_eq!(alpha_k_linear(2, 2), 0.4);
        assert_eq!(alpha_k_linear(3, 2), 0.5);
    }

    #[test]
    fn bundle_roots() {
        let b = asymptotic_bundle(0.1).unwrap();
        assert_eq!(b.omegas.len(), 5);
        for w in &b.omegas {
            assert!((w.powu(9) - 1.0).norm() < 1e-13);
            assert!(w.re > 0.0);
        }
        let d = b.decay_constants();
        assert_eq!(d[0], d.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        assert!((b.slowest_decay - 0.12100).abs() < 1e-5, "{}", b.slowest_decay);
        assert!((b.slowest_decay - crate::spectral::decay_constant()).abs() < 1e-15);
    }
}
