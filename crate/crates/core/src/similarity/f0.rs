//! f₀ for n > 0: the once-integrated equation |f|ⁿ(Δ⁴f)′ + β₀ r f = 0, shot from
//! the origin with unknowns f″(0), f⁗(0), f⁽⁶⁾(0), f⁽⁸⁾(0), y₀ against
//! f = f′ = Δf = (Δf)′ = Δ²f = 0 at y₀.

use crate::error::{invalid, Error, Result};
use crate::numerics::newton::NewtonOptions;
use crate::odeshoot::chain::{even_derivative_at_origin, laplacian_at_origin, Flux, RadialChain};
use crate::odeshoot::integrator::IvpOptions;
use crate::odeshoot::shooting::{shoot, OriginValue, ShootOutcome, ShootingSpec, Target};
use crate::profile::RadialProfile;
use crate::similarity::{alpha0, NonlinearEigenfunction};
use crate::spectral::kernel::RadialKernel;

/// Largest interface residual of an accepted profile.
pub const ACCEPT: f64 = 1e-8;

/// Largest relative residual of the tenth-order equation on an accepted profile.
pub const INTERIOR_LIMIT: f64 = 1e-6;

/// Below this n the kernel supplies the initial guess; above it the branch is continued.
pub(crate) const SEED_LIMIT: f64 = 0.05;

/// Coefficient of the r f term in the integrated equation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Drift {
    /// β₀ = 1/(10+Nn), forced by the divergence form.
    #[default]
    Beta,
    /// α₀ = N/(10+Nn); equal to β₀ at N = 1.
    Alpha,
}

#[derive(Clone, Debug)]
pub struct F0Options {
    /// Mobility regularization; `None` selects min(1e−10, 1e−8 n).
    pub delta: Option<f64>,
    /// (f″(0), f⁗(0), f⁽⁶⁾(0), f⁽⁸⁾(0), y₀).
    pub guess: Option<[f64; 5]>,
    pub drift: Drift,
    /// f(0).
    pub normalization: f64,
    /// Newton tolerance on the interface residuals.
    pub tol: f64,
    /// Relative tolerance of the integrator; the absolute one is 1e−2 of it.
    pub ivp_tol: f64,
    pub max_iter: usize,
    /// Output intervals on [0, y₀].
    pub samples: usize,
}

impl Default for F0Options {
    fn default() -> Self {
        Self { delta: None, guess: None, drift: Drift::Beta, normalization: 1.0, tol: 1e-10, ivp_tol: 1e-11, max_iter: 40, samples: 1000 }
    }
}

impl F0Options {
    pub fn delta_for(&self, n: f64) -> f64 {
        self.delta.unwrap_or_else(|| default_delta(n))
    }
}

pub fn default_delta(n: f64) -> f64 {
    1e-10f64.min(1e-8 * n)
}

pub(crate) fn f0_chain(n: f64, dim: usize, opts: &F0Options, flux: Flux) -> Result<RadialChain> {
    let e = alpha0(n, dim)?;
    let beta = match opts.drift {
        Drift::Beta => e.beta,
        Drift::Alpha => e.alpha,
    };
    Ok(RadialChain { n, beta, delta: opts.delta_for(n), dim, flux })
}

pub(crate) fn f0_spec(chain: RadialChain, opts: &F0Options) -> Result<ShootingSpec<RadialChain>> {
    use OriginValue::{Fixed, Unknown};
    let origin = vec![
        Fixed(opts.normalization),
        Fixed(0.0),
        Unknown,
        Fixed(0.0),
        Unknown,
        Fixed(0.0),
        Unknown,
        Fixed(0.0),
        Unknown,
    ];
    let targets = (0..5).map(Target::zero).collect();
    let mut spec = ShootingSpec::new(chain, origin, true, 0.0, targets)?;
    spec.samples = opts.samples;
    spec.ivp = IvpOptions { rtol: opts.ivp_tol, atol: 1e-2 * opts.ivp_tol, ..IvpOptions::default() };
    spec.newton = NewtonOptions { tol: opts.tol, max_iter: opts.max_iter, ..NewtonOptions::default() };
    Ok(spec)
}

/// Shooting unknowns (Laplacians at the origin, y₀) from even derivatives and y₀.
pub(crate) fn to_unknowns(guess: &[f64; 5], dim: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (1..=4).map(|k| laplacian_at_origin(k, dim, guess[k - 1])).collect();
    x.push(guess[4]);
    x
}

pub(crate) fn from_unknowns(x: &[f64], dim: usize) -> [f64; 5] {
    let mut out = [0.0; 5];
    for k in 1..=4 {
        out[k - 1] = even_derivative_at_origin(k, dim, x[k - 1]);
    }
    out[4] = x[4];
    out
}

fn check_range(n: f64, dim: usize) -> Result<Vec<String>> {
    if n == 0.0 {
        return invalid("n = 0 has infinite support; use solve_fk_linear");
    }
    if !(n > 0.0) || !n.is_finite() {
        return invalid(format!("n = {n} must be positive"));
    }
    if !(1..=3).contains(&dim) {
        return Err(Error::Unsupported(format!("f0 in dimension {dim}")));
    }
    Ok(if n > 1.5 { vec![format!("n = {n} is beyond the validated range (0, 1.5]")] } else { Vec::new() })
}

/// Wraps a shooting outcome as an eigenfunction, applying the acceptance limits.
pub(crate) fn assemble(chain: &RadialChain, out: &ShootOutcome, k: usize, alpha: f64, normalization: f64) -> Result<NonlinearEigenfunction> {
    let profile = RadialProfile::from_chain(chain, &out.trajectory)?;
    let interior = out.interior_residual.unwrap_or(f64::NAN);
    let converged = out.converged && out.residual_norm() <= ACCEPT && interior <= INTERIOR_LIMIT;
    Ok(NonlinearEigenfunction {
        k,
        n: chain.n,
        dim: chain.dim,
        alpha,
        profile,
        y0: Some(out.end),
        normalization,
        origin_derivatives: from_unknowns(&out.unknowns, chain.dim)[..4].to_vec(),
        residuals: out.residuals.clone(),
        interior_residual: interior,
        converged,
        iterations: out.report.iterations,
        delta: chain.delta,
        tail_decay: None,
        warnings: Vec::new(),
    })
}

/// One shooting solve from an explicit guess (even derivatives and y₀).
pub fn shoot_f0(n: f64, dim: usize, opts: &F0Options, guess: &[f64; 5]) -> Result<NonlinearEigenfunction> {
    let warnings = check_range(n, dim)?;
    let chain = f0_chain(n, dim, opts, Flux::Thin)?;
    let spec = f0_spec(chain.clone(), opts)?;
    let out = shoot(&spec, &to_unknowns(guess, dim))?;
    let mut ef = assemble(&chain, &out, 0, alpha0(n, dim)?.alpha, opts.normalization)?;
    ef.warnings = warnings;
    Ok(ef)
}

/// f⁽²ᵏ⁾(0)/F(0), k = 1..=4, for the kernel in dimension N.
pub(crate) fn kernel_origin_ratios(dim: usize) -> Result<[f64; 4]> {
    let a = RadialKernel::new(dim)?.taylor_coefficients(5);
    let mut out = [0.0; 4];
    for k in 1..=4 {
        let fact: f64 = (1..=2 * k).map(|v| v as f64).product();
        out[k - 1] = a[k] * fact / a[0];
    }
    Ok(out)
}

/// Candidate interfaces tried when no guess is available.
const SCAN: (f64, f64, f64) = (5.0, 20.0, 0.5);

/// Newton runs started from the best-scoring scan candidates.
const SCAN_STARTS: usize = 6;

/// Converged candidates from kernel-derived origin data and a scan over y₀; the one
/// closest to the mass-normalized kernel wins.
fn solve_from_kernel(n: f64, dim: usize, opts: &F0Options) -> Result<NonlinearEigenfunction> {
    let chain = f0_chain(n, dim, opts, Flux::Thin)?;
    let spec = f0_spec(chain.clone(), opts)?;
    let ratios = kernel_origin_ratios(dim)?;
    let c = opts.normalization;
    let mut scored: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut y0 = SCAN.0;
    while y0 <= SCAN.1 + 1e-12 {
        let guess = [c * ratios[0], c * ratios[1], c * ratios[2], c * ratios[3], y0];
        let x = to_unknowns(&guess, dim);
        if let Ok(r) = spec.residuals(&x) {
            let norm = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if norm.is_finite() {
                scored.push((norm, x));
            }
        }
        y0 += SCAN.2;
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let alpha = alpha0(n, dim)?.alpha;
    let mut best: Option<(f64, NonlinearEigenfunction)> = None;
    let mut fallback: Option<NonlinearEigenfunction> = None;
    for (_, x) in scored.into_iter().take(SCAN_STARTS) {
        let Ok(out) = shoot(&spec, &x) else { continue };
        let ef = assemble(&chain, &out, 0, alpha, c)?;
        if !ef.converged {
            if fallback.as_ref().map_or(true, |f| ef.residual_norm() < f.residual_norm()) {
                fallback = Some(ef);
            }
            continue;
        }
        let dist = kernel_distance(&ef, 0.8)?;
        if best.as_ref().map_or(true, |(d, _)| dist < *d) {
            best = Some((dist, ef));
        }
    }
    match (best, fallback) {
        (Some((_, ef)), _) => Ok(ef),
        (None, Some(ef)) => Ok(ef),
        (None, None) => Err(Error::ShootingWindow("no kernel-derived start reached an interface".into())),
    }
}

/// Solves for f₀ at exponent n in dimension N.
///
/// With a guess in `opts` this is one shooting solve. Otherwise small n starts from
/// the kernel and larger n continues the branch from there. A non-converged result is
/// returned with `converged == false`.
pub fn solve_f0(n: f64, dim: usize, opts: &F0Options) -> Result<NonlinearEigenfunction> {
    let warnings = check_range(n, dim)?;
    let mut ef = match opts.guess {
        Some(g) => shoot_f0(n, dim, opts, &g)?,
        None if n <= SEED_LIMIT => solve_from_kernel(n, dim, opts)?,
        None => crate::continuation::continue_to(n, dim, opts)?,
    };
    ef.warnings = warnings;
    Ok(ef)
}

/// sup |f/∫f − F| over [0, fraction·y₀], F the unit-mass kernel in the same dimension.
pub fn kernel_distance(ef: &NonlinearEigenfunction, fraction: f64) -> Result<f64> {
    let limit = fraction * ef.y0.unwrap_or(ef.profile.grid.last());
    let m = ef.mass();
    if m == 0.0 {
        return invalid("profile has zero mass");
    }
    let kernel = RadialKernel::new(ef.dim)?;
    Ok(ef
        .profile
        .grid
        .points()
        .iter()
        .zip(ef.profile.values())
        .filter(|(y, _)| **y <= limit)
        .map(|(y, f)| (f / m - kernel.radial_derivatives(*y)[0]).abs())
        .fold(0.0f64, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknowns_roundtrip() {
        for dim in 1..=3 {
            let g = [-0.3, 0.2, -0.1, 0.05, 9.0];
            let back = from_unknowns(&to_unknowns(&g, dim), dim);
            for (a, b) in g.iter().zip(&back) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_exponent_is_rejected() {
        assert!(matches!(solve_f0(0.0, 1, &F0Options::default()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn kernel_ratios_in_one_dimension() {
        // F″(0)/F(0) = −Γ(3/10)/Γ(1/10).
        let r = kernel_origin_ratios(1).unwrap();
        let expect = -crate::numerics::gamma(0.3) / crate::numerics::gamma(0.1);
        assert!((r[0] - expect).abs() < 1e-12, "{} {}", r[0], expect);
    }
}
