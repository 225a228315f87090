//! The thin-film equation with backward diffusion,
//! u_t = ∇·(|u|ⁿ∇Δ⁴u) − Δ(|u|^{p−1}u): its similarity exponents, the critical
//! exponent at which both fluxes scale alike under mass conservation, the radial
//! profile there, and the symbol of the linearization.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::odeshoot::chain::Flux;
use crate::odeshoot::shooting::shoot;
use crate::similarity::f0::{assemble, f0_chain, f0_spec, to_unknowns};
use crate::similarity::{solve_f0, F0Options, NonlinearEigenfunction, ACCEPT, INTERIOR_LIMIT};

/// Similarity exponents u = t^{−α} f(x/t^β) of the unstable equation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnstableExponents {
    pub n: f64,
    pub p: f64,
    #[serde(rename = "N")]
    pub dim: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl UnstableExponents {
    /// Defects of αn + 10β = 1 (time derivative against the tenth-order flux) and
    /// α(p−1) + 2β = 1 (against the diffusive flux).
    pub fn identity_defects(&self) -> [f64; 2] {
        [self.alpha * self.n + 10.0 * self.beta - 1.0, self.alpha * (self.p - 1.0) + 2.0 * self.beta - 1.0]
    }

    /// Both defects within a few ulps of the largest term in each balance.
    pub fn identities_ok(&self) -> bool {
        let [d1, d2] = self.identity_defects();
        let s1 = 1f64.max((self.alpha * self.n).abs());
        let s2 = 1f64.max((self.alpha * (self.p - 1.0)).abs());
        d1.abs() <= 8.0 * f64::EPSILON * s1 && d2.abs() <= 8.0 * f64::EPSILON * s2
    }

    pub fn p_critical(&self) -> f64 {
        p_critical(self.n, self.dim)
    }

    pub fn record(&self) -> ExponentRecord {
        ExponentRecord {
            n: self.n,
            p: self.p,
            dim: self.dim,
            alpha: self.alpha,
            beta: self.beta,
            p0: self.p_critical(),
            identities_ok: self.identities_ok(),
        }
    }
}

/// JSON record `{n, p, N, alpha, beta, p0, identities_ok}`.
#[derive(Clone, Debug, Serialize)]
pub struct ExponentRecord {
    pub n: f64,
    pub p: f64,
    #[serde(rename = "N")]
    pub dim: usize,
    pub alpha: f64,
    pub beta: f64,
    pub p0: f64,
    pub identities_ok: bool,
}

/// α = 4/(5p − (n+5)), β = (1 − nα)/10 in dimension N.
pub fn exponents_unstable(n: f64, p: f64, dim: usize) -> Result<UnstableExponents> {
    if !(n.is_finite() && p.is_finite()) || n < 0.0 || dim == 0 {
        return invalid(format!("need finite n >= 0, p and N >= 1, got n = {n}, p = {p}, N = {dim}"));
    }
    let denom = 5.0 * p - (n + 5.0);
    if denom == 0.0 {
        return Err(Error::SingularExponent { n, p });
    }
    if p <= n + 1.0 {
        return invalid(format!("p = {p} must exceed n + 1 = {}", n + 1.0));
    }
    let alpha = 4.0 / denom;
    Ok(UnstableExponents { n, p, dim, alpha, beta: (1.0 - n * alpha) / 10.0 })
}

/// p₀(n) = n + 1 + 8/N, where α(n, p₀) = N/(10 + Nn).
pub fn p_critical(n: f64, dim: usize) -> f64 {
    n + 1.0 + 8.0 / dim as f64
}

/// Fourier symbol −k¹⁰ + k² of Δ⁵ − Δ in one dimension.
pub fn unstable_symbol(k: f64) -> f64 {
    let k2 = k * k;
    k2 - k2.powi(5)
}

/// (k*, symbol(k*)) with k* = 5^{−1/8}, the most unstable wavenumber.
pub fn unstable_symbol_peak() -> (f64, f64) {
    let k = 0.2f64.powf(0.125);
    (k, unstable_symbol(k))
}

/// One rung of the normalization ladder.
#[derive(Clone, Debug, Serialize)]
pub struct LadderStep {
    pub normalization: f64,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    pub interior_residual: f64,
}

#[derive(Clone, Debug)]
pub struct UnstableProfile {
    pub exponents: UnstableExponents,
    /// The last converged profile, or the best failed attempt when none converged.
    pub profile: NonlinearEigenfunction,
    /// f(0) of `profile`; equals the requested normalization on success.
    pub reached: f64,
    pub ladder: Vec<LadderStep>,
    pub converged: bool,
    pub notes: Vec<String>,
}

/// Size of the diffusive flux relative to the drift at which the ladder starts.
const START_RATIO: f64 = 1e-3;
const MAX_RUNGS: usize = 60;
const MIN_LOG_STEP: f64 = 1e-3;

/// Shooting unknowns of f(r) = c φ(r/L), L = c^{n/10}, from the unknowns of φ;
/// exact for the thin-film equation without regularization.
fn rescale(unknowns: &[f64], n: f64, factor: f64) -> Vec<f64> {
    let length = factor.powf(n / 10.0);
    let mut out: Vec<f64> = unknowns[..4]
        .iter()
        .enumerate()
        .map(|(k, v)| v * factor / length.powi(2 * (k as i32 + 1)))
        .collect();
    out.push(unknowns[4] * length);
    out
}

/// Mass-conserving radial profile of |f|ⁿ(Δ⁴f)′ − (|f|^{p−1}f)′ + βrf = 0 at p = p₀(n).
///
/// The backward-diffusion term breaks the amplitude scaling of the thin-film profile,
/// so f(0) becomes a genuine parameter. The solve starts from the thin-film profile
/// rescaled to a small f(0), where the extra term is negligible, and continues in
/// log f(0) up to `opts.normalization`. When a rung fails the step is halved; the
/// result reports how far the ladder got. An error is returned only when no rung
/// converges at all.
pub fn solve_f0_unstable(n: f64, dim: usize, p: f64, opts: &F0Options) -> Result<UnstableProfile> {
    let exponents = exponents_unstable(n, p, dim)?;
    let p0 = p_critical(n, dim);
    if (p - p0).abs() > 1e-12 * p0 {
        return invalid(format!("the mass-conserving reduction needs p = p0(n) = {p0}, got {p}"));
    }
    if !(n > 0.0) {
        return invalid("the unstable profile needs n > 0");
    }
    let target = opts.normalization;
    if !(target > 0.0) {
        return invalid(format!("normalization {target} must be positive"));
    }
    let thin = solve_f0(n, dim, &F0Options { normalization: 1.0, guess: None, ..opts.clone() })?;
    if !thin.converged {
        return Err(Error::ShootingWindow(format!("thin-film profile at n = {n} did not converge")));
    }
    let thin_unknowns = to_unknowns(
        &[thin.origin_derivatives[0], thin.origin_derivatives[1], thin.origin_derivatives[2], thin.origin_derivatives[3], thin.y0.unwrap_or(0.0)],
        dim,
    );

    // Diffusive flux over drift scales as (p/β) c^{p−1−n/5} for f(0) = c.
    let start = (START_RATIO * exponents.beta / p).powf(1.0 / (p - 1.0 - n / 5.0)).min(target);
    let chain = f0_chain(n, dim, opts, Flux::BackwardDiffusion { p })?;
    let mut ladder = Vec::new();
    let mut notes = Vec::new();
    let mut current: Option<(f64, Vec<f64>, NonlinearEigenfunction)> = None;
    let mut previous: Option<(f64, Vec<f64>)> = None;
    let mut best_failure: Option<NonlinearEigenfunction> = None;
    let mut c = start;
    let mut log_step = ((target / start).ln() / 8.0).max(MIN_LOG_STEP);
    for _ in 0..MAX_RUNGS {
        let guess = match (&current, &previous) {
            (Some((c1, x1, _)), Some((c0, x0))) => {
                let t = (c / c1).ln() / (c1 / c0).ln();
                x1.iter().zip(x0).map(|(a, b)| a + t * (a - b)).collect()
            }
            (Some((c1, x1, _)), None) => rescale(x1, n, c / c1),
            _ => rescale(&thin_unknowns, n, c),
        };
        let spec = f0_spec(chain.clone(), &F0Options { normalization: c, ..opts.clone() })?;
        let attempt = shoot(&spec, &guess).and_then(|out| {
            let mut ef = assemble(&chain, &out, 0, exponents.alpha, c)?;
            // Newton can stall just above its own tolerance at the integration noise
            // floor; the acceptance limits decide.
            ef.converged = ef.residual_norm() <= ACCEPT && ef.interior_residual <= INTERIOR_LIMIT;
            Ok((out.unknowns, ef))
        });
        let ok = match attempt {
            Ok((x, ef)) => {
                ladder.push(LadderStep {
                    normalization: c,
                    converged: ef.converged,
                    iterations: ef.iterations,
                    residual: ef.residual_norm(),
                    interior_residual: ef.interior_residual,
                });
                if ef.converged {
                    previous = current.take().map(|(c1, x1, _)| (c1, x1));
                    current = Some((c, x, ef));
                    true
                } else {
                    if best_failure.as_ref().map_or(true, |b| ef.residual_norm() < b.residual_norm()) {
                        best_failure = Some(ef);
                    }
                    false
                }
            }
            Err(e) => {
                ladder.push(LadderStep {
                    normalization: c,
                    converged: false,
                    iterations: 0,
                    residual: f64::NAN,
                    interior_residual: f64::NAN,
                });
                notes.push(format!("f(0) = {c}: {e}"));
                false
            }
        };
        let Some((c_ok, _, _)) = &current else {
            // Without a first converged rung there is nothing to continue from.
            break;
        };
        let c_ok = *c_ok;
        if c_ok >= target * (1.0 - 1e-14) {
            break;
        }
        if ok {
            log_step *= 1.5;
        } else {
            log_step *= 0.5;
            if log_step < MIN_LOG_STEP {
                notes.push(format!("ladder stalled at f(0) = {c_ok}"));
                break;
            }
        }
        c = (c_ok * log_step.exp()).min(target);
    }
    match current {
        Some((reached, _, profile)) => {
            let converged = reached >= target * (1.0 - 1e-14);
            if !converged {
                notes.push(format!("requested f(0) = {target} not reached; last converged f(0) = {reached}"));
            }
            Ok(UnstableProfile { exponents, profile, reached, ladder, converged, notes })
        }
        None => match best_failure {
            Some(profile) => {
                notes.push(format!("no rung converged, starting from f(0) = {start}"));
                Ok(UnstableProfile { exponents, reached: start, profile, ladder, converged: false, notes })
            }
            None => Err(Error::ShootingWindow(format!("unstable profile: every start failed ({})", notes.join("; ")))),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents_at_zero_exponent() {
        let e = exponents_unstable(0.0, 2.0, 1).unwrap();
        assert!((e.alpha - 0.8).abs() < 1e-15 && (e.beta - 0.1).abs() < 1e-15);
        assert!(e.identities_ok());
    }

    #[test]
    fn critical_exponent_matches_mass_conservation() {
        let e = exponents_unstable(1.0, 10.0, 1).unwrap();
        assert!((e.alpha - 1.0 / 11.0).abs() < 1e-15);
        assert_eq!(p_critical(1.0, 2), 6.0);
        assert_eq!(p_critical(0.0, 1), 9.0);
        assert_eq!(p_critical(0.0, 8), 2.0);
    }

    #[test]
    fn identity_at_sample_point() {
        let e = exponents_unstable(0.3, 3.0, 1).unwrap();
        assert!(e.identity_defects()[0].abs() < 4.0 * f64::EPSILON);
    }

    #[test]
    fn singular_and_inadmissible_exponents() {
        // 5p = n + 5 with p ≤ n + 1 needs n < 0 to be reachable; check it before admissibility.
        assert!(matches!(exponents_unstable(0.0, 1.0, 1), Err(Error::SingularExponent { .. })));
        assert!(matches!(exponents_unstable(1.0, 2.0, 1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn symbol_values() {
        assert_eq!(unstable_symbol(1.0), 0.0);
        assert!((unstable_symbol(0.5) - (0.25 - 0.5f64.powi(10))).abs() < 1e-16);
        let (k, v) = unstable_symbol_peak();
        assert!((10.0 * k.powi(9) - 2.0 * k).abs() < 1e-14);
        assert!(v > unstable_symbol(k * 1.001) && v > unstable_symbol(k * 0.999));
    }

    #[test]
    fn rescaling_is_the_thin_film_symmetry() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = rescale(&rescale(&x, 0.7, 0.3), 0.7, 1.0 / 0.3);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[cfg(test)]
mod solve_tests {
    use super::*;

    #[test]
    fn profile_at_unit_exponent_on_the_line() {
        let u = solve_f0_unstable(1.0, 1, 10.0, &F0Options::default()).unwrap();
        assert!(u.converged, "{:?}", u.notes);
        assert!(u.profile.residual_norm() <= ACCEPT && u.profile.interior_residual <= INTERIOR_LIMIT);
        assert!((u.profile.alpha - 1.0 / 11.0).abs() < 1e-15);
        assert_eq!(u.reached, 1.0);
    }

    #[test]
    fn off_critical_exponent_is_rejected() {
        assert!(solve_f0_unstable(1.0, 1, 9.0, &F0Options::default()).is_err());
    }
}
