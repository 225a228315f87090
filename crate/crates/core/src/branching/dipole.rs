//! The |β| = 1 eigenspace in two dimensions: ψ̂ᵢ = −∂ᵢF, ψ̂ᵢ* = yᵢ.
//!
//! With Ψ = c₁ψ̂₁ + c₂ψ̂₂ = −F′(r)(c·e_θ) the logarithm splits as
//! ln|Ψ| = ln|F′(r)| + ln|c·e_θ| and ∂ᵢΔ⁴Ψ = −[c_i g₁ + r² eᵢ(c·e) g₂] with gₘ the
//! factors of Δ⁴F. Every log pairing is therefore a sum of radial integrals, graded
//! into the zeros of F′, times angular integrals, graded into the zeros of c·e.

use std::f64::consts::PI;

use serde::Serialize;

use crate::branching::counts::{quadratic_branch_count, QuadraticBranchProblem, QuadraticCount};
use crate::branching::pairing::{linear_pairings, LinearPairings, PlanarBasis};
use crate::branching::radial::RadialField;
use crate::branching::REFINEMENT_LIMIT;
use crate::error::{invalid, Error, Result};
use crate::numerics::newton::solve_linear;
use crate::numerics::QuadratureRule;
use crate::similarity::alpha_k_linear;

const ORDER: usize = 16;
const LEVELS: usize = 24;

/// The four pairings ⟨ψ̂ᵢ*, y·∇ψ̂ⱼ⟩ and the nondegeneracy value P₁₁ − P₁₂.
#[derive(Clone, Debug, Serialize)]
pub struct DipoleCoefficients {
    pub pairings: LinearPairings,
    pub nondegeneracy: f64,
    /// α₁ = (N+1)/10.
    pub alpha: f64,
}

impl DipoleCoefficients {
    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.pairings.dilation[i][j]
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.nondegeneracy.abs() > 1e-6
    }
}

pub fn dipole_coefficients(field: &RadialField) -> Result<DipoleCoefficients> {
    let pairings = linear_pairings(field, &PlanarBasis::new(1)?)?;
    let nondegeneracy = pairings.dilation[0][0] - pairings.dilation[0][1];
    Ok(DipoleCoefficients { pairings, nondegeneracy, alpha: alpha_k_linear(1, 2) })
}

/// Radial parts of the dipole log pairings.
#[derive(Clone, Debug, Serialize)]
pub struct DipoleLogPairings {
    /// ∫ ln|F′| g₁ r dr.
    pub i1: f64,
    /// ∫ ln|F′| g₂ r³ dr.
    pub i2: f64,
    /// ∫ g₁ r dr = −Δ⁴F(0).
    pub j1: f64,
    /// ∫ g₂ r³ dr = 2Δ⁴F(0).
    pub j2: f64,
    pub refinement_delta: f64,
}

fn radial_pass(field: &RadialField, zeros: &[f64], levels: usize, refine: bool) -> Result<[f64; 4]> {
    let radius = field.radius();
    let mut singular = vec![0.0];
    singular.extend_from_slice(zeros);
    let mut rule = QuadratureRule::graded(0.0, radius, &singular, (2.0 * radius).ceil() as usize, levels, ORDER)?;
    if refine {
        rule = rule.refined();
    }
    let nodes = rule.nodes();
    let mut terms = vec![Vec::new(); 4];
    for (r, w) in nodes {
        let (f, h) = field.factors(r);
        let log = (f[1] * r).abs().ln();
        let (a, b) = (w * h[1] * r, w * h[2] * r * r * r);
        let vals = [log * a, log * b, a, b];
        for (t, v) in terms.iter_mut().zip(vals) {
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand { node: r, value: v });
            }
            t.push(v);
        }
    }
    let s: Vec<f64> = terms.iter().map(|t| crate::numerics::pairwise_sum(t)).collect();
    Ok([s[0], s[1], s[2], s[3]])
}

impl DipoleLogPairings {
    pub fn new(field: &RadialField) -> Result<Self> {
        if field.dim() != 2 {
            return invalid("dipole pairings need the two-dimensional kernel");
        }
        let zeros = field.zeros(1);
        let coarse = radial_pass(field, &zeros, LEVELS, false)?;
        let fine = radial_pass(field, &zeros, LEVELS + 8, true)?;
        let delta = coarse.iter().zip(&fine).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if delta > REFINEMENT_LIMIT {
            return Err(Error::QuadratureNotConverged { delta });
        }
        Ok(Self { i1: fine[0], i2: fine[1], j1: fine[2], j2: fine[3], refinement_delta: delta })
    }

    /// (∫ln|c·e|dθ, ∫ln|c·e| e₁(c·e)dθ, ∫ln|c·e| e₂(c·e)dθ) over a period.
    ///
    /// The integration runs in t = θ − arg c, so the panels graded into the zeros
    /// t = ±π/2 do not move with c and the result is smooth in c.
    fn angular(c: [f64; 2], levels: usize, refine: bool) -> Result<[f64; 3]> {
        let phi = c[1].atan2(c[0]);
        let size = c[0].hypot(c[1]);
        let half = 0.5 * PI;
        let mut rule = QuadratureRule::graded(-half, 3.0 * half, &[-half, half, 3.0 * half], 8, levels, ORDER)?;
        if refine {
            rule = rule.refined();
        }
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            *o = rule.integrate(|t| {
                let ce = size * t.cos();
                let base = ce.abs().ln();
                match k {
                    0 => base,
                    1 => base * (t + phi).cos() * ce,
                    _ => base * (t + phi).sin() * ce,
                }
            })?;
        }
        Ok(out)
    }

    /// L_i(c) = −∫ ln|Ψ| ∂ᵢΔ⁴Ψ, i.e. Σⱼ cⱼ⟨ψ̂ᵢ*, ∇·(ln|Ψ|∇Δ⁴ψ̂ⱼ)⟩.
    pub fn evaluate(&self, c: [f64; 2]) -> Result<[f64; 2]> {
        Ok(self.evaluate_with_delta(c)?.0)
    }

    /// L(c) together with its change under angular refinement.
    pub fn evaluate_with_delta(&self, c: [f64; 2]) -> Result<([f64; 2], f64)> {
        if c[0] == 0.0 && c[1] == 0.0 {
            return invalid("dipole combination with c = 0");
        }
        let coarse = Self::angular(c, LEVELS, false)?;
        let fine = Self::angular(c, LEVELS + 8, true)?;
        let delta = coarse.iter().zip(&fine).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let common = 2.0 * PI * self.i1 + PI * self.i2 + self.j1 * fine[0];
        Ok(([c[0] * common + self.j2 * fine[1], c[1] * common + self.j2 * fine[2]], delta))
    }
}

/// Residuals of the reduced dipole system at (c₁, μ₁,₁), with c₂ = 1 − c₁.
pub fn dipole_residual(coeffs: &DipoleCoefficients, logs: &DipoleLogPairings, c1: f64, mu: f64) -> Result<[f64; 2]> {
    let c = [c1, 1.0 - c1];
    let l = logs.evaluate(c)?;
    let k = coeffs.alpha / 10.0;
    let mut out = [0.0; 2];
    for i in 0..2 {
        let linear = (0..2).map(|j| coeffs.p(i, j) * c[j]).sum::<f64>();
        out[i] = l[i] - k * linear + c[i] * mu;
    }
    Ok(out)
}

/// Expansion coefficients of a branch: Σ c_β = 1 and α_k(n) = α_k + μ₁,ₖ n + o(n).
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionCoefficients {
    pub k: usize,
    pub mu1: f64,
    pub c: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeedOutcome {
    pub seed: f64,
    pub c1: f64,
    pub mu: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DipoleSolution {
    pub coefficients: ExpansionCoefficients,
    pub residual: f64,
    pub seeds: Vec<SeedOutcome>,
    /// Singular values of the Jacobian in (c₁, μ₁,₁) at the returned solution.
    pub jacobian_singular_values: [f64; 2],
    /// Converged seeds that kept distinct c₁: the solutions form a family.
    pub family: bool,
    pub notes: Vec<String>,
}

/// Residual limit of an accepted dipole solution.
pub const DIPOLE_ACCEPT: f64 = 1e-6;
const SEEDS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

fn jacobian(coeffs: &DipoleCoefficients, logs: &DipoleLogPairings, x: [f64; 2]) -> Result<[[f64; 2]; 2]> {
    let mut jac = [[0.0; 2]; 2];
    for k in 0..2 {
        let h = 1e-6 * x[k].abs().max(1e-2);
        let (mut xp, mut xm) = (x, x);
        xp[k] += h;
        xm[k] -= h;
        let rp = dipole_residual(coeffs, logs, xp[0], xp[1])?;
        let rm = dipole_residual(coeffs, logs, xm[0], xm[1])?;
        for i in 0..2 {
            jac[i][k] = (rp[i] - rm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

fn singular_values(j: [[f64; 2]; 2]) -> [f64; 2] {
    let (a, b, c, d) = (j[0][0], j[0][1], j[1][0], j[1][1]);
    let s1 = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    let root = (s1 * s1 - 4.0 * det * det).max(0.0).sqrt();
    let big = (0.5 * (s1 + root)).sqrt();
    let small = if big > 0.0 { det.abs() / big } else { 0.0 };
    [big, small]
}

fn norm(r: [f64; 2]) -> f64 {
    r[0].abs().max(r[1].abs())
}

/// Damped least-squares Newton (Levenberg–Marquardt) from one seed.
fn solve_from(coeffs: &DipoleCoefficients, logs: &DipoleLogPairings, seed: f64) -> Result<SeedOutcome> {
    let mut x = [seed, 0.0];
    let mut r = dipole_residual(coeffs, logs, x[0], x[1])?;
    let mut lambda = 1e-3;
    let mut iterations = 0;
    while norm(r) > 1e-12 && iterations < 60 {
        iterations += 1;
        let j = jacobian(coeffs, logs, x)?;
        let mut accepted = false;
        while lambda < 1e12 {
            let mut jtj = vec![vec![0.0; 2]; 2];
            let mut g = vec![0.0; 2];
            for a in 0..2 {
                for b in 0..2 {
                    jtj[a][b] = (0..2).map(|i| j[i][a] * j[i][b]).sum();
                }
                jtj[a][a] += lambda;
                g[a] = -(0..2).map(|i| j[i][a] * r[i]).sum::<f64>();
            }
            let Some(step) = solve_linear(jtj, g) else { break };
            let trial = [x[0] + step[0], x[1] + step[1]];
            if trial[0] > 0.0 && trial[0] < 1.0 {
                if let Ok(rt) = dipole_residual(coeffs, logs, trial[0], trial[1]) {
                    if norm(rt) < norm(r) {
                        x = trial;
                        r = rt;
                        lambda = (lambda / 3.0).max(1e-15);
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    Ok(SeedOutcome { seed, c1: x[0], mu: x[1], residual: norm(r), iterations, converged: norm(r) <= DIPOLE_ACCEPT })
}

/// Solves the reduced dipole system from five seeds of c₁.
///
/// The symmetric seed c₁ = 1/2 is returned when it converges, otherwise the converged
/// seed with the smallest residual. No converged seed is an error carrying every
/// seed's final residual.
pub fn dipole_solve(coeffs: &DipoleCoefficients, logs: &DipoleLogPairings) -> Result<DipoleSolution> {
    if !coeffs.is_nondegenerate() {
        return invalid(format!("nondegeneracy value {} vanishes", coeffs.nondegeneracy));
    }
    let seeds: Vec<SeedOutcome> = SEEDS.iter().map(|s| solve_from(coeffs, logs, *s)).collect::<Result<_>>()?;
    let best = seeds
        .iter()
        .filter(|s| s.converged)
        .min_by(|a, b| {
            let key = |s: &SeedOutcome| ((s.seed - 0.5).abs() > 1e-12, s.residual);
            key(a).partial_cmp(&key(b)).unwrap()
        })
        .cloned();
    let Some(best) = best else {
        let summary: Vec<String> = seeds.iter().map(|s| format!("c1 = {}: residual {:e}", s.seed, s.residual)).collect();
        return Err(Error::ShootingWindow(format!("dipole system unsolved from every seed ({})", summary.join(", "))));
    };
    let sv = singular_values(jacobian(coeffs, logs, [best.c1, best.mu])?);
    let converged: Vec<&SeedOutcome> = seeds.iter().filter(|s| s.converged).collect();
    let spread_c = converged.iter().map(|s| s.c1).fold(f64::NEG_INFINITY, f64::max)
        - converged.iter().map(|s| s.c1).fold(f64::INFINITY, f64::min);
    let spread_mu = converged.iter().map(|s| s.mu).fold(f64::NEG_INFINITY, f64::max)
        - converged.iter().map(|s| s.mu).fold(f64::INFINITY, f64::min);
    let family = converged.len() > 1 && spread_c > 1e-3;
    let mut notes = Vec::new();
    if sv[1] <= 1e-6 * sv[0] {
        notes.push(format!("jacobian rank 1 at the solution (singular values {:e}, {:e})", sv[0], sv[1]));
    }
    if family {
        notes.push(format!(
            "converged c1 spans {spread_c:.3} while mu varies by {spread_mu:e}: rotating the dipole is a symmetry, so c1 is not determined"
        ));
    }
    Ok(DipoleSolution {
        coefficients: ExpansionCoefficients { k: 1, mu1: best.mu, c: vec![best.c1, 1.0 - best.c1] },
        residual: best.residual,
        seeds,
        jacobian_singular_values: sv,
        family,
        notes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaSample {
    pub c2: f64,
    /// c₂L₁ − c₁L₂, the log part of c₂R₁ − c₁R₂.
    pub galerkin: f64,
    /// ∫∇ψ̂₂*·ln Ψ∇Δ⁴Ψ + c₂∫(∇ψ̂₁* + ∇ψ̂₂*)·ln Ψ∇Δ⁴Ψ as printed.
    pub printed: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadraticAssembly {
    /// From c₂R₁ − c₁R₂ with c₁ = 1 − c₂, the source of truth.
    pub galerkin: QuadraticBranchProblem,
    /// A, B, C of the printed definitions.
    pub printed: [f64; 3],
    pub count: QuadraticCount,
    pub omega: Vec<OmegaSample>,
    pub omega_norm_printed: f64,
    pub notes: Vec<String>,
}

/// Magnitude below which an assembled coefficient is treated as zero.
pub const COEFFICIENT_ZERO: f64 = 1e-6;

/// A, B, C of the dipole quadratic and the sampled perturbation ω(c₂) on 21 points.
pub fn assemble_quadratic_coefficients(coeffs: &DipoleCoefficients, logs: &DipoleLogPairings) -> Result<QuadraticAssembly> {
    let k = coeffs.alpha / 10.0;
    let p = |i: usize, j: usize| coeffs.p(i, j);
    let raw = [
        -k * (p(0, 1) - p(0, 0) + p(1, 1) - p(1, 0)),
        -k * (p(0, 0) - p(1, 1) + 2.0 * p(1, 0)),
        k * p(1, 0),
    ];
    let printed = [raw[0], -raw[1], -raw[2]];
    let snap = |v: f64| if v.abs() <= COEFFICIENT_ZERO { 0.0 } else { v };
    let mut omega = Vec::with_capacity(21);
    for s in 0..=20 {
        let c2 = s as f64 / 20.0;
        let c1 = 1.0 - c2;
        let l = logs.evaluate([c1, c2])?;
        omega.push(OmegaSample { c2, galerkin: c2 * l[0] - c1 * l[1], printed: -l[1] - c2 * (l[0] + l[1]) });
    }
    let omega_norm = omega.iter().fold(0.0f64, |m, s| m.max(s.galerkin.abs()));
    let omega_norm_printed = omega.iter().fold(0.0f64, |m, s| m.max(s.printed.abs()));
    let galerkin = QuadraticBranchProblem { a: snap(raw[0]), b: snap(raw[1]), c: snap(raw[2]), omega_norm };
    let count = quadratic_branch_count(&galerkin);
    let mut notes = vec![format!("unsnapped Galerkin coefficients {:?}", raw)];
    if (printed[1] - raw[1]).abs() > COEFFICIENT_ZERO || (printed[2] - raw[2]).abs() > COEFFICIENT_ZERO {
        notes.push("printed B and C carry the opposite sign of the Galerkin form".into());
    }
    if count.count.is_none() {
        notes.push("A = B = C = 0: the reduced equation is ω(c₂) = 0 alone".into());
    }
    Ok(QuadraticAssembly { galerkin, printed, count, omega, omega_norm_printed, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angular_integrals_have_closed_forms() {
        for c in [[0.5f64, 0.5], [1.0, 0.0], [-0.3, 1.2]] {
            let size = c[0].hypot(c[1]);
            let a = DipoleLogPairings::angular(c, LEVELS, false).unwrap();
            assert!((a[0] - 2.0 * PI * (size / 2.0).ln()).abs() < 1e-9, "{c:?}: {}", a[0] - 2.0 * PI * (size / 2.0).ln());
            let k = PI * size.ln() + 0.5 * PI * (1.0 - 2.0 * 2f64.ln());
            assert!((a[1] - c[0] * k).abs() < 1e-9 && (a[2] - c[1] * k).abs() < 1e-9, "{c:?}");
        }
    }
}
