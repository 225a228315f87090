//! Radial once-integrated thin-film equations written as a Laplacian chain.
//!
//! State: (g₀, g₀′, g₁, g₁′, g₂, g₂′, g₃, g₃′, g₄) with g_k = Δ^k f, so that
//! g_k″ = g_{k+1} − (N−1)/r · g_k′ and the last component carries the flux law.
//! In one dimension the chain is exactly (f, f′, …, f⁽⁸⁾).

use crate::numerics::fd::fornberg_weights;
use crate::odeshoot::integrator::{IvpResult, OdeSystem};

pub const CHAIN_DIM: usize = 9;

/// (f² + δ²)^{n/2}; exactly 1 when n = 0.
pub fn regularized_mobility(f: f64, n: f64, delta: f64) -> f64 {
    if n == 0.0 {
        return 1.0;
    }
    (f * f + delta * delta).powf(0.5 * n)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Flux {
    /// |f|ⁿ (Δ⁴f)′ + β r f = 0.
    Thin,
    /// |f|ⁿ (Δ⁴f)′ − (|f|^{p−1} f)′ + β r f = 0.
    BackwardDiffusion { p: f64 },
}

/// Radial ninth-order system for the mass-conserving similarity profile.
#[derive(Clone, Debug)]
pub struct RadialChain {
    pub n: f64,
    pub beta: f64,
    pub delta: f64,
    pub dim: usize,
    pub flux: Flux,
}

impl RadialChain {
    pub fn mobility(&self, f: f64) -> f64 {
        regularized_mobility(f, self.n, self.delta)
    }

    /// (Δ⁴f)′ from the integrated flux law.
    pub fn flux_derivative(&self, r: f64, f: f64, df: f64) -> f64 {
        let drift = self.beta * r * f;
        match self.flux {
            Flux::Thin => -drift / self.mobility(f),
            Flux::BackwardDiffusion { p } => (p * f.abs().powf(p - 1.0) * df - drift) / self.mobility(f),
        }
    }

    fn flux_without_drift(&self, f: f64, df: f64, dg4: f64) -> f64 {
        let diffusive = match self.flux {
            Flux::Thin => 0.0,
            Flux::BackwardDiffusion { p } => p * f.abs().powf(p - 1.0) * df,
        };
        self.mobility(f) * dg4 - diffusive
    }
}

impl OdeSystem for RadialChain {
    fn dim(&self) -> usize {
        CHAIN_DIM
    }

    fn rhs(&self, r: f64, z: &[f64], dz: &mut [f64]) {
        let nm1 = self.dim as f64 - 1.0;
        for k in 0..4 {
            dz[2 * k] = z[2 * k + 1];
            dz[2 * k + 1] = if r == 0.0 {
                z[2 * k + 2] / self.dim as f64
            } else {
                z[2 * k + 2] - nm1 / r * z[2 * k + 1]
            };
        }
        dz[8] = self.flux_derivative(r, z[0], z[1]);
    }

    fn describe(&self) -> String {
        match self.flux {
            Flux::Thin => format!(
                "|f|^n (Δ⁴f)' + β r f = 0 (n={}, β={}, δ={:e}, N={})",
                self.n, self.beta, self.delta, self.dim
            ),
            Flux::BackwardDiffusion { p } => format!(
                "|f|^n (Δ⁴f)' − (|f|^(p−1) f)' + β r f = 0 (n={}, p={p}, β={}, δ={:e}, N={})",
                self.n, self.beta, self.delta, self.dim
            ),
        }
    }

    /// Residual of the unreduced tenth-order equation
    /// r^{1−N}(r^{N−1} Q)′ + β r f′ + Nβ f = 0, Q = mobility·(Δ⁴f)′ − diffusive flux.
    /// Both (Δ⁴f)′ and Q′ come from 7-point finite differences on the marked output
    /// points (all steps when there are none), so the check uses the integrated Δ⁴f
    /// and not the flux law it was built from. Points near a zero of f or with
    /// |f| ≤ 10δ are skipped.
    fn interior_residual(&self, traj: &IvpResult) -> Option<f64> {
        let idx: Vec<usize> = if traj.marks.len() >= 8 { traj.marks.clone() } else { (0..traj.ys.len()).collect() };
        let n = idx.len();
        if n < 8 {
            return None;
        }
        let ys: Vec<f64> = idx.iter().map(|&i| traj.ys[i]).collect();
        let states: Vec<&[f64]> = idx.iter().map(|&i| traj.states[i].as_slice()).collect();
        let end = traj.end();
        let nn = self.dim as f64;
        let stencil = |i: usize, values: &dyn Fn(usize) -> f64| -> f64 {
            let lo = i.saturating_sub(3).min(n - 7);
            let nodes: Vec<f64> = (lo..lo + 7).map(|j| ys[j]).collect();
            let w = fornberg_weights(ys[i], &nodes, 1);
            (lo..lo + 7).zip(&w).map(|(j, c)| c * values(j)).sum()
        };
        let g4 = |j: usize| states[j][8];
        let q: Vec<f64> = (0..n)
            .map(|i| {
                let z = states[i];
                ys[i].powi(self.dim as i32 - 1) * self.flux_without_drift(z[0], z[1], stencil(i, &g4))
            })
            .collect();
        let scale = (0..n)
            .map(|i| {
                let z = states[i];
                (self.beta * ys[i] * z[1]).abs() + (nn * self.beta * z[0]).abs()
            })
            .fold(0.0f64, f64::max);
        if scale == 0.0 {
            return None;
        }
        // |f|ⁿ behaves like |y − y*|ⁿ near a zero y* of f, and the error of the
        // nested stencils decays like n (h/|y − y*|)⁶ away from it; skip twice their width.
        let crosses_zero = |i: usize| {
            let lo = i.saturating_sub(12);
            let hi = (i + 12).min(n - 1);
            (lo..hi).any(|j| states[j][0].signum() != states[j + 1][0].signum())
        };
        let mut worst = 0.0f64;
        for i in 0..n {
            let r = ys[i];
            let z = states[i];
            if r < 1e-2 * end || z[0].abs() <= 10.0 * self.delta || crosses_zero(i) {
                continue;
            }
            let dq = stencil(i, &|j| q[j]);
            let res = dq / r.powi(self.dim as i32 - 1) + self.beta * r * z[1] + nn * self.beta * z[0];
            worst = worst.max(res.abs() / scale);
        }
        Some(worst)
    }
}

/// Πᵢ₌₁ᵏ 2i(2i + N − 2): the factor with Δ^k r^{2k} = K_k.
pub fn laplacian_factor(k: usize, dim: usize) -> f64 {
    (1..=k).map(|i| (2 * i) as f64 * (2 * i + dim - 2) as f64).product()
}

/// f⁽²ᵏ⁾(0) ↔ Δ^k f(0) for radial f: Δ^k f(0) = K_k f⁽²ᵏ⁾(0)/(2k)!.
pub fn laplacian_at_origin(k: usize, dim: usize, even_derivative: f64) -> f64 {
    let fact: f64 = (1..=2 * k).map(|v| v as f64).product();
    laplacian_factor(k, dim) * even_derivative / fact
}

pub fn even_derivative_at_origin(k: usize, dim: usize, laplacian: f64) -> f64 {
    let fact: f64 = (1..=2 * k).map(|v| v as f64).product();
    laplacian * fact / laplacian_factor(k, dim)
}

/// Radial derivatives f, f′, …, f⁽⁹⁾ from a chain state at r > 0, given g₄′.
///
/// Each derivative is a Laurent polynomial in r whose coefficients are chain
/// components; the expressions are generated by differentiating symbolically.
/// In one dimension they collapse to the state itself.
pub fn chain_to_derivatives(state: &[f64], dg4: f64, r: f64, dim: usize) -> [f64; 10] {
    let nm1 = dim as f64 - 1.0;
    let mut out = [0.0; 10];
    // Terms (coefficient, power p of r^{-p}, component); component 9 stands for g₄′.
    let mut expr: Vec<(f64, i32, usize)> = vec![(1.0, 0, 0)];
    let value = |expr: &[(f64, i32, usize)]| -> f64 {
        expr.iter()
            .map(|&(c, p, m)| {
                let v = if m == 9 { dg4 } else { state[m] };
                c * v * r.powi(-p)
            })
            .sum()
    };
    out[0] = value(&expr);
    for slot in out.iter_mut().skip(1) {
        let mut next: Vec<(f64, i32, usize)> = Vec::new();
        for &(c, p, m) in &expr {
            if p != 0 {
                next.push((-(p as f64) * c, p + 1, m));
            }
            match m {
                9 => unreachable!("g4'' is not needed below the tenth derivative"),
                8 => next.push((c, p, 9)),
                m if m % 2 == 0 => next.push((c, p, m + 1)),
                m => {
                    next.push((c, p, m + 1));
                    if nm1 != 0.0 {
                        next.push((-nm1 * c, p + 1, m));
                    }
                }
            }
        }
        next.sort_by(|a, b| (a.1, a.2).cmp(&(b.1, b.2)));
        let mut merged: Vec<(f64, i32, usize)> = Vec::with_capacity(next.len());
        for t in next {
            match merged.last_mut() {
                Some(last) if last.1 == t.1 && last.2 == t.2 => last.0 += t.0,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.0 != 0.0);
        expr = merged;
        *slot = value(&expr);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mobility_definition() {
        assert!((regularized_mobility(1.0, 1.3, 1e-10) - 1.0).abs() < 1e-15);
        assert_eq!(regularized_mobility(0.0, 1.0, 1e-10), 1e-10);
        assert_eq!(regularized_mobility(-3.0, 0.0, 1e-10), 1.0);
    }

    #[test]
    fn laplacian_factor_in_one_dimension_is_factorial() {
        assert_eq!(laplacian_factor(4, 1), 40320.0);
        assert!((laplacian_at_origin(2, 1, 0.7) - 0.7).abs() < 1e-15);
        assert!((even_derivative_at_origin(3, 2, laplacian_at_origin(3, 2, -1.3)) + 1.3).abs() < 1e-14);
    }

    #[test]
    fn derivatives_of_a_radial_polynomial() {
        // f = r⁶ in two dimensions: Δf = 36 r⁴, Δ²f = 576 r², Δ³f = 2304, Δ⁴f = 0.
        let r: f64 = 1.7;
        let state = [
            r.powi(6),
            6.0 * r.powi(5),
            36.0 * r.powi(4),
            144.0 * r.powi(3),
            576.0 * r * r,
            1152.0 * r,
            2304.0,
            0.0,
            0.0,
        ];
        let d = chain_to_derivatives(&state, 0.0, r, 2);
        let expect = [r.powi(6), 6.0 * r.powi(5), 30.0 * r.powi(4), 120.0 * r.powi(3), 360.0 * r * r, 720.0 * r, 720.0, 0.0, 0.0, 0.0];
        for (a, b) in d.iter().zip(expect) {
            assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }
}
