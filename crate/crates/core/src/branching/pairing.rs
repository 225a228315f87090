//! Pairings of the planar eigenfunctions ψ̂_β = (−1)^{|β|} D^βF/√β! with their
//! adjoints ψ*_β = y^β/√β!, by quadrature in polar coordinates.

use std::f64::consts::PI;

use serde::Serialize;

use crate::branching::radial::{cartesian, sign_changes, Factors, RadialField};
use crate::error::{invalid, Error, Result};
use crate::numerics::{pairwise_sum, QuadratureRule};

/// Basis of the eigenspace with |β| = k in two dimensions, β listed as (k,0), (k−1,1), ….
#[derive(Clone, Debug, Serialize)]
pub struct PlanarBasis {
    pub level: usize,
    /// β as a list of coordinate indices, e.g. (1,1) ↦ [0, 1].
    pub indices: Vec<Vec<usize>>,
    /// 1/√β!.
    pub weights: Vec<f64>,
}

impl PlanarBasis {
    pub fn new(level: usize) -> Result<Self> {
        if !(1..=2).contains(&level) {
            return Err(Error::Unsupported(format!("planar eigenspace |β| = {level}")));
        }
        let mut indices = Vec::new();
        let mut weights = Vec::new();
        for second in 0..=level {
            let first = level - second;
            let mut idx = vec![0; first];
            idx.extend(std::iter::repeat_n(1, second));
            let fact: f64 = (1..=first).chain(1..=second).map(|v| v as f64).product();
            indices.push(idx);
            weights.push(1.0 / fact.sqrt());
        }
        Ok(Self { level, indices, weights })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    fn sign(&self) -> f64 {
        if self.level % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// ψ̂_j(y).
    pub(crate) fn eigenfunction(&self, j: usize, f: &Factors, y: [f64; 2]) -> f64 {
        self.sign() * self.weights[j] * cartesian(f, &self.indices[j], y)
    }

    /// y·∇ψ̂_j(y).
    pub(crate) fn dilation(&self, j: usize, f: &Factors, y: [f64; 2]) -> f64 {
        let mut idx = self.indices[j].clone();
        idx.push(0);
        let mut out = y[0] * cartesian(f, &idx, y);
        *idx.last_mut().unwrap() = 1;
        out += y[1] * cartesian(f, &idx, y);
        self.sign() * self.weights[j] * out
    }

    /// ∇Δ⁴ψ̂_j(y), from the factors of Δ⁴F.
    pub(crate) fn flux_gradient(&self, j: usize, h: &Factors, y: [f64; 2]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (k, o) in out.iter_mut().enumerate() {
            let mut idx = self.indices[j].clone();
            idx.push(k);
            *o = self.sign() * self.weights[j] * cartesian(h, &idx, y);
        }
        out
    }

    /// ψ*_i(y).
    pub(crate) fn adjoint(&self, i: usize, y: [f64; 2]) -> f64 {
        self.weights[i] * self.indices[i].iter().map(|a| y[*a]).product::<f64>()
    }

    /// ∇ψ*_i(y).
    pub(crate) fn adjoint_gradient(&self, i: usize, y: [f64; 2]) -> [f64; 2] {
        let idx = &self.indices[i];
        let mut out = [0.0; 2];
        for skip in 0..idx.len() {
            let rest: f64 = idx.iter().enumerate().filter(|(m, _)| *m != skip).map(|(_, a)| y[*a]).product();
            out[idx[skip]] += rest;
        }
        out.map(|v| v * self.weights[i])
    }
}

/// ⟨ψ*_i, y·∇ψ̂_j⟩ and ⟨ψ*_i, ψ̂_j⟩ for one planar eigenspace.
#[derive(Clone, Debug, Serialize)]
pub struct LinearPairings {
    pub level: usize,
    pub dilation: Vec<Vec<f64>>,
    pub biorthogonality: Vec<Vec<f64>>,
    pub refinement_delta: f64,
}

impl LinearPairings {
    /// max |⟨ψ*_i, y·∇ψ̂_j⟩ + (N + |β|)δᵢⱼ|, the integration-by-parts identity.
    pub fn identity_defect(&self) -> f64 {
        let expect = -(2.0 + self.level as f64);
        let mut worst = 0.0f64;
        for (i, row) in self.dilation.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { expect } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }
}

/// Largest change of a smooth pairing under refinement.
pub const LINEAR_REFINEMENT_LIMIT: f64 = 1e-8;

fn linear_pass(field: &RadialField, basis: &PlanarBasis, refine: bool) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let radius = field.radius();
    let mut radial = QuadratureRule::uniform(0.0, radius, (2.0 * radius).ceil() as usize, 16)?;
    let mut angular = QuadratureRule::uniform(0.0, 2.0 * PI, 8, 16)?;
    if refine {
        radial = radial.refined();
        angular = angular.refined();
    }
    let dirs: Vec<(f64, [f64; 2])> = angular.nodes().into_iter().map(|(t, w)| (w, [t.cos(), t.sin()])).collect();
    let m = basis.len();
    let mut dil = vec![vec![Vec::new(); m]; m];
    let mut bio = vec![vec![Vec::new(); m]; m];
    for (r, wr) in radial.nodes() {
        let (f, _) = field.factors(r);
        for (wt, e) in &dirs {
            let y = [r * e[0], r * e[1]];
            let w = wr * wt * r;
            for i in 0..m {
                let star = basis.adjoint(i, y);
                for j in 0..m {
                    dil[i][j].push(w * star * basis.dilation(j, &f, y));
                    bio[i][j].push(w * star * basis.eigenfunction(j, &f, y));
                }
            }
        }
    }
    let sum = |v: Vec<Vec<Vec<f64>>>| v.into_iter().map(|row| row.iter().map(|t| pairwise_sum(t)).collect()).collect();
    Ok((sum(dil), sum(bio)))
}

/// The pairing matrices of the |β| = `basis.level` eigenspace in two dimensions.
pub fn linear_pairings(field: &RadialField, basis: &PlanarBasis) -> Result<LinearPairings> {
    if field.dim() != 2 {
        return invalid("planar pairings need the two-dimensional kernel");
    }
    let (d0, _) = linear_pass(field, basis, false)?;
    let (d1, b1) = linear_pass(field, basis, true)?;
    let delta = d0.iter().flatten().zip(d1.iter().flatten()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if delta > LINEAR_REFINEMENT_LIMIT {
        return Err(Error::QuadratureNotConverged { delta });
    }
    Ok(LinearPairings { level: basis.level, dilation: d1, biorthogonality: b1, refinement_delta: delta })
}

/// Grading of the per-ray log engine.
#[derive(Clone, Debug)]
pub struct RayQuadrature {
    /// Geometric levels into every zero of the combination.
    pub levels: usize,
    pub order: usize,
    /// Angular panels before grading.
    pub angular_panels: usize,
    /// Radial mesh on which sign changes are bracketed.
    pub bracket_step: f64,
}

impl Default for RayQuadrature {
    fn default() -> Self {
        Self { levels: 14, order: 8, angular_panels: 16, bracket_step: 0.05 }
    }
}

/// Log pairings L_i(c) = Σ_j c_j⟨ψ*_i, ∇·(ln|Ψ|∇Δ⁴ψ̂_j)⟩ = −∫ ln|Ψ| ∇ψ*_i·∇Δ⁴Ψ with
/// Ψ = Σ c_j ψ̂_j, evaluated ray by ray.
///
/// On every ray the zeros of Ψ are bracketed on a mesh and bisected; the radial panels
/// are graded geometrically into each of them. `singular_angles` lists directions on
/// which Ψ vanishes identically; the angular panels are graded into those.
pub fn log_pairings_by_rays(
    field: &RadialField,
    basis: &PlanarBasis,
    c: &[f64],
    singular_angles: &[f64],
    q: &RayQuadrature,
) -> Result<Vec<f64>> {
    if c.len() != basis.len() {
        return invalid(format!("{} coefficients for a basis of {}", c.len(), basis.len()));
    }
    let radius = field.radius();
    let m = basis.len();
    let angular = QuadratureRule::graded(0.0, 2.0 * PI, singular_angles, q.angular_panels, q.levels, q.order)?;
    let mesh_n = (radius / q.bracket_step).ceil() as usize;
    let mesh: Vec<(f64, Factors)> = (0..=mesh_n)
        .map(|k| {
            let r = radius * k as f64 / mesh_n as f64;
            (r, field.factors(r).0)
        })
        .collect();
    let combo = |f: &Factors, y: [f64; 2]| (0..m).map(|j| c[j] * basis.eigenfunction(j, f, y)).sum::<f64>();
    let mut terms = vec![Vec::new(); m];
    for (theta, wt) in angular.nodes() {
        let e = [theta.cos(), theta.sin()];
        let along = |r: f64| combo(&field.factors(r).0, [r * e[0], r * e[1]]);
        let mut zeros = Vec::new();
        for w in mesh.windows(2) {
            let (r0, r1) = (w[0].0, w[1].0);
            let v0 = combo(&w[0].1, [r0 * e[0], r0 * e[1]]);
            let v1 = combo(&w[1].1, [r1 * e[0], r1 * e[1]]);
            if v0 * v1 < 0.0 {
                zeros.extend(sign_changes(along, r0, r1, r1 - r0));
            }
        }
        zeros.push(0.0);
        let radial = QuadratureRule::graded(0.0, radius, &zeros, (2.0 * radius).ceil() as usize, q.levels, q.order)?;
        for (r, wr) in radial.nodes() {
            let (f, h) = field.factors(r);
            let y = [r * e[0], r * e[1]];
            let psi = combo(&f, y);
            let mut flux = [0.0; 2];
            for (j, cj) in c.iter().enumerate() {
                let g = basis.flux_gradient(j, &h, y);
                flux[0] += cj * g[0];
                flux[1] += cj * g[1];
            }
            let w = -wt * wr * r * psi.abs().ln();
            for (i, t) in terms.iter_mut().enumerate() {
                let gs = basis.adjoint_gradient(i, y);
                let v = w * (gs[0] * flux[0] + gs[1] * flux[1]);
                if !v.is_finite() {
                    return Err(Error::NonFiniteIntegrand { node: r, value: v });
                }
                t.push(v);
            }
        }
    }
    Ok(terms.iter().map(|t| pairwise_sum(t)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_weights_and_adjoint_gradients() {
        let b = PlanarBasis::new(2).unwrap();
        assert_eq!(b.indices, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert!((b.weights[0] - 0.5f64.sqrt()).abs() < 1e-15 && b.weights[1] == 1.0);
        let y = [0.3, -0.7];
        let g = b.adjoint_gradient(0, y);
        assert!((g[0] - 2.0 * 0.3 * b.weights[0]).abs() < 1e-15 && g[1] == 0.0);
        let g = b.adjoint_gradient(1, y);
        assert_eq!(g, [-0.7, 0.3]);
    }
}
