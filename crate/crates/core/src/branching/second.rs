//! The |β| = 2 eigenspace in two dimensions: three eigenfunctions, two conics in
//! (c₂, c₃) after eliminating μ₁,₂ and c₁ = 1 − c₂ − c₃.

use serde::Serialize;

use crate::branching::counts::{conic_branch_count, ConicBranchCount};
use crate::branching::pairing::{linear_pairings, log_pairings_by_rays, LinearPairings, PlanarBasis, RayQuadrature};
use crate::branching::radial::RadialField;
use crate::error::Result;
use crate::numerics::Conic;
use crate::similarity::alpha_k_linear;

/// An affine function k₀ + k₁c₂ + k₂c₃.
type Affine = [f64; 3];

fn product(p: Affine, q: Affine) -> Conic {
    Conic::new(
        p[1] * q[1],
        p[2] * q[2],
        p[0] * q[1] + p[1] * q[0],
        p[0] * q[2] + p[2] * q[0],
        p[1] * q[2] + p[2] * q[1],
        p[0] * q[0],
    )
}

fn difference(p: &Conic, q: &Conic) -> Conic {
    let (a, b) = (p.coeffs(), q.coeffs());
    Conic::new(a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3], a[4] - b[4], a[5] - b[5])
}

/// cᵢ as affine functions of (c₂, c₃).
const COEFFICIENTS: [Affine; 3] = [[1.0, -1.0, -1.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Quadratic parts of c_j R₁ − c₁ R_j for j = 2, 3, where R_i = Σ_j M_ij c_j + log terms + c_i μ.
pub fn galerkin_conics(m: &[Vec<f64>]) -> [Conic; 2] {
    let mc: Vec<Affine> = (0..3)
        .map(|i| {
            let mut out = [0.0; 3];
            for (j, basis) in COEFFICIENTS.iter().enumerate() {
                for t in 0..3 {
                    out[t] += m[i][j] * basis[t];
                }
            }
            out
        })
        .collect();
    [1, 2].map(|j| difference(&product(COEFFICIENTS[j], mc[0]), &product(COEFFICIENTS[0], mc[j])))
}

/// A₁…E₂ as printed, reading P_ij = ⟨ψ̂ᵢ*, y·∇ψ̂ⱼ⟩ and the unstarred ψ̂₁ in C₁, D₁ as ψ̂₁*.
pub fn printed_conics(p: &[Vec<f64>], alpha: f64) -> [Conic; 2] {
    let k = alpha / 10.0;
    let q = |i: usize, j: usize| p[i - 1][j - 1];
    let first = Conic::new(
        -k * ((q(1, 1) - q(1, 2)) + (q(2, 1) - q(2, 2)) - (q(3, 1) - q(3, 2))),
        k * ((q(1, 1) - q(1, 3)) - (q(2, 1) - q(2, 3)) + (q(3, 1) - q(3, 3))),
        k * ((2.0 * q(2, 1) - q(2, 2)) - (2.0 * q(3, 1) - q(3, 2)) + q(1, 1)),
        k * ((2.0 * q(2, 1) - q(2, 3)) - (2.0 * q(3, 1) - q(3, 3)) - q(1, 1)),
        k * ((q(1, 3) - q(1, 2)) - (2.0 * q(2, 1) - q(2, 2) - q(2, 3)) + (2.0 * q(3, 1) - q(3, 2) - q(3, 3))),
        0.0,
    );
    let second = Conic::new(
        -k * (q(3, 1) - q(3, 2)),
        k * (q(2, 1) - q(2, 3)),
        k * q(3, 1),
        -k * q(2, 1),
        k * ((q(2, 1) - q(2, 2)) - (q(3, 1) - q(3, 3))),
        0.0,
    );
    [first, second]
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaPoint {
    pub c2: f64,
    pub c3: f64,
    pub values: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct SecondLevelReport {
    pub level: usize,
    pub alpha: f64,
    pub pairings: LinearPairings,
    pub galerkin: [Conic; 2],
    pub printed: [Conic; 2],
    /// max |printed − Galerkin| over the coefficients, per conic.
    pub discrepancy: [f64; 2],
    pub count: ConicBranchCount,
    pub printed_count: ConicBranchCount,
    pub omega: Vec<OmegaPoint>,
    pub omega_norms: [f64; 2],
    /// Change of the log pairings at the simplex centre when the grading is deepened.
    pub log_refinement_delta: f64,
    pub notes: Vec<String>,
}

/// Pairings, conics, counts and the sampled log perturbation for |β| = 2, N = 2.
///
/// `simplex_step` sets the (c₂, c₃) sampling mesh of ω; zero skips the sampling.
pub fn second_level_analysis(field: &RadialField, quad: &RayQuadrature, simplex_step: f64) -> Result<SecondLevelReport> {
    let basis = PlanarBasis::new(2)?;
    let pairings = linear_pairings(field, &basis)?;
    let alpha = alpha_k_linear(2, 2);
    let k = alpha / 10.0;
    let m: Vec<Vec<f64>> = pairings.dilation.iter().map(|row| row.iter().map(|v| -k * v).collect()).collect();
    let galerkin = galerkin_conics(&m);
    let printed = printed_conics(&pairings.dilation, alpha);
    let discrepancy = [0, 1].map(|i| {
        galerkin[i].coeffs().iter().zip(printed[i].coeffs()).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()))
    });
    let logs = |c: [f64; 3], q: &RayQuadrature| log_pairings_by_rays(field, &basis, &c, &[], q);
    let centre = [1.0 / 3.0; 3];
    let base = logs(centre, quad)?;
    let deeper = logs(centre, &RayQuadrature { levels: quad.levels + 6, ..quad.clone() })?;
    let log_refinement_delta = base.iter().zip(&deeper).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    let mut omega = Vec::new();
    if simplex_step > 0.0 {
        let steps = (1.0 / simplex_step).round() as usize;
        for a in 0..=steps {
            for b in 0..=steps - a {
                let (c2, c3) = (a as f64 / steps as f64, b as f64 / steps as f64);
                let c = [1.0 - c2 - c3, c2, c3];
                let l = logs(c, quad)?;
                omega.push(OmegaPoint { c2, c3, values: [c[1] * l[0] - c[0] * l[1], c[2] * l[0] - c[0] * l[2]] });
            }
        }
    }
    let omega_norms = [0, 1].map(|i| omega.iter().fold(0.0f64, |acc, p| acc.max(p.values[i].abs())));
    let snap = |q: &Conic| {
        let c = q.coeffs().map(|v| if v.abs() <= 1e-6 { 0.0 } else { v });
        Conic::new(c[0], c[1], c[2], c[3], c[4], c[5])
    };
    let count = conic_branch_count(&snap(&galerkin[0]), &snap(&galerkin[1]), omega_norms);
    let printed_count = conic_branch_count(&snap(&printed[0]), &snap(&printed[1]), omega_norms);
    let mut notes = Vec::new();
    if discrepancy.iter().any(|d| *d > 1e-6) {
        notes.push(format!("printed coefficients differ from the Galerkin ones by {:?}", discrepancy));
    }
    if count.count.is_none() {
        notes.push("Galerkin conics are degenerate: the exchange and rotation symmetries of the kernel cancel every quadratic coefficient".into());
    }
    Ok(SecondLevelReport {
        level: 2,
        alpha,
        pairings,
        galerkin,
        printed,
        discrepancy,
        count,
        printed_count,
        omega,
        omega_norms,
        log_refinement_delta,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_pairings_give_vanishing_conics() {
        let m = vec![vec![0.16, 0.0, 0.0], vec![0.0, 0.16, 0.0], vec![0.0, 0.0, 0.16]];
        for q in galerkin_conics(&m) {
            assert!(q.scale() < 1e-15);
        }
    }

    #[test]
    fn galerkin_conic_matches_direct_evaluation() {
        let m = vec![vec![0.3, -0.1, 0.2], vec![0.05, 0.4, -0.2], vec![0.1, 0.0, -0.3]];
        let q = galerkin_conics(&m);
        let (x, y) = (0.2, 0.45);
        let c = [1.0 - x - y, x, y];
        let mc: Vec<f64> = (0..3).map(|i| (0..3).map(|j| m[i][j] * c[j]).sum()).collect();
        assert!((q[0].eval(x, y) - (c[1] * mc[0] - c[0] * mc[1])).abs() < 1e-15);
        assert!((q[1].eval(x, y) - (c[2] * mc[0] - c[0] * mc[2])).abs() < 1e-15);
    }
}
