//! Eigenpairs of the rescaled linear operator Δ⁵ + (1/10)y·∇ + (N/10)I:
//! λ_β = −|β|/10, ψ_β = (−1)^{|β|}/√β! D^β F, and their duality with ψ*_β.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::profile::{Domain, RadialProfile};
use crate::spectral::adjoint::{adjoint_polynomial, AdjointPolynomial};
use crate::spectral::kernel::Kernel;

/// β ∈ ℕᴺ.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn new(components: Vec<usize>) -> Self {
        Self(components)
    }

    pub fn scalar(k: usize) -> Self {
        Self(vec![k])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// |β|.
    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    /// β! = Π βᵢ!.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&b| (1..=b).map(|v| v as f64).product::<f64>()).product()
    }

    pub fn sqrt_factorial(&self) -> f64 {
        self.factorial().sqrt()
    }
}

/// λ_k = −k/10.
pub fn eigenvalue_linear(k: usize) -> f64 {
    -(k as f64) / 10.0
}

#[derive(Clone, Debug)]
pub struct LinearEigenpair {
    pub beta: MultiIndex,
    pub lambda: f64,
    pub psi: RadialProfile,
    pub psi_star: AdjointPolynomial,
}

/// ψ_β on the kernel's grid.
///
/// In one dimension ψ_k = (−1)^k/√k! F⁽ᵏ⁾ with derivative columns up to order 9 − k.
/// For N ≥ 2 only β = 0 (F itself) and |β| = 1 are available; for β = eᵢ the
/// profile holds the radial factor −F′(r), the eigenfunction being −F′(r)·yᵢ/r.
pub fn eigenfunction(beta: &MultiIndex, kernel: &Kernel) -> Result<RadialProfile> {
    if beta.dim() != kernel.dim {
        return invalid(format!("multi-index has {} entries, kernel dimension is {}", beta.dim(), kernel.dim));
    }
    let k = beta.order();
    let domain = if kernel.dim == 1 && kernel.grid.first() < 0.0 { Domain::Line } else { Domain::Radial };
    if kernel.dim > 1 && k > 1 {
        return Err(Error::Unsupported(format!("eigenfunction with |β| = {k} in dimension {}", kernel.dim)));
    }
    if k >= kernel.derivatives.len() {
        return Err(Error::Unsupported(format!("|β| = {k} beyond the derivative table")));
    }
    let scale = if k % 2 == 0 { 1.0 } else { -1.0 } / beta.sqrt_factorial();
    let columns: Vec<Vec<f64>> =
        kernel.derivatives[k..].iter().map(|c| c.iter().map(|v| scale * v).collect()).collect();
    RadialProfile::new(kernel.dim, domain, kernel.grid.clone(), columns)
}

pub fn linear_eigenpair(beta: &MultiIndex, kernel: &Kernel) -> Result<LinearEigenpair> {
    Ok(LinearEigenpair {
        beta: beta.clone(),
        lambda: eigenvalue_linear(beta.order()),
        psi: eigenfunction(beta, kernel)?,
        psi_star: adjoint_polynomial(beta, kernel.dim)?,
    })
}

/// Largest admissible contribution of the neglected tails.
pub const TAIL_LIMIT: f64 = 1e-8;

/// Matrix with entry (j, k) = ⟨ψ_k, ψ*_j⟩ = ∫ ψ_k ψ*_j dy over a symmetric 1D kernel grid.
pub fn biorthogonality_matrix(kmax: usize, kernel: &Kernel) -> Result<Vec<Vec<f64>>> {
    if kernel.dim != 1 || kernel.grid.first() >= 0.0 {
        return invalid("biorthogonality needs a one-dimensional kernel on a symmetric grid");
    }
    if kmax > 8 {
        return Err(Error::Unsupported(format!("kmax = {kmax} > 8")));
    }
    let pts = kernel.grid.points();
    let psis: Vec<RadialProfile> =
        (0..=kmax).map(|k| eigenfunction(&MultiIndex::scalar(k), kernel)).collect::<Result<_>>()?;
    let stars: Vec<_> = (0..=kmax)
        .map(|j| adjoint_polynomial(&MultiIndex::scalar(j), 1).and_then(|p| p.to_poly()))
        .collect::<Result<_>>()?;
    // Tail beyond the grid, bounded by the envelope of the integrand times the decay length.
    let ends = [0, pts.len() - 1];
    let mut tail = 0.0f64;
    for psi in &psis {
        for star in &stars {
            for &i in &ends {
                let y = pts[i];
                let length = 1.0 / (kernel.decay * (10.0 / 9.0) * y.abs().powf(1.0 / 9.0));
                tail = tail.max((psi.values()[i] * star.eval(y)).abs() * length);
            }
        }
    }
    if tail > TAIL_LIMIT {
        return Err(Error::InsufficientDomain { tail, limit: TAIL_LIMIT });
    }
    Ok(stars
        .iter()
        .map(|star| {
            let weights: Vec<f64> = pts.iter().map(|y| star.eval(*y)).collect();
            psis.iter()
                .map(|psi| {
                    let prod: Vec<f64> = psi.values().iter().zip(&weights).map(|(a, b)| a * b).collect();
                    kernel.grid.integrate(&prod)
                })
                .collect()
        })
        .collect())
}

/// max |M − I|.
pub fn identity_defect(m: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for (j, row) in m.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((v - target).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues() {
        assert_eq!(eigenvalue_linear(0), 0.0);
        assert_eq!(eigenvalue_linear(2), -0.2);
        assert_eq!(eigenvalue_linear(7), -0.7);
    }

    #[test]
    fn multi_index_weights() {
        let b = MultiIndex::new(vec![2, 3]);
        assert_eq!(b.order(), 5);
        assert_eq!(b.factorial(), 12.0);
    }
}
