//! f_k at n = 0 in one dimension: the k-th derivative of the kernel, which solves
//! f⁽¹⁰⁾ + (1/10) y f′ + α_k f = 0 with α_k = (k+1)/10.

use crate::error::{invalid, Error, Result};
use crate::numerics::Grid;
use crate::profile::{Domain, RadialProfile};
use crate::similarity::{alpha_k_linear, asymptotic_bundle, NonlinearEigenfunction};
use crate::spectral::decay::fit_decay;
use crate::spectral::kernel::LineKernel;

/// Largest relative residual of the tenth-order equation.
pub const LINEAR_RESIDUAL_LIMIT: f64 = 1e-5;

/// Largest relative mismatch between the fitted tail decay and the bundle.
const TAIL_TOLERANCE: f64 = 0.05;

/// f_k on `grid`, normalized by f_k(0) = 1 (k even) or f_k′(0) = 1 (k odd).
///
/// The relative residual is max|f⁽¹⁰⁾ + y f′/10 + α_k f| over the largest term.
/// When the grid reaches far enough for an envelope fit, the fitted decay constant is
/// compared with the slowest bundle mode; it does not depend on k.
pub fn solve_fk_linear(k: usize, dim: usize, grid: &Grid) -> Result<NonlinearEigenfunction> {
    if k > 9 {
        return Err(Error::Unsupported(format!("k = {k} beyond the derivative table")));
    }
    if dim != 1 {
        return Err(Error::Unsupported(format!("linear eigenfunctions in dimension {dim}")));
    }
    let domain = if grid.first() < 0.0 { Domain::Line } else { Domain::Radial };
    if domain == Domain::Radial && k % 2 == 1 {
        return invalid("odd f_k needs a grid covering both signs of y");
    }
    let kernel = LineKernel::default();
    let at_origin = kernel.derivatives(0.0, k + 1);
    let norm = if k % 2 == 0 { at_origin[k] } else { at_origin[k + 1] };
    let alpha = alpha_k_linear(k, 1);
    let mut columns = vec![Vec::with_capacity(grid.len()); 10];
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for &y in grid.points() {
        let d = kernel.derivatives(y, k + 10);
        let terms = [d[k + 10], 0.1 * y * d[k + 1], alpha * d[k]];
        worst = worst.max(terms.iter().sum::<f64>().abs());
        scale = scale.max(terms.iter().fold(0.0f64, |m, t| m.max(t.abs())));
        for (j, c) in columns.iter_mut().enumerate() {
            c.push(d[k + j] / norm);
        }
    }
    let residual = if scale > 0.0 { worst / scale } else { f64::NAN };
    let profile = RadialProfile::new(1, domain, grid.clone(), columns)?;
    let bundle = asymptotic_bundle(0.1)?;
    let (y, f): (Vec<f64>, Vec<f64>) = grid
        .points()
        .iter()
        .zip(profile.values())
        .filter(|(y, _)| **y >= 0.0)
        .map(|(y, f)| (*y, *f))
        .unzip();
    let tail_decay = fit_decay(&y, &f, 1).ok().map(|fit| fit.d_fit);
    let tail_ok = tail_decay.map_or(true, |d| (d - bundle.slowest_decay).abs() <= TAIL_TOLERANCE * bundle.slowest_decay);
    let mut warnings = Vec::new();
    if !tail_ok {
        warnings.push(format!("tail decay {:?} differs from {} by more than 5%", tail_decay, bundle.slowest_decay));
    }
    Ok(NonlinearEigenfunction {
        k,
        n: 0.0,
        dim: 1,
        alpha,
        profile,
        y0: None,
        normalization: 1.0,
        origin_derivatives: Vec::new(),
        residuals: Vec::new(),
        interior_residual: residual,
        converged: residual <= LINEAR_RESIDUAL_LIMIT && tail_ok,
        iterations: 0,
        delta: 0.0,
        tail_decay,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_and_parity() {
        let grid = Grid::uniform(-12.0, 12.0, 241).unwrap();
        let f0 = solve_fk_linear(0, 1, &grid).unwrap();
        let f1 = solve_fk_linear(1, 1, &grid).unwrap();
        let mid = 120;
        assert!((f0.profile.values()[mid] - 1.0).abs() < 1e-13);
        assert!(f1.profile.values()[mid].abs() < 1e-14);
        assert!((f1.profile.column(1).unwrap()[mid] - 1.0).abs() < 1e-13);
        for i in 0..grid.len() {
            let j = grid.len() - 1 - i;
            assert!((f1.profile.values()[i] + f1.profile.values()[j]).abs() < 1e-12);
        }
        assert!(f0.converged && f1.converged);
    }

    #[test]
    fn rejects_high_order() {
        let grid = Grid::uniform(0.0, 1.0, 3).unwrap();
        assert!(matches!(solve_fk_linear(10, 1, &grid), Err(Error::Unsupported(_))));
    }
}
