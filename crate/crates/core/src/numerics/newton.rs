//! Damped Newton iteration with a central finite-difference Jacobian.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};

#[derive(Clone, Debug)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Relative finite-difference step; the absolute step is `fd_step * max(1, |x_i|)`.
    pub fd_step: f64,
    /// Smallest damping factor tried before the iteration is declared stalled.
    pub min_damping: f64,
    /// Evaluate Jacobian columns on the rayon pool.
    pub parallel: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50,
            fd_step: f64::EPSILON.sqrt(),
            min_damping: 1.0 / 1024.0,
            parallel: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub x: Vec<f64>,
    pub residual: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub damping_history: Vec<f64>,
    pub converged: bool,
}

pub fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Finds x with ‖F(x)‖∞ ≤ tol. A residual evaluation that fails (returns `Err` or a
/// non-finite entry) during a line search is treated as a rejected trial point.
///
/// Hitting the iteration cap or stalling returns a report with `converged == false`;
/// only a singular Jacobian is an error.
pub fn solve_system<F>(f: F, x0: &[f64], opts: &NewtonOptions) -> Result<SolveReport>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    if x0.is_empty() {
        return invalid("solve_system needs at least one unknown");
    }
    let eval = |x: &[f64]| -> Option<Vec<f64>> {
        match f(x) {
            Ok(r) if r.iter().all(|v| v.is_finite()) => Some(r),
            _ => None,
        }
    };
    let mut x = x0.to_vec();
    let mut r = match f(&x) {
        Ok(r) if r.iter().all(|v| v.is_finite()) => r,
        Ok(_) => return invalid("residual is not finite at the initial guess"),
        Err(e) => return Err(e),
    };
    if r.len() != x.len() {
        return invalid(format!("{} residuals for {} unknowns", r.len(), x.len()));
    }
    let mut norm = max_norm(&r);
    let mut damping_history = Vec::new();
    let mut iterations = 0;
    while norm > opts.tol && iterations < opts.max_iter {
        iterations += 1;
        let jac = jacobian(&eval, &x, opts)?;
        let step = match solve_linear(jac, r.iter().map(|v| -v).collect()) {
            Some(s) => s,
            None => return Err(Error::DegenerateRoot { iteration: iterations }),
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda >= opts.min_damping {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(xi, si)| xi + lambda * si).collect();
            if let Some(rt) = eval(&trial) {
                let nt = max_norm(&rt);
                if nt < norm {
                    x = trial;
                    r = rt;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        damping_history.push(if accepted { lambda } else { 0.0 });
        if !accepted {
            break;
        }
    }
    Ok(SolveReport {
        converged: norm <= opts.tol,
        x,
        residual: r,
        residual_norm: norm,
        iterations,
        damping_history,
    })
}

fn jacobian<E>(eval: &E, x: &[f64], opts: &NewtonOptions) -> Result<Vec<Vec<f64>>>
where
    E: Fn(&[f64]) -> Option<Vec<f64>> + Sync,
{
    let column = |j: usize| -> Option<Vec<f64>> {
        let h = opts.fd_step * x[j].abs().max(1.0);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let rp = eval(&xp)?;
        let rm = eval(&xm)?;
        Some(rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
    };
    let cols: Vec<Option<Vec<f64>>> = if opts.parallel {
        (0..x.len()).into_par_iter().map(column).collect()
    } else {
        (0..x.len()).map(column).collect()
    };
    let n = x.len();
    let mut jac = vec![vec![0.0; n]; n];
    for (j, col) in cols.into_iter().enumerate() {
        let col = col.ok_or_else(|| {
            Error::ShootingWindow(format!("residual undefined near x[{j}] while forming the Jacobian"))
        })?;
        for i in 0..n {
            jac[i][j] = col[i];
        }
    }
    Ok(jac)
}

/// Gaussian elimination with partial pivoting; `None` when a pivot is negligible
/// relative to the matrix scale.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap())?;
        if a[p][k].abs() <= 1e-14 * scale {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let m = a[i][k] / a[k][k];
            if m != 0.0 {
                for j in k..n {
                    a[i][j] -= m * a[k][j];
                }
                b[i] -= m * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_scalar() {
        let rep = solve_system(|x| Ok(vec![x[0] - 1.0]), &[0.0], &NewtonOptions::default()).unwrap();
        assert!(rep.converged);
        assert!((rep.x[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circle_and_diagonal() {
        let f = |x: &[f64]| Ok(vec![x[0] * x[0] + x[1] * x[1] - 1.0, x[0] - x[1]]);
        let rep = solve_system(f, &[1.0, 0.0], &NewtonOptions::default()).unwrap();
        assert!(rep.converged);
        let h = 0.5f64.sqrt();
        assert!((rep.x[0] - h).abs() < 1e-10 && (rep.x[1] - h).abs() < 1e-10);
        assert!(rep.residual_norm <= 1e-10);
    }

    #[test]
    fn singular_jacobian_is_reported() {
        let f = |x: &[f64]| Ok(vec![x[0] + x[1] - 1.0, 2.0 * x[0] + 2.0 * x[1] - 3.0]);
        assert!(matches!(
            solve_system(f, &[0.0, 0.0], &NewtonOptions::default()),
            Err(Error::DegenerateRoot { .. })
        ));
    }

    #[test]
    fn iteration_cap_is_not_a_crash() {
        let opts = NewtonOptions { max_iter: 2, ..Default::default() };
        let rep = solve_system(|x| Ok(vec![x[0].atan()]), &[1.3], &opts).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 2);
    }

    #[test]
    fn serial_and_parallel_columns_agree() {
        let f = |x: &[f64]| Ok(vec![x[0].sin() + x[1] * x[1] - 0.3, x[0] * x[1].exp() - 0.2]);
        let a = solve_system(f, &[0.1, 0.1], &NewtonOptions::default()).unwrap();
        let opts = NewtonOptions { parallel: false, ..Default::default() };
        let b = solve_system(f, &[0.1, 0.1], &opts).unwrap();
        assert_eq!(a.x, b.x);
    }
}
