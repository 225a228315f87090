//! Envelope of the oscillatory tail, |F| ≈ D |y|^{−4N/9} e^{−d|y|^{10/9}}.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::kernel::{decay_constant, Kernel};

/// Minimum number of envelope maxima for a fit.
pub const MIN_EXTREMA: usize = 5;

/// Maxima closer to the origin than this are not yet in the asymptotic regime.
pub const FIT_START: f64 = 10.0;

/// Smallest |f| relative to max |f| that is trusted as resolved.
pub const RESOLVED_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    pub d_fit: f64,
    pub d_formula: f64,
    /// Fitted D in D|y|^{−4N/9}e^{−d|y|^{10/9}}.
    pub prefactor: f64,
    /// Maxima used by the fit.
    pub extrema: usize,
    /// Maxima of |f| on [0, 15].
    pub extrema_near: usize,
    pub fit_range: (f64, f64),
    /// Coefficient of determination for each trial exponent p.
    pub exponent_r2: Vec<(f64, f64)>,
    pub preferred_exponent: f64,
}

impl DecayFit {
    pub fn relative_error(&self) -> f64 {
        (self.d_fit - self.d_formula).abs() / self.d_formula
    }
}

/// Local maxima of |f| on y ≥ 0 (including a peak at y = 0), refined by a parabola through ln|f| at three samples.
pub fn envelope_maxima(y: &[f64], f: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if y.len() > 1 && y[0] == 0.0 && f[0].abs() > f[1].abs() {
        out.push((0.0, f[0].abs()));
    }
    for i in 1..y.len().saturating_sub(1) {
        if y[i - 1] < 0.0 {
            continue;
        }
        let (a, b, c) = (f[i - 1].abs(), f[i].abs(), f[i + 1].abs());
        if !(b > a && b >= c) || a == 0.0 || c == 0.0 {
            continue;
        }
        let (la, lb, lc) = (a.ln(), b.ln(), c.ln());
        let (h0, h1) = (y[i] - y[i - 1], y[i + 1] - y[i]);
        // Parabola through (−h0, la), (0, lb), (h1, lc).
        let s0 = (lb - la) / h0;
        let s1 = (lc - lb) / h1;
        let curv = (s1 - s0) / (0.5 * (h0 + h1));
        let (dy, peak) = if curv < 0.0 {
            let slope = s0 + 0.5 * curv * h0;
            let dy = (-slope / curv).clamp(-h0, h1);
            (dy, lb + slope * dy + 0.5 * curv * dy * dy)
        } else {
            (0.0, lb)
        };
        out.push((y[i] + dy, peak.exp()));
    }
    out
}

/// Least-squares line v = a + b x; returns (a, b, R²).
pub fn linear_fit(x: &[f64], v: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let mv = v.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxv: f64 = x.iter().zip(v).map(|(a, b)| (a - mx) * (b - mv)).sum();
    let svv: f64 = v.iter().map(|b| (b - mv) * (b - mv)).sum();
    let b = sxv / sxx;
    let a = mv - b * mx;
    let ss_res: f64 = x.iter().zip(v).map(|(xi, vi)| (vi - a - b * xi).powi(2)).sum();
    (a, b, 1.0 - ss_res / svv)
}

/// Fits the envelope of sampled f on y ≥ 0 in dimension `dim`.
pub fn fit_decay(y: &[f64], f: &[f64], dim: usize) -> Result<DecayFit> {
    let peak = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let maxima = envelope_maxima(y, f);
    let extrema_near = maxima.iter().filter(|(yy, _)| *yy <= 15.0).count();
    let used: Vec<(f64, f64)> =
        maxima.into_iter().filter(|(yy, a)| *yy >= FIT_START && *a >= RESOLVED_FLOOR * peak).collect();
    if used.len() < MIN_EXTREMA {
        return Err(Error::InsufficientTail { found: used.len(), needed: MIN_EXTREMA });
    }
    let amp = 4.0 * dim as f64 / 9.0;
    let v: Vec<f64> = used.iter().map(|(yy, a)| a.ln() + amp * yy.ln()).collect();
    let mut exponent_r2 = Vec::new();
    let mut best = (f64::NEG_INFINITY, 0.0);
    for p in [1.0, 10.0 / 9.0, 1.25] {
        let x: Vec<f64> = used.iter().map(|(yy, _)| yy.powf(p)).collect();
        let (_, _, r2) = linear_fit(&x, &v);
        exponent_r2.push((p, r2));
        if r2 > best.0 {
            best = (r2, p);
        }
    }
    let x: Vec<f64> = used.iter().map(|(yy, _)| yy.powf(10.0 / 9.0)).collect();
    let (a, b, _) = linear_fit(&x, &v);
    Ok(DecayFit {
        d_fit: -b,
        d_formula: decay_constant(),
        prefactor: a.exp(),
        extrema: used.len(),
        extrema_near,
        fit_range: (used[0].0, used[used.len() - 1].0),
        exponent_r2,
        preferred_exponent: best.1,
    })
}

/// Decay constant of the kernel's envelope, fitted and from the root formula.
pub fn decay_rate(kernel: &Kernel) -> Result<DecayFit> {
    fit_decay(kernel.grid.points(), kernel.values(), kernel.dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_envelope_is_recovered() {
        let d = 0.2;
        let y: Vec<f64> = (0..40000).map(|i| i as f64 * 0.005).collect();
        let f: Vec<f64> = y
            .iter()
            .map(|v: &f64| 3.0 * (v + 1e-9).powf(-4.0 / 9.0) * (-d * v.powf(10.0 / 9.0)).exp() * (2.0 * v).cos())
            .collect();
        let fit = fit_decay(&y, &f, 1).unwrap();
        assert!((fit.d_fit - d).abs() < 1e-3 * d, "{}", fit.d_fit);
        assert_eq!(fit.preferred_exponent, 10.0 / 9.0);
    }

    #[test]
    fn monotone_data_has_no_tail() {
        let y: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let f: Vec<f64> = y.iter().map(|v| (-v).exp()).collect();
        assert!(matches!(fit_decay(&y, &f, 1), Err(Error::InsufficientTail { .. })));
    }
}
