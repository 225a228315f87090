//! Tabulated kernel jets with the radial factors needed to differentiate F and
//! Δ⁴F in Cartesian coordinates.

use crate::error::{invalid, Result};
use crate::spectral::kernel::{RadialJet, RadialKernel, RadialTable};

/// Below this radius the factors come from the Taylor series, where the jet-based
/// formulas cancel.
const TAYLOR_RADIUS: f64 = 1.0;
const TAYLOR_TERMS: usize = 40;

/// (f, g₁, g₂, g₃) with g_m = (r⁻¹ d/dr)^m f, so that
/// ∂ᵢf = g₁yᵢ, ∂ᵢ∂ⱼf = g₁δᵢⱼ + g₂yᵢyⱼ and so on.
pub type Factors = [f64; 4];

#[derive(Clone, Debug)]
pub struct RadialField {
    dim: usize,
    radius: f64,
    table: RadialTable,
    kernel_taylor: Vec<f64>,
    bilaplacian4_taylor: Vec<f64>,
}

impl RadialField {
    pub const DEFAULT_RADIUS: f64 = 140.0;
    pub const DEFAULT_STEP: f64 = 0.02;

    pub fn new(dim: usize) -> Result<Self> {
        Self::with_resolution(dim, Self::DEFAULT_RADIUS, Self::DEFAULT_STEP)
    }

    /// Kernel data on [0, radius]; integrals are truncated there.
    pub fn with_resolution(dim: usize, radius: f64, step: f64) -> Result<Self> {
        if !(radius > 2.0 && step > 0.0 && step < 0.5) {
            return invalid(format!("radial field needs radius > 2 and 0 < step < 0.5, got {radius}, {step}"));
        }
        let kernel = RadialKernel::new(dim)?;
        let table = RadialTable::build(&kernel, radius + 4.0 * step, step)?;
        let a = kernel.taylor_coefficients(TAYLOR_TERMS + 4);
        let nm2 = dim as f64 - 2.0;
        let b = (0..TAYLOR_TERMS)
            .map(|i| {
                let gain: f64 = (1..=4).map(|l| 2.0 * (i + l) as f64 * (2.0 * (i + l) as f64 + nm2)).product();
                a[i + 4] * gain
            })
            .collect();
        Ok(Self { dim, radius, table, kernel_taylor: a[..TAYLOR_TERMS].to_vec(), bilaplacian4_taylor: b })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn jet(&self, r: f64) -> RadialJet {
        self.table.jet(r)
    }

    /// Factors of F and of Δ⁴F at radius r.
    pub fn factors(&self, r: f64) -> (Factors, Factors) {
        if r < TAYLOR_RADIUS {
            return (taylor_factors(&self.kernel_taylor, r), taylor_factors(&self.bilaplacian4_taylor, r));
        }
        let jet = self.table.jet(r);
        let n = self.dim;
        let f = [jet.lap[0], jet.dlap[0], jet.second(0, r, n), jet.third(0, r, n)];
        let h = [jet.lap[4], jet.dlap[4], jet.second(4, r, n), jet.third(4, r, n)];
        (jet_factors(f, r), jet_factors(h, r))
    }

    /// Zeros of F (`derivative` 0) or of F′ (`derivative` 1) on (0, radius).
    pub fn zeros(&self, derivative: usize) -> Vec<f64> {
        let value = |r: f64| {
            let j = self.table.jet(r);
            if derivative == 0 {
                j.lap[0]
            } else {
                j.dlap[0]
            }
        };
        sign_changes(value, 0.05, self.radius, 0.05)
    }
}

fn taylor_factors(a: &[f64], r: f64) -> Factors {
    let r2 = r * r;
    let mut out = [0.0; 4];
    for (m, o) in out.iter_mut().enumerate() {
        let mut pow = 1.0;
        let mut sum = 0.0;
        for (i, c) in a.iter().enumerate().skip(m) {
            let falling: f64 = ((i - m + 1)..=i).map(|v| 2.0 * v as f64).product();
            sum += c * falling * pow;
            pow *= r2;
        }
        *o = sum;
    }
    out
}

/// Factors from f, f′, f″, f‴ at r > 0.
fn jet_factors(d: [f64; 4], r: f64) -> Factors {
    let g1 = d[1] / r;
    let g2 = (d[2] - g1) / (r * r);
    let g3 = (d[3] - 3.0 * d[2] / r + 3.0 * d[1] / (r * r)) / (r * r * r);
    [d[0], g1, g2, g3]
}

/// Roots of a continuous function on [a, b], bracketed on a mesh of width `step` and
/// bisected to rounding.
pub(crate) fn sign_changes<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, step: f64) -> Vec<f64> {
    let n = ((b - a) / step).ceil() as usize;
    let h = (b - a) / n as f64;
    let mut out = Vec::new();
    let mut x0 = a;
    let mut f0 = f(a);
    for i in 1..=n {
        let x1 = a + i as f64 * h;
        let f1 = f(x1);
        if f0 == 0.0 {
            out.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut lo, mut hi, mut flo) = (x0, x1, f0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm * flo < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

/// Cartesian derivative D^idx f of a radial function at y ∈ ℝ² (|idx| ≤ 3).
pub(crate) fn cartesian(g: &Factors, idx: &[usize], y: [f64; 2]) -> f64 {
    let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    match *idx {
        [] => g[0],
        [a] => g[1] * y[a],
        [a, b] => g[1] * d(a, b) + g[2] * y[a] * y[b],
        [a, b, k] => g[2] * (d(a, b) * y[k] + d(a, k) * y[b] + d(b, k) * y[a]) + g[3] * y[a] * y[b] * y[k],
        _ => unreachable!("derivatives up to third order"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_agree_across_the_switch() {
        let field = RadialField::with_resolution(2, 10.0, 0.02).unwrap();
        let (f_lo, h_lo) = (taylor_factors(&field.kernel_taylor, 1.0), taylor_factors(&field.bilaplacian4_taylor, 1.0));
        let jet = RadialKernel::new(2).unwrap().jet(1.0);
        let f_hi = jet_factors([jet.lap[0], jet.dlap[0], jet.second(0, 1.0, 2), jet.third(0, 1.0, 2)], 1.0);
        let h_hi = jet_factors([jet.lap[4], jet.dlap[4], jet.second(4, 1.0, 2), jet.third(4, 1.0, 2)], 1.0);
        for m in 0..4 {
            assert!((f_lo[m] - f_hi[m]).abs() < 1e-10, "F factor {m}: {} {}", f_lo[m], f_hi[m]);
            assert!((h_lo[m] - h_hi[m]).abs() < 1e-8 * h_lo[m].abs().max(1.0), "H factor {m}: {} {}", h_lo[m], h_hi[m]);
        }
    }

    #[test]
    fn table_matches_direct_jets() {
        let field = RadialField::with_resolution(1, 30.0, 0.02).unwrap();
        let kernel = RadialKernel::new(1).unwrap();
        for r in [1.37, 7.011, 23.456] {
            let a = field.jet(r);
            let b = kernel.jet(r);
            for j in 0..6 {
                assert!((a.lap[j] - b.lap[j]).abs() < 1e-9, "level {j} at {r}");
            }
        }
    }

    #[test]
    fn cartesian_second_derivatives_of_r_squared() {
        // f = r²: g₁ = 2, g₂ = 0.
        let g = [0.0, 2.0, 0.0, 0.0];
        assert_eq!(cartesian(&g, &[0, 0], [0.3, 0.4]), 2.0);
        assert_eq!(cartesian(&g, &[0, 1], [0.3, 0.4]), 0.0);
    }
}
