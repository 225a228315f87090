//! Dormand–Prince 5(4) with per-step mixed error control and cubic Hermite
//! dense output.

use serde::Serialize;

use crate::error::{invalid, Result};

/// First-order system z′ = F(y, z).
pub trait OdeSystem: Sync {
    fn dim(&self) -> usize;
    fn rhs(&self, y: f64, z: &[f64], dz: &mut [f64]);

    /// Short human-readable description of the model equation.
    fn describe(&self) -> String {
        "custom".into()
    }

    /// Relative residual of the governing (unreduced) equation along a converged
    /// trajectory, when the system knows one.
    fn interior_residual(&self, _traj: &IvpResult) -> Option<f64> {
        None
    }
}

/// Closure-backed system.
pub struct FnSystem<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(f64, &[f64], &mut [f64]) + Sync> FnSystem<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(f64, &[f64], &mut [f64]) + Sync> OdeSystem for FnSystem<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn rhs(&self, y: f64, z: &[f64], dz: &mut [f64]) {
        (self.f)(y, z, dz)
    }
}

/// The system on s ∈ [0, 1] after substituting y = L·s.
pub struct Rescaled<'a, S: ?Sized> {
    pub inner: &'a S,
    pub length: f64,
}

impl<S: OdeSystem + ?Sized> OdeSystem for Rescaled<'_, S> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn rhs(&self, s: f64, z: &[f64], dz: &mut [f64]) {
        self.inner.rhs(s * self.length, z, dz);
        for v in dz.iter_mut() {
            *v *= self.length;
        }
    }
}

#[derive(Clone, Debug)]
pub struct IvpOptions {
    pub rtol: f64,
    pub atol: f64,
    pub min_step: f64,
    pub blowup: f64,
    pub max_steps: usize,
    /// Largest step as a fraction of the integration span.
    pub max_step_fraction: f64,
}

impl Default for IvpOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-10, min_step: 1e-14, blowup: 1e12, max_steps: 200_000, max_step_fraction: 0.05 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Reached,
    BlowUp,
    StepUnderflow,
    MaxSteps,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub max_error_ratio: f64,
}

/// Accepted step points with states and derivatives, plus how the run ended.
#[derive(Clone, Debug)]
pub struct IvpResult {
    pub ys: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub derivs: Vec<Vec<f64>>,
    pub termination: Termination,
    pub stats: StepStats,
    /// Indices into `ys` of the requested output points, starting with the initial point.
    pub marks: Vec<usize>,
}

impl IvpResult {
    pub fn last_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has the initial point")
    }

    pub fn end(&self) -> f64 {
        *self.ys.last().unwrap()
    }

    /// (y, state) at the marked output points.
    pub fn marked(&self) -> impl Iterator<Item = (f64, &[f64])> + '_ {
        self.marks.iter().map(|&i| (self.ys[i], self.states[i].as_slice()))
    }

    /// Cubic Hermite interpolation between stored steps; clamps outside the span.
    pub fn eval(&self, y: f64) -> Vec<f64> {
        let n = self.ys.len();
        if y <= self.ys[0] || n == 1 {
            return self.states[0].clone();
        }
        if y >= self.ys[n - 1] {
            return self.states[n - 1].clone();
        }
        let i = self.ys.partition_point(|v| *v <= y) - 1;
        let h = self.ys[i + 1] - self.ys[i];
        let t = (y - self.ys[i]) / h;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        (0..self.states[i].len())
            .map(|k| {
                h00 * self.states[i][k]
                    + h10 * h * self.derivs[i][k]
                    + h01 * self.states[i + 1][k]
                    + h11 * h * self.derivs[i + 1][k]
            })
            .collect()
    }

    /// Maps a trajectory on s ∈ [0, 1] back to y = L·s.
    pub fn unscaled(mut self, length: f64) -> Self {
        for y in self.ys.iter_mut() {
            *y *= length;
        }
        for d in self.derivs.iter_mut() {
            for v in d.iter_mut() {
                *v /= length;
            }
        }
        self
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates from `y0` to `y_end > y0`.
pub fn integrate<S: OdeSystem + ?Sized>(
    sys: &S,
    y0: f64,
    z0: &[f64],
    y_end: f64,
    opts: &IvpOptions,
) -> Result<IvpResult> {
    integrate_marked(sys, y0, z0, &[y_end], opts)
}

/// Integrates from `y0` through the increasing output points `stops`, landing a step
/// exactly on each one; the last stop is the end of the span.
pub fn integrate_marked<S: OdeSystem + ?Sized>(
    sys: &S,
    y0: f64,
    z0: &[f64],
    stops: &[f64],
    opts: &IvpOptions,
) -> Result<IvpResult> {
    let n = sys.dim();
    if z0.len() != n {
        return invalid(format!("initial state has {} components, system has {n}", z0.len()));
    }
    let Some(&y_end) = stops.last() else {
        return invalid("no output points requested");
    };
    if !(stops[0] > y0) || stops.windows(2).any(|w| !(w[1] > w[0])) {
        return invalid(format!("output points must increase strictly from {y0}"));
    }
    let span = y_end - y0;
    let h_max = opts.max_step_fraction * span;
    let mut stats = StepStats::default();
    let mut y = y0;
    let mut z = z0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    sys.rhs(y, &z, &mut k[0]);
    stats.evaluations += 1;
    let mut out = IvpResult {
        ys: vec![y],
        states: vec![z.clone()],
        derivs: vec![k[0].clone()],
        termination: Termination::Reached,
        stats: StepStats::default(),
        marks: vec![0],
    };
    let mut next_stop = 0usize;
    if k[0].iter().any(|v| !v.is_finite()) {
        out.termination = Termination::BlowUp;
        out.stats = stats;
        return Ok(out);
    }
    let mut h = initial_step(&z, &k[0], span, opts).min(h_max);
    let mut stage = vec![0.0; n];
    let mut z_new = vec![0.0; n];
    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            out.termination = Termination::MaxSteps;
            break;
        }
        let stop = stops[next_stop];
        let h_free = h;
        let land = y + h >= stop;
        if land {
            h = stop - y;
        }
        let last = land && next_stop + 1 == stops.len();
        for s in 1..7 {
            for i in 0..n {
                let mut acc = z[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += h * A[s][j] * kj[i];
                }
                stage[i] = acc;
            }
            sys.rhs(y + C[s] * h, &stage, &mut k[s]);
            stats.evaluations += 1;
        }
        z_new.copy_from_slice(&stage);
        let mut err = 0.0f64;
        let mut finite = true;
        for i in 0..n {
            let e: f64 = (0..7).map(|s| E[s] * k[s][i]).sum::<f64>() * h;
            let sc = opts.atol + opts.rtol * z[i].abs().max(z_new[i].abs());
            let r = (e / sc).abs();
            if !r.is_finite() {
                finite = false;
            }
            err = err.max(r);
        }
        if !finite {
            err = f64::INFINITY;
        }
        if err <= 1.0 {
            stats.accepted += 1;
            stats.max_error_ratio = stats.max_error_ratio.max(err);
            y = if land { stop } else { y + h };
            z.copy_from_slice(&z_new);
            let k7 = k[6].clone();
            k[0] = k7;
            out.ys.push(y);
            out.states.push(z.clone());
            out.derivs.push(k[0].clone());
            if land {
                out.marks.push(out.ys.len() - 1);
                next_stop += 1;
            }
            if z.iter().any(|v| v.abs() > opts.blowup) {
                out.termination = Termination::BlowUp;
                break;
            }
            if last {
                break;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            // A step shortened to land on a stop says little about the next one.
            h = if land { (h * factor).max(h_free) } else { h * factor }.min(h_max);
        } else {
            stats.rejected += 1;
            let factor = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h *= factor;
            if h < opts.min_step {
                out.termination = Termination::StepUnderflow;
                break;
            }
        }
    }
    out.stats = stats;
    Ok(out)
}

fn initial_step(z: &[f64], dz: &[f64], span: f64, opts: &IvpOptions) -> f64 {
    let mut d0 = 0.0f64;
    let mut d1 = 0.0f64;
    for (v, d) in z.iter().zip(dz) {
        let sc = opts.atol + opts.rtol * v.abs();
        d0 = d0.max((v / sc).abs());
        d1 = d1.max((d / sc).abs());
    }
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
    h.clamp(1e-8 * span, 1e-2 * span)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential() {
        let sys = FnSystem::new(1, |_, z: &[f64], dz: &mut [f64]| dz[0] = z[0]);
        let r = integrate(&sys, 0.0, &[1.0], 1.0, &IvpOptions::default()).unwrap();
        assert_eq!(r.termination, Termination::Reached);
        assert!((r.last_state()[0] - 1f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn cosine() {
        let sys = FnSystem::new(2, |_, z: &[f64], dz: &mut [f64]| {
            dz[0] = z[1];
            dz[1] = -z[0];
        });
        let r = integrate(&sys, 0.0, &[1.0, 0.0], std::f64::consts::PI, &IvpOptions::default()).unwrap();
        assert!((r.last_state()[0] + 1.0).abs() < 1e-9);
        let mid = r.eval(1.0);
        assert!((mid[0] - 1f64.cos()).abs() < 1e-8);
    }

    #[test]
    fn zero_state_stays_zero() {
        let sys = FnSystem::new(3, |_, z: &[f64], dz: &mut [f64]| {
            dz[0] = z[1] - 2.0 * z[2];
            dz[1] = 3.0 * z[0];
            dz[2] = z[0] + z[1];
        });
        let r = integrate(&sys, 0.0, &[0.0; 3], 5.0, &IvpOptions::default()).unwrap();
        assert!(r.states.iter().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn blow_up_is_detected() {
        let sys = FnSystem::new(1, |_, z: &[f64], dz: &mut [f64]| dz[0] = z[0] * z[0]);
        let r = integrate(&sys, 0.0, &[1.0], 2.0, &IvpOptions::default()).unwrap();
        assert_ne!(r.termination, Termination::Reached);
    }
}
