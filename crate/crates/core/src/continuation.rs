//! Natural-parameter continuation of f₀ in the mobility exponent n, starting from
//! the kernel-seeded solution at small n.
//!
//! Each step predicts the shooting unknowns by a secant through the last two points
//! and corrects with Newton. A failed corrector halves Δn; two easy successes in a
//! row grow it by 1.3. Steps are clipped to land on the checkpoints so that traces
//! with different step limits share n values.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::odeshoot::chain::Flux;
use crate::odeshoot::shooting::shoot;
use crate::profile::RadialProfile;
use crate::similarity::f0::{assemble, f0_chain, f0_spec, to_unknowns, SEED_LIMIT};
use crate::similarity::{alpha0, solve_f0, F0Options, NonlinearEigenfunction, ACCEPT};
use crate::spectral::kernel::fmt17;

/// Corrector runs with at most this many Newton iterations count as easy.
const EASY_ITERATIONS: usize = 4;

#[derive(Clone, Debug)]
pub struct ContinuationOptions {
    pub n_start: f64,
    pub n_max: f64,
    pub initial_step: f64,
    pub max_step: f64,
    /// Steps below this count toward termination when they keep failing.
    pub min_step: f64,
    pub growth: f64,
    /// n values the trace lands on exactly.
    pub checkpoints: Vec<f64>,
    /// Solver settings per point; `delta: None` couples δ to n.
    pub f0: F0Options,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            n_start: 1e-3,
            n_max: 1.0,
            initial_step: 5e-3,
            max_step: 0.05,
            min_step: 1e-5,
            growth: 1.3,
            checkpoints: (1..=10).map(|i| i as f64 / 10.0).collect(),
            f0: F0Options::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchPoint {
    pub n: f64,
    pub alpha0: f64,
    pub y0: f64,
    /// f″(0), f⁗(0), f⁽⁶⁾(0), f⁽⁸⁾(0).
    pub origin_derivatives: [f64; 4],
    pub iterations: usize,
    pub residual: f64,
    pub interior_residual: f64,
    pub delta: f64,
    /// Shooting unknowns: Laplacians at the origin and y₀.
    #[serde(skip)]
    pub unknowns: Vec<f64>,
    #[serde(skip)]
    pub profile: RadialProfile,
}

impl BranchPoint {
    fn from_solution(ef: NonlinearEigenfunction) -> Self {
        let mut d = [0.0; 4];
        d.copy_from_slice(&ef.origin_derivatives);
        let y0 = ef.y0.unwrap_or(f64::NAN);
        let unknowns = to_unknowns(&[d[0], d[1], d[2], d[3], y0], ef.dim);
        Self {
            n: ef.n,
            alpha0: ef.alpha,
            y0,
            origin_derivatives: d,
            iterations: ef.iterations,
            residual: ef.residual_norm(),
            interior_residual: ef.interior_residual,
            delta: ef.delta,
            unknowns,
            profile: ef.profile,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Termination {
    ReachedEnd,
    FailedCorrector,
    StepUnderflow,
}

/// One attempted step.
#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub from: f64,
    pub step: f64,
    pub accepted: bool,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Branch {
    pub dim: usize,
    pub points: Vec<BranchPoint>,
    pub history: Vec<StepRecord>,
    pub termination: Termination,
    /// Last failed corrector when the trace stopped early.
    pub diagnostics: Option<String>,
}

impl Branch {
    pub fn last(&self) -> &BranchPoint {
        self.points.last().expect("a branch has its starting point")
    }

    pub fn at(&self, n: f64) -> Option<&BranchPoint> {
        self.points.iter().find(|p| (p.n - n).abs() <= 1e-12 * n.max(1.0))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.points)?)
    }
}

fn corrector(n: f64, dim: usize, opts: &F0Options, x: &[f64]) -> Result<NonlinearEigenfunction> {
    let chain = f0_chain(n, dim, opts, Flux::Thin)?;
    let spec = f0_spec(chain.clone(), opts)?;
    let out = shoot(&spec, x)?;
    assemble(&chain, &out, 0, alpha0(n, dim)?.alpha, opts.normalization)
}

/// Traces the first branch from `n_start` towards `n_max` in dimension N.
pub fn trace_branch(dim: usize, opts: &ContinuationOptions) -> Result<Branch> {
    if !(opts.n_start > 0.0 && opts.n_start <= SEED_LIMIT && opts.n_max > opts.n_start) {
        return invalid(format!(
            "need 0 < n_start ≤ {SEED_LIMIT} < n_max, got [{}, {}]",
            opts.n_start, opts.n_max
        ));
    }
    if !(opts.initial_step > 0.0 && opts.max_step >= opts.initial_step) {
        return invalid("step limits must satisfy 0 < initial_step ≤ max_step");
    }
    let mut f0 = opts.f0.clone();
    f0.guess = None;
    let first = solve_f0(opts.n_start, dim, &f0)?;
    if !first.converged {
        return Err(Error::ShootingWindow(format!(
            "starting point at n = {} did not converge (residual {:e})",
            opts.n_start,
            first.residual_norm()
        )));
    }
    let mut points = vec![BranchPoint::from_solution(first)];
    let mut history = Vec::new();
    let mut step = opts.initial_step;
    let mut easy = 0;
    let mut small_failures = 0;
    let mut diagnostics = None;
    let termination = loop {
        let here = points.last().unwrap();
        if here.n >= opts.n_max {
            break Termination::ReachedEnd;
        }
        let mut target = (here.n + step).min(opts.n_max);
        if let Some(c) = opts.checkpoints.iter().find(|c| **c > here.n * (1.0 + 1e-12) && **c < target) {
            target = *c;
        }
        if target <= here.n {
            break Termination::StepUnderflow;
        }
        let taken = target - here.n;
        let predicted: Vec<f64> = match points.len() {
            1 => here.unknowns.clone(),
            len => {
                let prev = &points[len - 2];
                let ratio = taken / (here.n - prev.n);
                here.unknowns.iter().zip(&prev.unknowns).map(|(a, b)| a + ratio * (a - b)).collect()
            }
        };
        let attempt = corrector(target, dim, &f0, &predicted);
        let (ok, iterations, residual) = match &attempt {
            Ok(ef) => (ef.converged, ef.iterations, ef.residual_norm()),
            Err(_) => (false, 0, f64::NAN),
        };
        history.push(StepRecord { from: here.n, step: taken, accepted: ok, iterations, residual });
        if ok {
            points.push(BranchPoint::from_solution(attempt.unwrap()));
            small_failures = 0;
            easy = if iterations <= EASY_ITERATIONS { easy + 1 } else { 0 };
            if easy >= 2 {
                step = (step * opts.growth).min(opts.max_step);
                easy = 0;
            }
        } else {
            diagnostics = Some(match attempt {
                Ok(ef) => format!(
                    "corrector at n = {target} stopped with residual {:e}, interior {:e} after {} iterations",
                    ef.residual_norm(),
                    ef.interior_residual,
                    ef.iterations
                ),
                Err(e) => format!("corrector at n = {target} failed: {e}"),
            });
            easy = 0;
            step = 0.5 * taken;
            if step < opts.min_step {
                small_failures += 1;
                if small_failures >= 3 {
                    break Termination::FailedCorrector;
                }
            }
        }
    };
    if termination == Termination::ReachedEnd {
        diagnostics = None;
    }
    Ok(Branch { dim, points, history, termination, diagnostics })
}

/// f₀ at `n` by continuing the branch from the kernel-seeded start.
pub fn continue_to(n: f64, dim: usize, f0: &F0Options) -> Result<NonlinearEigenfunction> {
    let opts = ContinuationOptions { n_max: n, f0: f0.clone(), ..ContinuationOptions::default() };
    let branch = trace_branch(dim, &opts)?;
    let last = branch.last();
    if branch.termination != Termination::ReachedEnd {
        return Err(Error::ShootingWindow(format!(
            "continuation stopped at n = {}: {}",
            last.n,
            branch.diagnostics.clone().unwrap_or_default()
        )));
    }
    revalidate(last, dim, f0)
}

/// Re-solves a branch point from its stored unknowns.
pub fn revalidate(point: &BranchPoint, dim: usize, f0: &F0Options) -> Result<NonlinearEigenfunction> {
    let d = &point.origin_derivatives;
    let guess = [d[0], d[1], d[2], d[3], point.y0];
    let mut opts = f0.clone();
    opts.guess = Some(guess);
    let ef = solve_f0(point.n, dim, &opts)?;
    debug_assert!(!ef.converged || ef.residual_norm() <= ACCEPT);
    Ok(ef)
}

/// sup |f_a − f_b| at the n values present in both branches, f_b interpolated on a's grid.
pub fn branch_discrepancy(a: &Branch, b: &Branch) -> Vec<(f64, f64)> {
    a.points
        .iter()
        .filter_map(|p| b.at(p.n).map(|q| (p, q)))
        .map(|(p, q)| {
            let d = p
                .profile
                .grid
                .points()
                .iter()
                .zip(p.profile.values())
                .map(|(y, f)| (f - q.profile.interpolate(0, *y)).abs())
                .fold(0.0f64, f64::max);
            (p.n, d)
        })
        .collect()
}

/// CSV `n,alpha0,y0,f2_0,f4_0,f6_0,f8_0,iters,residual`.
pub fn branch_report(branch: &Branch) -> String {
    let mut out = String::from("n,alpha0,y0,f2_0,f4_0,f6_0,f8_0,iters,residual\n");
    for p in &branch.points {
        let cells = [p.n, p.alpha0, p.y0, p.origin_derivatives[0], p.origin_derivatives[1], p.origin_derivatives[2], p.origin_derivatives[3]];
        let row: Vec<String> = cells.iter().map(|v| fmt17(*v)).collect();
        out.push_str(&format!("{},{},{}\n", row.join(","), p.iterations, fmt17(p.residual)));
    }
    out
}
