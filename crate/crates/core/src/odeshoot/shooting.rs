//! Multi-parameter shooting from the origin, optionally with the right endpoint as
//! an extra unknown. A free endpoint L is handled by integrating the rescaled system
//! on s ∈ [0, 1], so L is an ordinary algebraic unknown.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numerics::newton::{max_norm, solve_system, NewtonOptions, SolveReport};
use crate::odeshoot::integrator::{integrate_marked, IvpOptions, IvpResult, OdeSystem, Rescaled, Termination};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OriginValue {
    Fixed(f64),
    Unknown,
}

/// Condition z[component] = value at the right endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Target {
    pub component: usize,
    pub value: f64,
}

impl Target {
    pub fn zero(component: usize) -> Self {
        Self { component, value: 0.0 }
    }
}

#[derive(Clone, Debug)]
pub struct ShootingSpec<S> {
    pub system: S,
    pub origin: Vec<OriginValue>,
    /// When set, the last unknown is the endpoint and `end` is ignored.
    pub free_boundary: bool,
    pub end: f64,
    pub targets: Vec<Target>,
    /// Number of equal intervals of the output grid on [0, end].
    pub samples: usize,
    pub ivp: IvpOptions,
    pub newton: NewtonOptions,
}

impl<S: OdeSystem> ShootingSpec<S> {
    pub fn new(
        system: S,
        origin: Vec<OriginValue>,
        free_boundary: bool,
        end: f64,
        targets: Vec<Target>,
    ) -> Result<Self> {
        let dim = system.dim();
        if origin.len() != dim {
            return invalid(format!("{} origin entries for a system of dimension {dim}", origin.len()));
        }
        if let Some(t) = targets.iter().find(|t| t.component >= dim) {
            return invalid(format!("target component {} outside the state", t.component));
        }
        let unknowns = origin.iter().filter(|o| **o == OriginValue::Unknown).count() + free_boundary as usize;
        if unknowns != targets.len() {
            return invalid(format!("{unknowns} unknowns but {} target conditions", targets.len()));
        }
        if !free_boundary && !(end > 0.0) {
            return invalid("fixed endpoint must be positive");
        }
        Ok(Self {
            system,
            origin,
            free_boundary,
            end,
            targets,
            samples: 1000,
            ivp: IvpOptions::default(),
            newton: NewtonOptions::default(),
        })
    }

    pub fn unknown_count(&self) -> usize {
        self.targets.len()
    }

    /// Origin state and endpoint for an unknown vector.
    pub fn unpack(&self, x: &[f64]) -> Result<(Vec<f64>, f64)> {
        if x.len() != self.unknown_count() {
            return invalid(format!("{} values for {} unknowns", x.len(), self.unknown_count()));
        }
        let mut it = x.iter();
        let z0 = self
            .origin
            .iter()
            .map(|o| match o {
                OriginValue::Fixed(v) => *v,
                OriginValue::Unknown => *it.next().unwrap(),
            })
            .collect();
        let end = if self.free_boundary { *x.last().unwrap() } else { self.end };
        if !(end > 0.0 && end.is_finite()) {
            return invalid(format!("endpoint {end} is not positive"));
        }
        Ok((z0, end))
    }

    /// Trajectory in the original variable for the given unknowns, on the rescaled
    /// output grid.
    pub fn trajectory(&self, x: &[f64]) -> Result<IvpResult> {
        let (z0, end) = self.unpack(x)?;
        let scaled = Rescaled { inner: &self.system, length: end };
        let stops: Vec<f64> = (1..=self.samples).map(|i| i as f64 / self.samples as f64).collect();
        Ok(integrate_marked(&scaled, 0.0, &z0, &stops, &self.ivp)?.unscaled(end))
    }

    /// Target residuals at the endpoint; an integration that stops early is an error.
    pub fn residuals(&self, x: &[f64]) -> Result<Vec<f64>> {
        let traj = self.trajectory(x)?;
        if traj.termination != Termination::Reached {
            return Err(Error::ShootingWindow(format!(
                "integration ended with {:?} at y = {:.6}",
                traj.termination,
                traj.end()
            )));
        }
        let z = traj.last_state();
        Ok(self.targets.iter().map(|t| z[t.component] - t.value).collect())
    }
}

#[derive(Clone, Debug)]
pub struct ShootOutcome {
    pub trajectory: IvpResult,
    pub unknowns: Vec<f64>,
    pub residuals: Vec<f64>,
    pub report: SolveReport,
    pub converged: bool,
    pub interior_residual: Option<f64>,
    pub end: f64,
}

#[derive(Serialize)]
struct Diagnostics<'a> {
    unknowns: &'a [f64],
    residuals: &'a [f64],
    residual_norm: f64,
    iterations: usize,
    damping_history: &'a [f64],
    termination: Termination,
    converged: bool,
    interior_residual: Option<f64>,
    end: f64,
}

impl ShootOutcome {
    pub fn residual_norm(&self) -> f64 {
        max_norm(&self.residuals)
    }

    /// JSON record {unknowns, residuals, iterations, termination, …}.
    pub fn diagnostics_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&Diagnostics {
            unknowns: &self.unknowns,
            residuals: &self.residuals,
            residual_norm: self.residual_norm(),
            iterations: self.report.iterations,
            damping_history: &self.report.damping_history,
            termination: self.trajectory.termination,
            converged: self.converged,
            interior_residual: self.interior_residual,
            end: self.end,
        })?)
    }
}

/// Solves the shooting problem from `guess`.
///
/// A guess whose trajectory does not reach the endpoint is a shooting-window error.
/// Non-convergence is not an error: the outcome carries the best iterate with
/// `converged == false`.
pub fn shoot<S: OdeSystem>(spec: &ShootingSpec<S>, guess: &[f64]) -> Result<ShootOutcome> {
    if let Err(e) = spec.residuals(guess) {
        return Err(match e {
            Error::ShootingWindow(msg) => {
                Error::ShootingWindow(format!("{msg}; the initial guess is outside the window, try another"))
            }
            other => other,
        });
    }
    let report = solve_system(|x| spec.residuals(x), guess, &spec.newton)?;
    let trajectory = spec.trajectory(&report.x)?;
    let z = trajectory.last_state();
    let residuals: Vec<f64> = spec.targets.iter().map(|t| z[t.component] - t.value).collect();
    let converged = report.converged && trajectory.termination == Termination::Reached;
    let interior_residual = spec.system.interior_residual(&trajectory);
    let end = trajectory.end();
    Ok(ShootOutcome {
        unknowns: report.x.clone(),
        residuals,
        converged,
        interior_residual,
        end,
        trajectory,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odeshoot::integrator::FnSystem;

    fn linear() -> FnSystem<impl Fn(f64, &[f64], &mut [f64]) + Sync> {
        FnSystem::new(2, |_, z: &[f64], dz: &mut [f64]| {
            dz[0] = z[1];
            dz[1] = z[0] - 1.0;
        })
    }

    #[test]
    fn linear_bvp_matches_closed_form() {
        // f″ = f − 1, f′(0) = 0, f(1) = 2: f = 1 + cosh(y)/cosh(1).
        let spec = ShootingSpec::new(
            linear(),
            vec![OriginValue::Unknown, OriginValue::Fixed(0.0)],
            false,
            1.0,
            vec![Target { component: 0, value: 2.0 }],
        )
        .unwrap();
        let out = shoot(&spec, &[0.0]).unwrap();
        assert!(out.converged);
        let expect = 1.0 + 1.0 / 1f64.cosh();
        assert!((out.unknowns[0] - expect).abs() < 1e-9);
    }

    #[test]
    fn constant_solution_of_the_quoted_problem() {
        // f″ = f − 1 with f(1) = 1, f′(1) = 0 and both origin values unknown: f ≡ 1.
        let spec = ShootingSpec::new(
            linear(),
            vec![OriginValue::Unknown, OriginValue::Unknown],
            false,
            1.0,
            vec![Target { component: 0, value: 1.0 }, Target::zero(1)],
        )
        .unwrap();
        let out = shoot(&spec, &[0.3, -0.2]).unwrap();
        assert!(out.converged);
        assert!((out.unknowns[0] - 1.0).abs() < 1e-9 && out.unknowns[1].abs() < 1e-9);
    }

    #[test]
    fn free_endpoint_is_found() {
        // f′ = −1, f(0) = 2: the zero of f sits at y = 2.
        let sys = FnSystem::new(1, |_, _: &[f64], dz: &mut [f64]| dz[0] = -1.0);
        let spec = ShootingSpec::new(sys, vec![OriginValue::Fixed(2.0)], true, 0.0, vec![Target::zero(0)]).unwrap();
        let out = shoot(&spec, &[1.5]).unwrap();
        assert!(out.converged);
        assert!((out.end - 2.0).abs() < 1e-10);
    }

    #[test]
    fn mismatched_counts_are_rejected() {
        let r = ShootingSpec::new(
            linear(),
            vec![OriginValue::Unknown, OriginValue::Unknown],
            false,
            1.0,
            vec![Target::zero(0)],
        );
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }
}
