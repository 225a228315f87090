//! First-order shift of the simple eigenvalue: μ₁,₀ = ⟨−∇·(ln|F|∇Δ⁴F) + (N/100) y·∇F, 1⟩.

use serde::Serialize;

use crate::branching::radial::RadialField;
use crate::error::{Error, Result};
use crate::numerics::QuadratureRule;
use crate::spectral::kernel::sphere_area;

/// Largest admissible divergence term; it vanishes exactly in the limit.
pub const DIVERGENCE_LIMIT: f64 = 1e-3;

/// Largest change of a log-singular quadrature under grading refinement.
pub const REFINEMENT_LIMIT: f64 = 1e-5;

const ORDER: usize = 16;
const LEVELS: usize = 30;
const PANEL_WIDTH: f64 = 0.5;

#[derive(Clone, Debug, Serialize)]
pub struct Mu10 {
    pub dim: usize,
    pub value: f64,
    /// −∫∇·(ln|F|∇Δ⁴F), zero up to truncation and quadrature error.
    pub divergence_term: f64,
    /// (N/100)∫y·∇F.
    pub drift_term: f64,
    /// −N²/100, the n-derivative of N/(10+Nn) at n = 0.
    pub exact: f64,
    /// Change of the divergence term when every panel is split and grading deepened.
    pub refinement_delta: f64,
    pub radius: f64,
    pub kernel_zeros: usize,
}

/// Radial integral of `g` over [0, R] with principal-value folding at each listed pole.
///
/// Each pole r* gets a symmetric window [r* − ε, r* + ε] integrated as
/// ∫₀^ε g(r*+t) + g(r*−t) dt on panels graded towards t = 0.
pub(crate) fn folded_integral<G: Fn(f64) -> f64>(g: G, poles: &[f64], radius: f64, levels: usize, refine: bool) -> Result<f64> {
    let mut cuts = vec![0.0];
    cuts.extend(poles.iter().copied().filter(|p| *p > 0.0 && *p < radius));
    cuts.push(radius);
    let half: Vec<f64> = (1..cuts.len() - 1)
        .map(|k| 0.5 * (cuts[k] - cuts[k - 1]).min(cuts[k + 1] - cuts[k]))
        .collect();
    let mut total = Vec::new();
    let regular = |a: f64, b: f64| -> Result<f64> {
        if b - a <= 0.0 {
            return Ok(0.0);
        }
        let panels = ((b - a) / PANEL_WIDTH).ceil().max(1.0) as usize;
        let mut rule = QuadratureRule::uniform(a, b, panels, ORDER)?;
        if refine {
            rule = rule.refined();
        }
        rule.integrate(&g)
    };
    for k in 0..cuts.len() - 1 {
        let lo = if k == 0 { 0.0 } else { cuts[k] + half[k - 1] };
        let hi = if k + 1 == cuts.len() - 1 { radius } else { cuts[k + 1] - half[k] };
        total.push(regular(lo, hi)?);
    }
    for (k, eps) in half.iter().enumerate() {
        let p = cuts[k + 1];
        let mut rule = QuadratureRule::graded(0.0, *eps, &[0.0], 2, levels, ORDER)?;
        if refine {
            rule = rule.refined();
        }
        total.push(rule.integrate(|t| g(p + t) + g(p - t))?);
    }
    Ok(crate::numerics::pairwise_sum(&total))
}

/// μ₁,₀ in the dimension of `field`.
///
/// Both terms are integrated radially. The divergence term is reported separately; its
/// integrand has a principal-value pole at every zero of F, handled by folding.
/// A divergence term above 1e−3 or a refinement change above 1e−5 is an error.
pub fn mu10(field: &RadialField) -> Result<Mu10> {
    let dim = field.dim();
    let nm1 = dim as i32 - 1;
    let area = sphere_area(dim);
    let radius = field.radius();
    let zeros = field.zeros(0);
    let divergence = |r: f64| {
        let j = field.jet(r);
        let (f, df) = (j.lap[0], j.dlap[0]);
        -area * r.powi(nm1) * (df / f * j.dlap[4] + f.abs().ln() * j.lap[5])
    };
    let coarse = folded_integral(divergence, &zeros, radius, LEVELS, false)?;
    let fine = folded_integral(divergence, &zeros, radius, LEVELS + 10, true)?;
    let delta = (fine - coarse).abs();
    let drift_rule = QuadratureRule::uniform(0.0, radius, (radius / PANEL_WIDTH).ceil() as usize, ORDER)?;
    let moment = drift_rule.integrate(|r| area * r.powi(nm1) * r * field.jet(r).dlap[0])?;
    let drift_term = dim as f64 / 100.0 * moment;
    if fine.abs() > DIVERGENCE_LIMIT {
        return Err(Error::SingularityResolution { value: fine, limit: DIVERGENCE_LIMIT });
    }
    if delta > REFINEMENT_LIMIT {
        return Err(Error::QuadratureNotConverged { delta });
    }
    Ok(Mu10 {
        dim,
        value: fine + drift_term,
        divergence_term: fine,
        drift_term,
        exact: -((dim * dim) as f64) / 100.0,
        refinement_delta: delta,
        radius,
        kernel_zeros: zeros.len(),
    })
}
