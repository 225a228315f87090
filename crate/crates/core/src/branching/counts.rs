//! Root counts of the reduced branching equations: a quadratic in c₂ on [0, 1] for
//! the dipole, and a pair of conics in (c₂, c₃) for |β| = 2.

use serde::Serialize;

use crate::error::Error;
use crate::numerics::{conic_intersections, Conic};

/// 𝔉(c₂) = A c₂² + B c₂ + C, perturbed by ω with ‖ω‖∞ = `omega_norm`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadraticBranchProblem {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub omega_norm: f64,
}

impl QuadraticBranchProblem {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c, omega_norm: 0.0 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.a * x + self.b) * x + self.c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QuadraticCase {
    Quadratic,
    /// A = 0: at most one root.
    Linear,
    /// A = B = 0, C ≠ 0: no roots.
    Constant,
    /// A = B = C = 0: every c₂ solves the unperturbed equation.
    IdenticallyZero,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadraticCount {
    pub case: QuadraticCase,
    /// Distinct real roots in [0, 1], increasing.
    pub roots: Vec<f64>,
    /// `None` when the unperturbed equation vanishes identically.
    pub count: Option<usize>,
    /// (a) C(A+B+C) > 0.
    pub condition_a: Option<bool>,
    /// (b) C·𝔉(c₂*) < 0.
    pub condition_b: Option<bool>,
    /// (c) 0 < c₂* < 1.
    pub condition_c: Option<bool>,
    pub vertex: Option<f64>,
    /// 𝔉(c₂*) = C − B²/(4A).
    pub vertex_value: Option<f64>,
    /// The printed variant C − B/(4A), kept for comparison.
    pub vertex_value_printed: Option<f64>,
    /// ‖ω‖∞ ≤ |𝔉(c₂*)|.
    pub perturbation_ok: Option<bool>,
}

fn in_unit(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

/// Exact count of the roots of 𝔉 in [0, 1] with the three vertex conditions.
pub fn quadratic_branch_count(p: &QuadraticBranchProblem) -> QuadraticCount {
    let (a, b, c) = (p.a, p.b, p.c);
    let mut out = QuadraticCount {
        case: QuadraticCase::Quadratic,
        roots: Vec::new(),
        count: Some(0),
        condition_a: None,
        condition_b: None,
        condition_c: None,
        vertex: None,
        vertex_value: None,
        vertex_value_printed: None,
        perturbation_ok: None,
    };
    if a == 0.0 {
        out.case = match (b == 0.0, c == 0.0) {
            (true, true) => QuadraticCase::IdenticallyZero,
            (true, false) => QuadraticCase::Constant,
            _ => QuadraticCase::Linear,
        };
        match out.case {
            QuadraticCase::IdenticallyZero => out.count = None,
            QuadraticCase::Linear => {
                let x = -c / b;
                if in_unit(x) {
                    out.roots.push(x);
                }
                out.count = Some(out.roots.len());
            }
            _ => {}
        }
        return out;
    }
    let disc = b * b - 4.0 * a * c;
    let mut roots = if disc > 0.0 {
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        vec![q / a, c / q]
    } else if disc == 0.0 {
        vec![-b / (2.0 * a)]
    } else {
        Vec::new()
    };
    roots.retain(|x| in_unit(*x));
    roots.sort_by(f64::total_cmp);
    out.count = Some(roots.len());
    out.roots = roots;
    let vertex = -b / (2.0 * a);
    let value = c - b * b / (4.0 * a);
    out.condition_a = Some(c * (a + b + c) > 0.0);
    out.condition_b = Some(c * value < 0.0);
    out.condition_c = Some(vertex > 0.0 && vertex < 1.0);
    out.vertex = Some(vertex);
    out.vertex_value = Some(value);
    out.vertex_value_printed = Some(c - b / (4.0 * a));
    out.perturbation_ok = Some(p.omega_norm <= value.abs());
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConicClass {
    Ellipse,
    Circle,
    Parabola,
    Hyperbola,
    /// Line pairs, single points, empty curves and vanishing quadratic parts.
    Degenerate,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConicClassification {
    pub class: ConicClass,
    /// E² − 4AB for A c₂² + B c₃² + E c₂c₃.
    pub discriminant: f64,
    /// The printed variant B² − 4AE.
    pub discriminant_printed: f64,
    /// Stationary point (c₂*, c₃*) and the value there, when it exists.
    pub stationary: Option<(f64, f64, f64)>,
}

/// Relative size below which an invariant counts as zero.
const CONIC_TOL: f64 = 1e-12;

pub fn classify_conic(q: &Conic) -> ConicClassification {
    let s = q.scale();
    let discriminant = q.e * q.e - 4.0 * q.a * q.b;
    let discriminant_printed = q.b * q.b - 4.0 * q.a * q.e;
    let det2 = 4.0 * q.a * q.b - q.e * q.e;
    let stationary = if det2.abs() > CONIC_TOL * s * s {
        let x = (-q.c * 2.0 * q.b + q.e * q.d) / det2;
        let y = (-2.0 * q.a * q.d + q.e * q.c) / det2;
        Some((x, y, q.eval(x, y)))
    } else {
        None
    };
    let full = q.full_determinant();
    let class = if s == 0.0 || q.is_degenerate_quadratic() || full.abs() <= CONIC_TOL * s * s * s {
        ConicClass::Degenerate
    } else if discriminant.abs() <= CONIC_TOL * s * s {
        ConicClass::Parabola
    } else if discriminant > 0.0 {
        ConicClass::Hyperbola
    } else if q.a * full > 0.0 {
        // No real points, as for c₂² + c₃² + k = 0 with k > 0.
        ConicClass::Degenerate
    } else if (q.a - q.b).abs() <= CONIC_TOL * s && q.e.abs() <= CONIC_TOL * s {
        ConicClass::Circle
    } else {
        ConicClass::Ellipse
    };
    ConicClassification { class, discriminant, discriminant_printed, stationary }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConicBranchCount {
    pub conics: [Conic; 2],
    pub classes: [ConicClassification; 2],
    pub points: Vec<(f64, f64)>,
    /// `None` when either conic is degenerate or the pair has no finite intersection set.
    pub count: Option<usize>,
    pub within_bound: bool,
    /// ‖ωᵢ‖∞ ≤ |𝔉ᵢ(c₂*, c₃*)| per conic, when the stationary point exists.
    pub perturbation_ok: [Option<bool>; 2],
    pub note: Option<String>,
}

/// Classifies both conics and counts their real common points.
pub fn conic_branch_count(p: &Conic, q: &Conic, omega_norms: [f64; 2]) -> ConicBranchCount {
    let classes = [classify_conic(p), classify_conic(q)];
    let perturbation_ok = [0, 1].map(|i| classes[i].stationary.map(|(_, _, v)| omega_norms[i] <= v.abs()));
    let mut out = ConicBranchCount {
        conics: [*p, *q],
        classes: classes.clone(),
        points: Vec::new(),
        count: None,
        within_bound: true,
        perturbation_ok,
        note: None,
    };
    if classes.iter().any(|c| c.class == ConicClass::Degenerate) {
        out.note = Some("degenerate conic: no count claimed".into());
        return out;
    }
    match conic_intersections(p, q) {
        Ok(points) => {
            out.count = Some(points.len());
            out.within_bound = points.len() <= 4;
            out.points = points;
        }
        Err(e @ (Error::IdenticalConics | Error::ResultantVanishes)) => out.note = Some(e.to_string()),
        Err(e) => out.note = Some(format!("intersection failed: {e}")),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_roots_with_all_conditions() {
        let r = quadratic_branch_count(&QuadraticBranchProblem::new(1.0, -1.0, 0.2));
        assert_eq!(r.count, Some(2));
        assert!((r.roots[0] - 0.276_393_202_250_021).abs() < 1e-12);
        assert!((r.roots[1] - 0.723_606_797_749_979).abs() < 1e-12);
        assert_eq!((r.condition_a, r.condition_b, r.condition_c), (Some(true), Some(true), Some(true)));
        assert!((r.vertex_value.unwrap() + 0.05).abs() < 1e-15);
    }

    #[test]
    fn double_and_missing_roots() {
        let r = quadratic_branch_count(&QuadraticBranchProblem::new(1.0, -1.0, 0.25));
        assert_eq!(r.roots, vec![0.5]);
        assert_eq!(quadratic_branch_count(&QuadraticBranchProblem::new(1.0, 1.0, 1.0)).count, Some(0));
    }

    #[test]
    fn degenerate_quadratics() {
        let r = quadratic_branch_count(&QuadraticBranchProblem::new(0.0, 2.0, -1.0));
        assert_eq!((r.case, r.roots.clone()), (QuadraticCase::Linear, vec![0.5]));
        let r = quadratic_branch_count(&QuadraticBranchProblem::new(0.0, 0.0, 0.0));
        assert_eq!((r.case, r.count), (QuadraticCase::IdenticallyZero, None));
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_conic(&Conic::new(1.0, 1.0, 0.0, 0.0, 0.0, -1.0)).class, ConicClass::Circle);
        assert_eq!(classify_conic(&Conic::new(1.0, -1.0, 0.0, 0.0, 0.0, -1.0)).class, ConicClass::Hyperbola);
        assert_eq!(classify_conic(&Conic::new(1.0, 0.0, 0.0, -1.0, 0.0, 0.0)).class, ConicClass::Parabola);
        assert_eq!(classify_conic(&Conic::new(1.0, 1.0, 0.0, 0.0, 0.0, 1.0)).class, ConicClass::Degenerate);
        assert_eq!(classify_conic(&Conic::new(1.0, -1.0, 0.0, 0.0, 0.0, 0.0)).class, ConicClass::Degenerate);
    }

    #[test]
    fn circle_and_ellipse_meet_four_times() {
        let circle = Conic::new(1.0, 1.0, 0.0, 0.0, 0.0, -1.0);
        let ellipse = Conic::new(0.25, 4.0, 0.0, 0.0, 0.0, -1.0);
        let r = conic_branch_count(&circle, &ellipse, [0.0, 0.0]);
        assert_eq!(r.count, Some(4));
        assert!(r.within_bound);
    }
}
