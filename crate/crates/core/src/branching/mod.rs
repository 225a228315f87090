//! Lyapunov–Schmidt reduction at n = 0: the shift μ₁,₀ of the simple eigenvalue,
//! the dipole system of the |β| = 1 eigenspace in the plane, and the conic pair of
//! the |β| = 2 eigenspace, with root counts for both.
//!
//! Kernel data comes from one tabulated [`RadialField`] per dimension; integrals are
//! truncated at its radius, where the kernel has decayed below 1e−13.

pub mod counts;
pub mod dipole;
pub mod mu10;
pub mod pairing;
pub mod radial;
pub mod second;

use serde::Serialize;

use crate::error::Result;

pub use counts::{
    classify_conic, conic_branch_count, quadratic_branch_count, ConicBranchCount, ConicClass, ConicClassification,
    QuadraticBranchProblem, QuadraticCase, QuadraticCount,
};
pub use dipole::{
    assemble_quadratic_coefficients, dipole_coefficients, dipole_residual, dipole_solve, DipoleCoefficients,
    DipoleLogPairings, DipoleSolution, ExpansionCoefficients, QuadraticAssembly, DIPOLE_ACCEPT,
};
pub use mu10::{mu10, Mu10, DIVERGENCE_LIMIT, REFINEMENT_LIMIT};
pub use pairing::{linear_pairings, log_pairings_by_rays, LinearPairings, PlanarBasis, RayQuadrature};
pub use radial::RadialField;
pub use second::{second_level_analysis, SecondLevelReport};

/// Everything the reduction produces for the planar eigenspaces |β| = 1, 2.
#[derive(Clone, Debug, Serialize)]
pub struct BranchingReport {
    pub mu10: Vec<Mu10>,
    pub dipole: DipoleCoefficients,
    pub dipole_logs: DipoleLogPairings,
    pub dipole_solution: DipoleSolution,
    pub quadratic: QuadraticAssembly,
    pub second: Option<SecondLevelReport>,
}

impl BranchingReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// The full reduction: μ₁,₀ for N = 1, 2, the dipole analysis and, when asked for,
/// the |β| = 2 conics with ω sampled on a simplex mesh of width `simplex_step`.
pub fn branching_analysis(with_second_level: bool, simplex_step: f64) -> Result<BranchingReport> {
    let line = RadialField::new(1)?;
    let plane = RadialField::new(2)?;
    let mu = vec![mu10(&line)?, mu10(&plane)?];
    let dipole = dipole_coefficients(&plane)?;
    let dipole_logs = DipoleLogPairings::new(&plane)?;
    let dipole_solution = dipole_solve(&dipole, &dipole_logs)?;
    let quadratic = assemble_quadratic_coefficients(&dipole, &dipole_logs)?;
    let second = if with_second_level {
        Some(second_level_analysis(&plane, &RayQuadrature::default(), simplex_step)?)
    } else {
        None
    };
    Ok(BranchingReport { mu10: mu, dipole, dipole_logs, dipole_solution, quadratic, second })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::OnceLock;

    use super::*;

    fn plane() -> &'static RadialField {
        static FIELD: OnceLock<RadialField> = OnceLock::new();
        FIELD.get_or_init(|| RadialField::new(2).unwrap())
    }

    fn logs() -> &'static DipoleLogPairings {
        static LOGS: OnceLock<DipoleLogPairings> = OnceLock::new();
        LOGS.get_or_init(|| DipoleLogPairings::new(plane()).unwrap())
    }

    /// 2πI₁ + πI₂ − πJ₁: the angular integrals collapse L(c) to this multiple of c.
    fn dipole_constant() -> f64 {
        let l = logs();
        2.0 * PI * l.i1 + PI * l.i2 - PI * l.j1
    }

    #[test]
    fn mu10_is_minus_n_squared_over_100() {
        for dim in 1..=3 {
            let m = mu10(&RadialField::new(dim).unwrap()).unwrap();
            assert!((m.value - m.exact).abs() < 1e-6, "N = {dim}: {} vs {}", m.value, m.exact);
            assert!(m.divergence_term.abs() < 1e-6);
        }
    }

    #[test]
    fn dipole_pairings_follow_integration_by_parts() {
        let d = dipole_coefficients(plane()).unwrap();
        assert!(d.pairings.identity_defect() < 1e-6, "{:?}", d.pairings.dilation);
        assert!((d.nondegeneracy + 3.0).abs() < 1e-6);
        assert!((d.alpha - 0.3).abs() < 1e-15);
        for (i, row) in d.pairings.biorthogonality.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn dipole_radial_moments() {
        let l = logs();
        let h0 = 1.0 / (20.0 * PI);
        assert!((l.j1 + h0).abs() < 1e-8, "{}", l.j1);
        assert!((l.j2 - 2.0 * h0).abs() < 1e-8, "{}", l.j2);
        assert!(l.refinement_delta < 1e-8);
        // Frozen from this quadrature; the ray engine below checks it independently.
        assert!((dipole_constant() - 0.052_99).abs() < 1e-4, "{}", dipole_constant());
    }

    #[test]
    fn dipole_log_pairings_are_proportional_to_c() {
        let b = dipole_constant();
        for c in [[0.3, 0.7], [0.9, 0.1], [-0.4, 1.4]] {
            let l = logs().evaluate(c).unwrap();
            assert!((l[0] - b * c[0]).abs() < 1e-9 && (l[1] - b * c[1]).abs() < 1e-9, "{c:?}: {l:?}");
        }
    }

    #[test]
    fn ray_engine_agrees_with_separable_evaluation() {
        let c = [0.6f64, 0.4];
        let basis = PlanarBasis::new(1).unwrap();
        let phi = c[1].atan2(c[0]);
        let angles = [phi + 0.5 * PI, phi + 1.5 * PI].map(|t| t.rem_euclid(2.0 * PI));
        let rays = log_pairings_by_rays(plane(), &basis, &c, &angles, &RayQuadrature::default()).unwrap();
        let sep = logs().evaluate(c).unwrap();
        for i in 0..2 {
            assert!((rays[i] - sep[i]).abs() < 1e-6, "{i}: {} vs {}", rays[i], sep[i]);
        }
    }

    #[test]
    fn dipole_solution_and_quadratic() {
        let d = dipole_coefficients(plane()).unwrap();
        let s = dipole_solve(&d, logs()).unwrap();
        let expect = -dipole_constant() - 3.0 * d.alpha / 10.0;
        assert!(s.residual <= DIPOLE_ACCEPT);
        assert!((s.coefficients.mu1 - expect).abs() < 1e-7, "{} vs {expect}", s.coefficients.mu1);
        assert!((s.coefficients.c.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(s.family);
        let q = assemble_quadratic_coefficients(&d, logs()).unwrap();
        assert_eq!(q.count.case, QuadraticCase::IdenticallyZero);
        assert!(q.galerkin.omega_norm < 1e-8);
        let (a, b, c) = (q.printed[0], q.printed[1], q.printed[2]);
        assert!(a.abs() < 1e-6 && b.abs() < 1e-6 && c.abs() < 1e-6);
    }

    #[test]
    fn second_level_conics_vanish() {
        let r = second_level_analysis(plane(), &RayQuadrature::default(), 0.0).unwrap();
        assert!(r.pairings.identity_defect() < 1e-6);
        assert!(r.galerkin.iter().all(|q| q.scale() < 1e-6));
        assert_eq!(r.count.count, None);
        assert!(r.log_refinement_delta < 1e-6);
    }
}
