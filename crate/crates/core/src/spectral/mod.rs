//! The linear problem: kernel, eigenpairs, adjoint polynomials, tail decay and
//! the semigroup expansion.

pub mod adjoint;
pub mod decay;
pub mod eigen;
pub mod kernel;
pub mod semigroup;

pub use adjoint::{adjoint_polynomial, adjoint_polynomial_order, AdjointPolynomial};
pub use decay::{decay_rate, fit_decay, DecayFit};
pub use eigen::{biorthogonality_matrix, eigenfunction, eigenvalue_linear, identity_defect, linear_eigenpair, LinearEigenpair, MultiIndex};
pub use kernel::{decay_constant, kernel_1d, kernel_1d_order, kernel_radial, sphere_area, Kernel, LineKernel, RadialKernel, RadialTable};
pub use semigroup::{evolve_linear, gaussian_bump, moments, rescaled_convergence, rescaled_profile, truncated_expansion, ConvergenceTable, MomentSet};
