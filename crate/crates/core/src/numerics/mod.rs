//! Shared numerical kernels: grids, quadrature, special functions, Newton
//! iteration, polynomial roots and conic intersections.

pub mod conic;
pub mod fd;
pub mod grid;
pub mod newton;
pub mod poly;
pub mod quadrature;
pub mod special;

pub use conic::{conic_intersections, Conic};
pub use grid::{Grid, Spacing};
pub use newton::{solve_system, NewtonOptions, SolveReport};
pub use poly::Poly;
pub use quadrature::{pairwise_sum, quadrature, GaussLegendre, QuadratureRule};
pub use special::{bessel_j, bessel_j_scaled, gamma, ln_gamma};
