//! Adaptive integration of radial ODE systems and shooting with a free boundary.

pub mod chain;
pub mod integrator;
pub mod shooting;

pub use chain::{regularized_mobility, Flux, RadialChain, CHAIN_DIM};
pub use integrator::{integrate, integrate_marked, FnSystem, IvpOptions, IvpResult, OdeSystem, Rescaled, Termination};
pub use shooting::{shoot, OriginValue, ShootOutcome, ShootingSpec, Target};
