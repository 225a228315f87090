pub mod branching;
pub mod cli;
pub mod continuation;
pub mod error;
pub mod numerics;
pub mod odeshoot;
pub mod profile;
#[cfg(test)]
mod properties;
pub mod similarity;
pub mod spectral;
pub mod unstable;

pub use error::{Error, Result};
