//! Finite-blocklength achievable rates for pure-state classical-quantum
//! channels and classical DMCs under concatenated coding.
//!
//! All logarithms are natural; rates are in nats per channel use and photon
//! information efficiency in nats per photon.

pub mod bounds;
pub mod capacities;
pub mod cli;
pub mod dmcsim;
pub mod error;
pub mod exponents;
pub mod optical;
pub mod optimize;
pub mod spectral;

pub use bounds::{BoundCurve, BoundModel, BoundPoint};
pub use capacities::{DiscreteChannel, Optimum};
pub use error::{Error, Result};
pub use exponents::{ExponentModel, ExponentPoint};
pub use optical::CoherentConstellation;
pub use spectral::{GramEnsemble, HermitianMatrix, Spectrum};
