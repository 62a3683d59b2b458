//! Numerical nonintegrability certificates for nearly integrable systems
//! near resonant periodic orbits.
//!
//! The library evaluates subharmonic Melnikov functions and, more robustly,
//! loop integrals of the perturbation along complexified resonant orbits.
//! A nonvanishing loop integral certifies that the perturbed system admits
//! no additional real-analytic first integral or commuting vector field near
//! the resonance, even in regimes where the Melnikov function itself is
//! identically constant.

pub mod certificate;
pub mod cli;
pub mod contour;
pub mod elliptic;
pub mod error;
pub mod melnikov;
pub mod model;
pub mod orbits;
pub mod verify;

pub use error::{Error, Result};
