//! Numerical laboratory for the time-step sensitivity of computed Lorenz
//! trajectories.
//!
//! * [`systems`]: the standard Lorenz field, its normal form and the near-axis
//!   linearization, with their equilibria.
//! * [`integrators`]: fixed-step and adaptive integrators producing
//!   provenanced trajectories.
//! * [`analysis`]: divergence times, growth rates and the running E(t) average.
//! * [`manifold`]: local stable/unstable slopes near the z-axis and detection of
//!   crossings of the local stable surface.
//! * [`attractor`]: long runs, thin slabs, holes, occupancy areas and densities.
//! * [`lab`]: JSON-configured experiments, CSV outputs and run manifests.

// `!(a < b)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod attractor;
pub mod error;
pub mod integrators;
pub mod io;
pub mod lab;
pub mod manifold;
pub mod systems;

pub use error::{LabError, Result};
pub use systems::{LorenzParams, State3, SystemId};
