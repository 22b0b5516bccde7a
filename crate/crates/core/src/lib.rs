//! Heavy-traffic analysis of MaxWeight generalized switches and JSQ load
//! balancing.
//!
//! The crate is organized bottom-up:
//!
//! * [`model`] holds the discrete-time arrival, channel and service laws and
//!   the exact integer queue recursion.
//! * [`geometry`] builds the capacity-region polytope, the facets tight at a
//!   boundary direction, the cone `K` and subspace `H` they span, and the
//!   service-randomness covariance.
//! * [`scheduling`] implements MaxWeight (enumerating and assignment-based)
//!   and join-the-shortest-queue routing.
//! * [`simulator`] runs the Markov chain and collects batch-means estimates of
//!   the steady-state quantities that the heavy-traffic analysis relies on.
//! * [`theory`] evaluates the closed-form limits and bounds and fits the
//!   logarithmic error model.
//! * [`experiments`] ties everything together behind a config file and the
//!   `htq` command-line tool.
//!
//! Runnable walkthroughs for each capability live in the crate's `examples/`
//! directory.

pub mod error;
pub mod experiments;
pub mod geometry;
pub mod model;
pub mod scheduling;
pub mod simulator;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
