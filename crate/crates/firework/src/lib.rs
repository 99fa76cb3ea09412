//! Simulators, exact brute-force oracles, and analytic survival criteria
//! for the firework and reverse firework rumour processes on the
//! nonnegative integers.
//!
//! A rumour starts at vertex 0. In the firework process each activated
//! vertex explodes once, activating every actionable vertex within its
//! random rightward radius; in the reverse process inactive vertices
//! listen leftward and activate when an already-active vertex lies within
//! their radius. The crate estimates survival-to-horizon probabilities by
//! reproducible Monte Carlo, computes the exact reach products, classifier
//! verdicts and bounds implied by the radius laws, and cross-validates
//! everything against exhaustive enumeration on small instances.

pub mod analytics;
pub mod config;
pub mod distributions;
pub mod error;
pub mod experiment;
pub mod numeric;
pub mod oracle;
pub mod processes;
pub mod stream;

pub use error::{Error, Result};
