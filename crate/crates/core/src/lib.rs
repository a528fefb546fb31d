//! Classify system-environment Hamiltonians by whether they can produce
//! redundant classical records of a system observable, and check the verdict
//! by exact state-vector simulation of mutual-information profiles.

pub mod classifier;
pub mod error;
pub mod evolution;
pub mod experiments;
pub mod information;
pub mod layout;
pub mod linalg;
pub mod model;
pub mod rng;

pub use error::{Error, Result};
pub use layout::SubsystemLayout;
