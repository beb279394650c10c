//! Decentralized SLO assurance for simulated edge devices.
//!
//! Each device runs an active-inference agent that learns a discrete
//! Bayesian network over its metrics and picks the configuration most likely
//! to keep its SLOs. A fog leader merges models between similar devices and
//! reassigns client streams using its own network.

pub mod agent;
pub mod bayes;
pub mod cluster;
pub mod error;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result};
