//! Hellinger-distance Gaussian discord for two-mode Gaussian states.
//!
//! Covariance matrices use the quadrature ordering `(q1, p1, …, qn, pn)` with vacuum variance ½.

pub mod affinity;
pub mod discord;
pub mod error;
pub mod oracle;
pub mod par;
pub mod sampling;
pub mod states;
pub mod sweep;
pub mod symplectic;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
pub use par::Execution;

/// Library version, recorded in CLI output for provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
