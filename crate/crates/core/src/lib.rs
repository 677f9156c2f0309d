//! Simulator for a pulsed optical link between a magnonic node and a
//! mechanical node.

pub mod channels;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod metrics;
pub mod moments;
pub mod propagators;
pub mod protocol;

pub use error::{Error, Result};
