//! Generalized bootstrap percolation: threshold cascades with random
//! thresholds and random edge weights on random graphs.
//!
//! The crate has four layers. [`influence`] turns threshold and weight laws
//! into activation probabilities. [`graph`] builds the substrates. [`engine`]
//! runs the cascades. [`criticality`] predicts the critical seed size, and
//! [`harness`] sweeps the seed size to locate the transition empirically.

pub mod criticality;
pub mod engine;
pub mod error;
pub mod graph;
pub mod harness;
pub mod influence;
pub mod numeric;
pub mod registry;

pub use error::{Error, Result};
pub use registry::{Params, Registry};

/// Random number generator used throughout; streams are reproducible per seed.
pub type SimRng = rand_chacha::ChaCha8Rng;
