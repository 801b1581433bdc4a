//! Reproducible pool-based deep active learning over fixed instance embeddings.
//!
//! The crate runs seeded query cycles (initial pool, per-cycle pool subset,
//! batch query, simulated annotation, retraining of a linear softmax head)
//! for five query strategies and reduces the resulting learning curves to
//! normalized AUC, final accuracy and benchmark tables.

pub mod classifier;
pub mod error;
pub mod featureio;
pub mod matrix;
pub mod metrics;
pub mod pools;
pub mod rng;
pub mod runner;
pub mod strategies;

pub use error::{Error, Result};
