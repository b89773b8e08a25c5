//! Numeric core for a variational singing voice synthesis front end: score
//! parsing, log-mel and F0 features, note-bounded monotonic alignment, rhythm
//! regulation, training objectives with analytic gradients, and a synthetic
//! singing generator for end-to-end checks.

pub mod align;
pub mod config;
pub mod dsp;
pub mod error;
pub mod formats;
pub mod gaussian;
pub mod objectives;
pub mod pipeline;
pub mod regulator;
pub mod score;
pub mod synth;

pub use error::{Error, Result};
