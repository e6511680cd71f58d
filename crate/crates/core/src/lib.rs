//! Information rates of channels with classical or quantum memory.
//!
//! The crate builds channel models, compiles quantum-state channels into
//! transfer operators, samples trajectories, and estimates information rates
//! and auxiliary-channel lower bounds with forward recursions.

pub mod bounds;
pub mod channels;
pub mod error;
pub mod experiment;
pub mod operator;
pub mod oracle;
pub mod random;
pub mod rate;
pub mod trajectory;

pub use channels::{ChannelModel, InputLaw};
pub use error::{Error, Result};
