//! Relative Needs Entropy (RNE) trust between agents and groups,
//! trust-based grouping of a heterogeneous robot team, and a deterministic
//! grid simulator of a two-task search-and-rescue mission used to compare
//! RNE grouping against distance, energy and health baselines.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod grouping;
pub mod harness;
pub mod io;
pub mod needs;
pub mod sim;
pub mod trust;

pub use error::{Error, Result};
