//! Exact algorithms for information exchange among energy-constrained mobile agents.
//!
//! All quantities are exact rationals ([`Scalar`]). Agents are numbered from 1.

pub mod dist_sim;
pub mod error;
pub mod graph_approx;
pub mod instance_gen;
pub mod line_broadcast;
pub mod line_carry;
pub mod line_convergecast;
pub mod model;
pub mod scalar;
pub mod strategy;

pub use error::{Error, Result};
pub use model::{load_configuration, Instance, LineConfig, Location, WeightedGraph, WeightedTree};
pub use scalar::{sc, Scalar};
pub use strategy::{simulate, Network, Strategy, TimedMove, Trace};
