//! Age of Information for half-duplex networks running slotted ALOHA.
//!
//! - [`graph`]: topologies, generators and the edge-list format.
//! - [`analysis`]: closed-form link success probabilities, average ages,
//!   objectives and gradients.
//! - [`optimizer`]: solvers for the optimal transmit probabilities.
//! - [`simulator`]: Monte Carlo simulation of the protocol.
//! - [`cli`]: the command-line front-end.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod graph;
pub mod optimizer;
pub mod simulator;

pub use analysis::{LinkMetric, LinkMetrics, NetworkParams, ObjectiveKind};
pub use error::{Error, Result};
pub use graph::{DirectedLink, Topology};
pub use optimizer::{SolveOptions, SolveResult};
pub use simulator::{SimConfig, SimResult};
