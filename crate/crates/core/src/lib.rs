//! Noisy max consensus over lossy networks: max-plus recursion, growth-rate
//! bounds and simulation, and a drift-compensated two-run algorithm.

pub mod bounds;
pub mod consensus;
pub mod error;
pub mod graph;
pub mod maxplus;
pub mod noise;
pub mod optimize;
pub mod quadrature;
pub mod sma;
pub mod stats;

pub use bounds::BoundsReport;
pub use consensus::{ConsensusResult, GrowthEstimate, RobustRun, StreamSeed, Trajectory};
pub use error::{Error, Result};
pub use graph::{Graph, GraphRealization};
pub use maxplus::{MaxPlusMatrix, StateVector};
pub use noise::{NoiseFamily, NoiseModel, RateFunctionValue};
