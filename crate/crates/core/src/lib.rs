//! Agent-based simulation of cumulative cultural evolution.
//!
//! Agents on a lattice invent new actions by mutating their current one,
//! imitate fitter neighbors, and learn trends that bias later inventions.
//! Actions can be chained into multi-step actions whose fitness grows with
//! length, which removes the fitness ceiling of single-step actions.
//!
//! * [`model`]: actions, chain validity, fitness and the exhaustive step space.
//! * [`agent`]: agent state, invention, imitation and trend learning.
//! * [`simulation`]: the lattice world and its iteration protocol.
//! * [`harness`]: multi-seed batches, experiment presets, CSV and SVG output.

pub mod agent;
pub mod harness;
pub mod model;
pub mod simulation;

pub use agent::{Agent, InventionParams, Position, TrendState};
pub use harness::{AggregateSeries, ExperimentKind, ExperimentSpec, HarnessError, Metric};
pub use model::{BodyPart, ChainedAction, Direction, Fitness, Step};
pub use simulation::{run, MetricsRecord, SimError, World, WorldConfig};
