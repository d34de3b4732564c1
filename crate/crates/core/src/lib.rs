//! Performance model of a satellite-linked quantum information network:
//! entangled-pair delivery rate and Werner-state fidelity between two
//! metropolitan networks over one low-orbit pass, and the resulting budget of
//! teleported controlled-Z gates.
//!
//! - [`orbit`]: circular orbit, station elevation and slant range, dual visibility.
//! - [`channel`]: fibre and downlink transmission.
//! - [`devices`]: source, memory, detector, BSM and converter models; Werner algebra.
//! - [`chain`]: elementary links, the repeater chain, pass simulation, Monte Carlo.
//! - [`teleport`]: Bell-basis check of the gate teleportation resource state.

pub mod chain;
pub mod channel;
pub mod devices;
mod error;
pub mod orbit;
pub mod teleport;

pub use chain::{ChainOptions, ChainTopology, SimulationSeries};
pub use devices::WernerState;
pub use error::{Error, Result};
pub use orbit::{EarthModel, GeodeticPoint, OrbitSpec, PassSample, VisibilityWindow};
pub use teleport::{gate_budget, GateBudget};
