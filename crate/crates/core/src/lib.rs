//! Multi-UAV flying mobile edge computing (F-MEC) optimization laboratory.
//!
//! Ground users generate one task per time slot and either run it locally or
//! offload it to a UAV that carries compute. Two planners decide UAV motion and
//! user association:
//!
//! * [`cat`]: block coordinate descent alternating an exact branch-and-bound
//!   assignment with a successive-convex-approximation trajectory update.
//! * [`rat`]: DDPG with prioritized experience replay choosing per-slot UAV
//!   moves, with association delegated to the greedy [`matching`] algorithm.
//!
//! [`baselines`] holds the LE/RM/CM comparison policies and [`scenario`] the
//! seeded scenario generator shared by the CLI, the tests and the wasm demo.

pub mod baselines;
pub mod cat;
pub mod env;
pub mod error;
pub mod experiment;
pub mod kmeans;
pub mod matching;
pub mod model;
pub mod nn;
pub mod rat;
pub mod scenario;
pub mod trace;

pub use error::{Error, Result};
pub use model::{
    AtgChannelParams, Kinematics, Mode, Physics, PropulsionParams, SystemParams, Task, UavAction,
    UavState, UserEquipment, WorldState,
};
pub use scenario::{Scenario, ScenarioConfig};
