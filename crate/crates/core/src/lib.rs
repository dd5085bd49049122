//! Reactive obstacle avoidance for a planar unicycle: a sliding-mode
//! boundary-following law, an idealized edge-pursuit baseline, a closed-loop
//! simulator, and route-length analysis.

pub mod analysis;
pub mod export;
pub mod geo;
pub mod par;
pub mod scenario;
pub mod pursuit;
pub mod sensing;
pub mod sim;
pub mod sliding;

pub use geo::{Obstacle, Scene, Shape, Transform, Vec2};
pub use par::Exec;
pub use sensing::{Pose, SensorConfig, SensorFrame};
pub use sim::{run, run_with, ControllerKind, Outcome, RunOptions, ScenarioSpec, SimConfig, Trajectory};
pub use sliding::{SlidingParams, ValidationReport};
