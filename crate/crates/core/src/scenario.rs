//! JSON scenario files, built-in presets and the random scene generator.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::{Obstacle, Scene, Transform, Vec2};
use crate::par::Exec;
use crate::sensing::{Pose, SensorConfig, DEFAULT_RAY_COUNT};
use crate::sim::{ScenarioSpec, SimConfig, SimError};
use crate::sliding::SlidingParams;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed scenario at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid scenario: {0}")]
    Invalid(#[from] SimError),
}

impl From<serde_json::Error> for ScenarioError {
    fn from(e: serde_json::Error) -> Self {
        ScenarioError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

fn default_ray_count() -> usize {
    DEFAULT_RAY_COUNT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SensorBlock {
    range: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    effective_range: Option<f64>,
    #[serde(default = "default_ray_count")]
    ray_count: usize,
    #[serde(default)]
    d_dot_smoothing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StartBlock {
    position: Vec2,
    theta: f64,
}

/// On-disk form of a [`ScenarioSpec`]. The range-rate period is not stored;
/// it always equals the controller period `1/ctrl_hz`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    scene: Scene,
    start: StartBlock,
    params: SlidingParams,
    sensor: SensorBlock,
    #[serde(default)]
    sim: SimConfig,
    #[serde(default)]
    theorem_mode: bool,
}

impl ScenarioFile {
    fn into_spec(self) -> Result<ScenarioSpec, ScenarioError> {
        let sensor = SensorConfig {
            range: self.sensor.range,
            effective_range: self.sensor.effective_range.unwrap_or(self.sensor.range),
            ray_count: self.sensor.ray_count,
            dt_ctrl: self.sim.period(),
            d_dot_smoothing: self.sensor.d_dot_smoothing,
        };
        let spec = ScenarioSpec {
            scene: self.scene,
            start: Pose::new(self.start.position, self.start.theta),
            params: self.params,
            sensor,
            sim: self.sim,
            theorem_mode: self.theorem_mode,
        };
        spec.params.check().map_err(SimError::from)?;
        spec.sim.check()?;
        spec.sensor.check().map_err(SimError::from)?;
        Ok(spec)
    }

    fn from_spec(spec: &ScenarioSpec) -> Self {
        let effective_range = (spec.sensor.effective_range != spec.sensor.range).then_some(spec.sensor.effective_range);
        ScenarioFile {
            scene: spec.scene.clone(),
            start: StartBlock { position: spec.start.position, theta: spec.start.theta },
            params: spec.params.clone(),
            sensor: SensorBlock {
                range: spec.sensor.range,
                effective_range,
                ray_count: spec.sensor.ray_count,
                d_dot_smoothing: spec.sensor.d_dot_smoothing,
            },
            sim: spec.sim.clone(),
            theorem_mode: spec.theorem_mode,
        }
    }
}

/// Parses a scenario and checks parameter, sensor and timing settings.
/// Geometric preconditions are left to the simulator.
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec, ScenarioError> {
    serde_json::from_str::<ScenarioFile>(text)?.into_spec()
}

pub fn load_scenario(path: &Path) -> Result<ScenarioSpec, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
    parse_scenario(&text)
}

pub fn scenario_to_json(spec: &ScenarioSpec) -> String {
    serde_json::to_string_pretty(&ScenarioFile::from_spec(spec)).expect("scenario serializes")
}

pub fn save_scenario(spec: &ScenarioSpec, path: &Path) -> Result<(), ScenarioError> {
    std::fs::write(path, scenario_to_json(spec) + "\n")
        .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })
}

fn sensor(range: f64, ctrl_hz: f64) -> SensorConfig {
    SensorConfig::new(range, range, DEFAULT_RAY_COUNT, 1.0 / ctrl_hz).expect("preset sensor is valid")
}

/// Parameters shared by the theorem presets and the random scenes
/// (`R = 2/3`).
pub fn theorem_params() -> SlidingParams {
    SlidingParams {
        v: 1.0,
        u_max: 1.5,
        d_safe: 0.3,
        d_tar: 2.0,
        d_trig: 2.35,
        epsilon: 0.2,
        l: 1.0,
        k: 0.5,
        beta_tol: 0.01,
        capture_radius: 0.5,
        initial_gamma: 1,
        sgn_layer: None,
    }
}

pub const THEOREM_RANGE: f64 = 5.0;

/// No obstacles, target 10 m straight ahead.
pub fn empty_straight() -> ScenarioSpec {
    let sim = SimConfig::default();
    ScenarioSpec {
        scene: Scene::empty(Vec2::new(10.0, 0.0)),
        start: Pose::new(Vec2::ZERO, 0.0),
        params: theorem_params(),
        sensor: sensor(THEOREM_RANGE, sim.ctrl_hz),
        sim,
        theorem_mode: true,
    }
}

/// One disc of radius 2 on the start-target line, slightly off-centre so
/// the bypass side is not a tie.
pub fn theorem_disc() -> ScenarioSpec {
    let sim = SimConfig::default();
    let disc = Obstacle::disc(Vec2::new(12.0, 0.3), 2.0).expect("valid disc");
    ScenarioSpec {
        scene: Scene::new(vec![disc], Vec2::new(25.0, 0.0)).expect("valid scene"),
        start: Pose::new(Vec2::ZERO, 0.0),
        params: theorem_params(),
        sensor: sensor(THEOREM_RANGE, sim.ctrl_hz),
        sim,
        theorem_mode: true,
    }
}

/// Single disc with every validator inequality met by a wide margin.
pub fn passing_fixture() -> ScenarioSpec {
    let sim = SimConfig::default();
    let params = SlidingParams {
        v: 1.0,
        u_max: 1.0,
        d_safe: 0.5,
        d_tar: 1.5,
        d_trig: 3.5,
        epsilon: 0.1,
        l: 0.1,
        k: 1.0,
        ..theorem_params()
    };
    ScenarioSpec {
        scene: Scene::new(vec![Obstacle::disc(Vec2::ZERO, 2.0).expect("valid disc")], Vec2::new(22.0, 0.0))
            .expect("valid scene"),
        start: Pose::new(Vec2::new(-20.0, 0.5), 0.0),
        params,
        sensor: sensor(10.0, sim.ctrl_hz),
        sim,
        theorem_mode: false,
    }
}

/// Reference gain set (v 1.5, u_max 1.3, l 0.33, k 15) that violates the
/// gain condition. `d_safe`, `ε` and the sensor range are not part of the
/// set and are 1, 1 and 20 m.
pub fn table_params() -> ScenarioSpec {
    let sim = SimConfig::default();
    let params = SlidingParams {
        v: 1.5,
        u_max: 1.3,
        d_safe: 1.0,
        d_tar: 5.0,
        d_trig: 10.0,
        epsilon: 1.0,
        l: 0.33,
        k: 15.0,
        ..theorem_params()
    };
    ScenarioSpec {
        scene: Scene::new(vec![Obstacle::disc(Vec2::new(30.0, 1.0), 5.0).expect("valid disc")], Vec2::new(60.0, 0.0))
            .expect("valid scene"),
        start: Pose::new(Vec2::ZERO, 0.0),
        params,
        sensor: sensor(20.0, sim.ctrl_hz),
        sim,
        theorem_mode: false,
    }
}

pub const PRESETS: [&str; 4] = ["empty", "disc", "fixture", "table"];

pub fn preset(name: &str) -> Option<ScenarioSpec> {
    match name {
        "empty" => Some(empty_straight()),
        "disc" => Some(theorem_disc()),
        "fixture" => Some(passing_fixture()),
        "table" => Some(table_params()),
        _ => None,
    }
}

/// Draws one candidate: 1–3 discs of radius 1–3 near the straight line to
/// a target 20–40 m away, the whole picture rotated by a random angle.
fn candidate(rng: &mut ChaCha8Rng) -> Option<ScenarioSpec> {
    let n = rng.gen_range(1..=3);
    let dist = rng.gen_range(20.0..40.0);
    let mut obstacles = Vec::with_capacity(n);
    for _ in 0..n {
        let r = rng.gen_range(1.0..3.0);
        let along = rng.gen_range(0.2..0.8) * dist;
        let across = rng.gen_range(-0.9..0.9) * r;
        obstacles.push(Obstacle::disc(Vec2::new(along, across), r).ok()?);
    }
    let t = Transform::rigid(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI), Vec2::ZERO);
    let scene = Scene::new(obstacles, Vec2::new(dist, 0.0)).ok()?.transformed(&t);
    let sim = SimConfig::default();
    Some(ScenarioSpec {
        scene,
        start: Pose::new(Vec2::ZERO, 0.0).transformed(&t),
        params: theorem_params(),
        sensor: sensor(THEOREM_RANGE, sim.ctrl_hz),
        sim,
        theorem_mode: true,
    })
}

/// Random scene that passes validation and meets the start preconditions.
pub fn random_theorem_scenario(seed: u64) -> ScenarioSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let Some(spec) = candidate(&mut rng) else { continue };
        if spec.check().is_ok() && spec.validate(Exec::Sequential).all_pass() {
            return spec;
        }
    }
}
