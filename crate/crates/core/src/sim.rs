//! Closed-loop simulation: exact-arc unicycle integration, a sampled
//! controller with zero-order hold, safety monitoring at physics rate, and
//! trajectory recording.
//!
//! Mode switches of the sliding-mode law are also checked at physics rate.
//! When a physics step meets a switching condition (`d` dropping through
//! `d_trig` in mode A, or `|β| ≤ beta_tol ∧ d ≤ d_tar + ε` in mode B), the
//! controller runs an extra tick at that instant. Without this, the narrow
//! `β ≈ 0` window is routinely stepped over between 5 Hz ticks.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::{scene_distance, wrap_angle, Scene, Transform};
use crate::par::Exec;
use crate::pursuit::{pursuit_step, PursuitState};
use crate::sensing::{scan_with, target_bearing, Pose, RangeRateFilter, SensingError, SensorConfig};
use crate::sliding::{
    check_target_reached, step, validate_with, ControllerState, Mode, ParamError, SlidingParams, ValidationReport,
    DEFAULT_NON_BLOCKING_SAMPLES,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("start position lies inside obstacle {0}")]
    StartInsideObstacle(usize),
    #[error("invalid parameters: {0}")]
    Params(#[from] ParamError),
    #[error("invalid sensor: {0}")]
    Sensor(#[from] SensingError),
    #[error("invalid simulation settings: {0}")]
    Settings(String),
    #[error("start violates the convergence preconditions: {0}")]
    Preconditions(String),
    #[error("validation failed:\n{0}")]
    Validation(Box<ValidationReport>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    Sliding,
    Pursuit,
}

fn default_dt() -> f64 {
    0.01
}

fn default_hz() -> f64 {
    5.0
}

fn default_controller() -> ControllerKind {
    ControllerKind::Sliding
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default = "default_dt")]
    pub dt_physics: f64,
    #[serde(default = "default_hz")]
    pub ctrl_hz: f64,
    /// Defaults to ten times the straight-line travel time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_time: Option<f64>,
    #[serde(default = "default_controller")]
    pub controller: ControllerKind,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { dt_physics: default_dt(), ctrl_hz: default_hz(), max_time: None, controller: default_controller() }
    }
}

impl SimConfig {
    pub fn period(&self) -> f64 {
        1.0 / self.ctrl_hz
    }

    pub fn check(&self) -> Result<(), SimError> {
        if !(self.dt_physics > 0.0 && self.ctrl_hz > 0.0 && self.dt_physics.is_finite() && self.ctrl_hz.is_finite()) {
            return Err(SimError::Settings("dt_physics and ctrl_hz must be finite and > 0".into()));
        }
        if self.dt_physics > self.period() * (1.0 + 1e-12) {
            return Err(SimError::Settings(format!(
                "dt_physics {} exceeds the controller period {}",
                self.dt_physics,
                self.period()
            )));
        }
        if let Some(t) = self.max_time {
            if !(t > 0.0 && t.is_finite()) {
                return Err(SimError::Settings(format!("max_time must be > 0, got {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub scene: Scene,
    pub start: Pose,
    pub params: SlidingParams,
    pub sensor: SensorConfig,
    pub sim: SimConfig,
    /// Require the convergence preconditions at the start pose.
    #[serde(default)]
    pub theorem_mode: bool,
}

impl ScenarioSpec {
    pub fn check(&self) -> Result<(), SimError> {
        self.params.check()?;
        self.sensor.check()?;
        self.sim.check()?;
        if let (0.0, Some(i)) = scene_distance(self.start.position, &self.scene) {
            return Err(SimError::StartInsideObstacle(i));
        }
        if self.theorem_mode {
            self.check_preconditions()?;
        }
        Ok(())
    }

    /// Start away from the target, heading at it, at least `d_trig` from
    /// every obstacle.
    pub fn check_preconditions(&self) -> Result<(), SimError> {
        let target = self.scene.target();
        if self.start.position == target {
            return Err(SimError::Preconditions("start coincides with the target".into()));
        }
        let beta = target_bearing(&self.start, target).unwrap_or(0.0);
        if beta.abs() > self.params.beta_tol {
            return Err(SimError::Preconditions(format!("initial bearing {beta} exceeds beta_tol")));
        }
        let d0 = scene_distance(self.start.position, &self.scene).0;
        if d0 < self.params.d_trig {
            return Err(SimError::Preconditions(format!("initial distance {d0} is below d_trig")));
        }
        Ok(())
    }

    pub fn max_time(&self) -> f64 {
        self.sim
            .max_time
            .unwrap_or_else(|| 10.0 * self.start.position.dist(self.scene.target()) / self.params.v)
    }

    pub fn transformed(&self, t: &Transform) -> ScenarioSpec {
        let mut out = self.clone();
        out.scene = self.scene.transformed(t);
        out.start = self.start.transformed(t);
        if t.reflect {
            out.params.initial_gamma = -out.params.initial_gamma;
        }
        out
    }

    pub fn validate(&self, exec: Exec) -> ValidationReport {
        validate_with(exec, &self.scene, &self.params, &self.sensor, DEFAULT_NON_BLOCKING_SAMPLES)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModeTag {
    A,
    B,
    Straight,
    Pursuit,
}

impl ModeTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeTag::A => "A",
            ModeTag::B => "B",
            ModeTag::Straight => "S",
            ModeTag::Pursuit => "P",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub pose: Pose,
    pub u: f64,
    pub d: f64,
    pub beta: f64,
    pub mode: ModeTag,
    /// Bypass side: `Γ` for the sliding law, `+1` right / `−1` left while
    /// pursuing, `0` in straight pursuit flight.
    pub gamma: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Outcome {
    TargetReached { t_f: f64 },
    Timeout { t: f64 },
    SafetyViolated { t: f64, d: f64 },
    ControllerFault { t: f64, reason: String },
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::TargetReached { .. } => 0,
            Outcome::Timeout { .. } => 3,
            Outcome::SafetyViolated { .. } => 4,
            Outcome::ControllerFault { .. } => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    /// One sample per controller tick plus a terminal sample.
    pub samples: Vec<Sample>,
    pub outcome: Outcome,
    pub speed: f64,
    /// Smallest obstacle distance seen at any physics step.
    pub min_distance: f64,
    pub obstacle_lost_ticks: usize,
    pub discontinuities: usize,
    pub validation: ValidationReport,
}

impl Trajectory {
    /// Maximal runs of consecutive mode-B samples, as index ranges.
    pub fn mode_b_intervals(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, s) in self.samples.iter().enumerate() {
            match (s.mode == ModeTag::B, start) {
                (true, None) => start = Some(i),
                (false, Some(b)) => {
                    out.push(b..i);
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(b) = start {
            out.push(b..self.samples.len());
        }
        out
    }
}

/// Exact flow of the unicycle over `dt` with constant `u`.
pub fn integrate_arc(pose: &Pose, v: f64, u: f64, dt: f64) -> Pose {
    let p = pose.position;
    if u == 0.0 {
        return Pose { position: p + pose.heading() * (v * dt), theta: pose.theta };
    }
    let th0 = pose.theta;
    let th1 = th0 + u * dt;
    let r = v / u;
    let position = crate::geo::Vec2::new(p.x + r * (th1.sin() - th0.sin()), p.y - r * (th1.cos() - th0.cos()));
    Pose { position, theta: wrap_angle(th1) }
}

/// Length of the recorded path; the speed is constant, so this is
/// `v · (t_end − t_0)`.
pub fn path_length(traj: &Trajectory) -> f64 {
    match (traj.samples.first(), traj.samples.last()) {
        (Some(a), Some(b)) => traj.speed * (b.t - a.t),
        _ => 0.0,
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Refuse to run when validation fails.
    pub strict: bool,
    pub exec: Exec,
}

pub fn run(spec: &ScenarioSpec) -> Result<Trajectory, SimError> {
    run_with(spec, &RunOptions::default())
}

enum Ctrl {
    Sliding { state: ControllerState, lost_since: Option<f64> },
    Pursuit { state: PursuitState },
}

pub fn run_with(spec: &ScenarioSpec, opts: &RunOptions) -> Result<Trajectory, SimError> {
    spec.check()?;
    let validation = spec.validate(opts.exec);
    if opts.strict && !validation.all_pass() {
        return Err(SimError::Validation(Box::new(validation)));
    }

    let scene = &spec.scene;
    let target = scene.target();
    let p = &spec.params;
    let range = spec.sensor.effective_range;
    let dt = spec.sim.dt_physics;
    let period = spec.sim.period();
    let max_time = spec.max_time();
    let max_steps = (max_time / dt).ceil() as u64;
    // persistent loss of the obstacle in mode B for a full turn is a fault
    let lost_limit = TAU / p.u_max;

    let mut ctrl = match spec.sim.controller {
        ControllerKind::Sliding => Ctrl::Sliding { state: ControllerState::new(p), lost_since: None },
        ControllerKind::Pursuit => Ctrl::Pursuit { state: PursuitState::StraightToTarget },
    };
    let mut filter = RangeRateFilter::new(spec.sensor.d_dot_smoothing);
    let mut pose = spec.start;
    let mut u = 0.0;
    let mut samples = Vec::new();
    let mut last_tick: Option<(f64, f64)> = None;
    let mut next_tick = 0_u64;
    let mut event = false;
    let mut lost_ticks = 0;
    let mut discontinuities = 0;
    let (d0, _) = scene_distance(pose.position, scene);
    let mut min_distance = d0;
    let mut prev_phys_d = if d0 <= range { d0 } else { f64::INFINITY };
    let mut step_i = 0_u64;

    let tag = |ctrl: &Ctrl| match ctrl {
        Ctrl::Sliding { state, .. } => (
            match state.mode {
                Mode::A => ModeTag::A,
                Mode::B => ModeTag::B,
            },
            state.gamma.value(),
        ),
        Ctrl::Pursuit { state } => match state {
            PursuitState::StraightToTarget => (ModeTag::Straight, 0),
            PursuitState::EdgePursuit { side, .. } => (ModeTag::Pursuit, side.sign()),
        },
    };

    let outcome = loop {
        let t = step_i as f64 * dt;
        let regular = t >= next_tick as f64 * period - 1e-9 * dt;
        if regular || event {
            if regular {
                next_tick += 1;
            }
            event = false;
            let (prev_d, elapsed) = match last_tick {
                Some((tp, dp)) => (Some(dp), t - tp),
                None => (None, period),
            };
            let mut frame = scan_with(opts.exec, &pose, scene, &spec.sensor, prev_d, elapsed);
            filter.apply(&mut frame);
            match &mut ctrl {
                Ctrl::Sliding { state, lost_since } => {
                    let cmd = step(&frame, state, p);
                    *state = cmd.state;
                    u = cmd.u;
                    if cmd.obstacle_lost {
                        lost_ticks += 1;
                        let since = *lost_since.get_or_insert(t);
                        if t - since > lost_limit {
                            break Outcome::ControllerFault { t, reason: "obstacle lost during bypass".into() };
                        }
                    } else {
                        *lost_since = None;
                    }
                }
                Ctrl::Pursuit { state } => {
                    let cmd = pursuit_step(&frame, &pose, scene, target, *state, range);
                    if !cmd.heading.is_finite() {
                        break Outcome::ControllerFault { t, reason: "non-finite heading command".into() };
                    }
                    if cmd.discontinuity {
                        discontinuities += 1;
                    }
                    u = wrap_angle(cmd.heading - pose.theta) / period;
                    pose.theta = cmd.heading;
                    *state = cmd.state;
                }
            }
            let (mode, gamma) = tag(&ctrl);
            samples.push(Sample { t, pose, u, d: frame.d, beta: frame.beta, mode, gamma });
            last_tick = Some((t, frame.d));
        }

        if step_i >= max_steps {
            break Outcome::Timeout { t };
        }
        let turn = match ctrl {
            Ctrl::Sliding { .. } => u,
            Ctrl::Pursuit { .. } => 0.0,
        };
        pose = integrate_arc(&pose, p.v, turn, dt);
        step_i += 1;
        let t = step_i as f64 * dt;

        let (d, _) = scene_distance(pose.position, scene);
        min_distance = min_distance.min(d);
        if d < p.d_safe {
            break Outcome::SafetyViolated { t, d };
        }
        if check_target_reached(&pose, target, p) {
            break Outcome::TargetReached { t_f: t };
        }

        let d_eff = if d <= range { d } else { f64::INFINITY };
        if let Ctrl::Sliding { state, .. } = &ctrl {
            event = match state.mode {
                Mode::A => prev_phys_d > p.d_trig && d_eff <= p.d_trig,
                Mode::B => {
                    let beta = target_bearing(&pose, target).unwrap_or(0.0);
                    beta.abs() <= p.beta_tol && d_eff <= p.d_tar + p.epsilon
                }
            };
        }
        prev_phys_d = d_eff;
    };

    let t_end = match &outcome {
        Outcome::TargetReached { t_f } => *t_f,
        Outcome::Timeout { t } | Outcome::SafetyViolated { t, .. } | Outcome::ControllerFault { t, .. } => *t,
    };
    if samples.last().is_none_or(|s| s.t < t_end) {
        let (d, _) = scene_distance(pose.position, scene);
        let (mode, gamma) = tag(&ctrl);
        samples.push(Sample {
            t: t_end,
            pose,
            u,
            d: if d <= range { d } else { f64::INFINITY },
            beta: target_bearing(&pose, target).unwrap_or(0.0),
            mode,
            gamma,
        });
    }

    Ok(Trajectory {
        samples,
        outcome,
        speed: p.v,
        min_distance,
        obstacle_lost_ticks: lost_ticks,
        discontinuities,
        validation,
    })
}

/// Runs many scenarios; results come back in input order.
pub fn run_batch(specs: &[ScenarioSpec], opts: &RunOptions) -> Vec<Result<Trajectory, SimError>> {
    opts.exec.map_slice(specs, |s| run_with(s, opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::Vec2;
    use std::f64::consts::PI;

    fn rk4(pose: &Pose, v: f64, u: f64, dt: f64, n: usize) -> Pose {
        let f = |s: [f64; 3]| [v * s[2].cos(), v * s[2].sin(), u];
        let mut s = [pose.position.x, pose.position.y, pose.theta];
        let h = dt / n as f64;
        for _ in 0..n {
            let k1 = f(s);
            let k2 = f([s[0] + h / 2.0 * k1[0], s[1] + h / 2.0 * k1[1], s[2] + h / 2.0 * k1[2]]);
            let k3 = f([s[0] + h / 2.0 * k2[0], s[1] + h / 2.0 * k2[1], s[2] + h / 2.0 * k2[2]]);
            let k4 = f([s[0] + h * k3[0], s[1] + h * k3[1], s[2] + h * k3[2]]);
            for j in 0..3 {
                s[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
        }
        Pose { position: Vec2::new(s[0], s[1]), theta: s[2] }
    }

    #[test]
    fn straight_and_half_circle() {
        let p = integrate_arc(&Pose::new(Vec2::ZERO, 0.0), 1.0, 0.0, 2.0);
        assert_eq!((p.position, p.theta), (Vec2::new(2.0, 0.0), 0.0));
        let p = integrate_arc(&Pose::new(Vec2::ZERO, 0.0), 1.0, 1.0, PI);
        assert!((p.position - Vec2::new(0.0, 2.0)).norm() < 1e-15);
        assert!((p.theta - PI).abs() < 1e-15);
    }

    #[test]
    fn arc_matches_rk4() {
        let start = Pose::new(Vec2::new(1.0, -2.0), 0.7);
        let exact = integrate_arc(&start, 1.3, -0.8, 0.5);
        let num = rk4(&start, 1.3, -0.8, 0.5, 200);
        assert!((exact.position - num.position).norm() < 1e-12);
        assert!((exact.theta - wrap_angle(num.theta)).abs() < 1e-12);
    }

    #[test]
    fn chord_relation() {
        let (v, u, dt) = (1.5, 1.3, 0.2);
        let p = integrate_arc(&Pose::new(Vec2::ZERO, 0.3), v, u, dt);
        let chord = 2.0 * (v / u) * (u * dt / 2.0).sin();
        assert!((p.position.norm() - chord).abs() < 1e-14);
        assert!(p.position.norm() < v * dt);
    }
}
