//! Sliding-mode obstacle-avoidance law for a constant-speed unicycle.
//!
//! Mode `A` flies straight (`u = 0`); mode `B` bypasses the nearest obstacle
//! with `u = u_max·Γ·sgn(ḋ + χ(d − d_tar))`, which slides the vehicle onto
//! the surface `ḋ = −χ(d − d_tar)` and holds the distance at `d_tar`.
//! `Γ = +1` turns right on entry (obstacle kept on the left), `Γ = −1`
//! turns left.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::{fmt_len, neighborhood_boundary_samples, segment_distance_to_obstacle, wrap_angle, Scene, Vec2};
use crate::par::Exec;
use crate::sensing::{Pose, SensorConfig, SensorFrame};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{0} must be finite and > 0, got {1}")]
    NotPositive(&'static str, f64),
    #[error("d_safe must be finite and >= 0, got {0}")]
    BadSafety(f64),
    #[error("need d_safe < d_tar < d_trig, got {0} / {1} / {2}")]
    Ordering(f64, f64, f64),
    #[error("initial_gamma must be -1 or +1, got {0}")]
    BadGamma(i8),
}

fn default_beta_tol() -> f64 {
    0.01
}

fn default_capture_radius() -> f64 {
    0.5
}

fn default_gamma() -> i8 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlidingParams {
    /// Cruise speed, m/s.
    pub v: f64,
    /// Turn-rate bound, rad/s.
    pub u_max: f64,
    pub d_safe: f64,
    pub d_tar: f64,
    pub d_trig: f64,
    pub epsilon: f64,
    /// Slope of the saturated surface term, 1/s.
    pub l: f64,
    /// Saturation width of the surface term, m.
    pub k: f64,
    /// Heading-to-target tolerance standing in for `β = 0`.
    #[serde(default = "default_beta_tol")]
    pub beta_tol: f64,
    #[serde(default = "default_capture_radius")]
    pub capture_radius: f64,
    #[serde(default = "default_gamma")]
    pub initial_gamma: i8,
    /// Optional boundary layer replacing `sgn` by a saturated ramp.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sgn_layer: Option<f64>,
}

impl SlidingParams {
    pub fn check(&self) -> Result<(), ParamError> {
        for (name, x) in [
            ("v", self.v),
            ("u_max", self.u_max),
            ("epsilon", self.epsilon),
            ("l", self.l),
            ("k", self.k),
            ("beta_tol", self.beta_tol),
            ("capture_radius", self.capture_radius),
            ("d_tar", self.d_tar),
            ("d_trig", self.d_trig),
        ] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(ParamError::NotPositive(name, x));
            }
        }
        if let Some(w) = self.sgn_layer {
            if !(w > 0.0 && w.is_finite()) {
                return Err(ParamError::NotPositive("sgn_layer", w));
            }
        }
        if !(self.d_safe >= 0.0 && self.d_safe.is_finite()) {
            return Err(ParamError::BadSafety(self.d_safe));
        }
        if !(self.d_safe < self.d_tar && self.d_tar < self.d_trig) {
            return Err(ParamError::Ordering(self.d_safe, self.d_tar, self.d_trig));
        }
        if self.initial_gamma != 1 && self.initial_gamma != -1 {
            return Err(ParamError::BadGamma(self.initial_gamma));
        }
        Ok(())
    }

    /// Minimal turning radius `v / u_max`.
    pub fn turning_radius(&self) -> f64 {
        self.v / self.u_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gamma {
    /// Turn left on entry, keeping the obstacle on the right.
    Minus,
    /// Turn right on entry, keeping the obstacle on the left.
    Plus,
}

impl Gamma {
    pub fn from_sign(s: i8) -> Gamma {
        if s < 0 {
            Gamma::Minus
        } else {
            Gamma::Plus
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Gamma::Minus => -1,
            Gamma::Plus => 1,
        }
    }

    pub fn flipped(self) -> Gamma {
        match self {
            Gamma::Minus => Gamma::Plus,
            Gamma::Plus => Gamma::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerState {
    pub mode: Mode,
    pub gamma: Gamma,
    pub prev_d: Option<f64>,
}

impl ControllerState {
    pub fn new(params: &SlidingParams) -> Self {
        ControllerState { mode: Mode::A, gamma: Gamma::from_sign(params.initial_gamma), prev_d: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Command {
    pub u: f64,
    pub state: ControllerState,
    /// Set when mode B runs without any obstacle in range.
    pub obstacle_lost: bool,
}

/// `sgn` with `sgn(0) = +1`.
pub fn sgn(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Linear function with saturation: `l·r` for `|r| < k`, else `l·k·sgn(r)`.
pub fn chi(r: f64, l: f64, k: f64) -> f64 {
    if r.abs() < k {
        l * r
    } else {
        l * k * sgn(r)
    }
}

/// Side toward the angularly nearer edge of the visible obstacle part:
/// `+1` (right) when the clockwise edge is nearer the heading, `−1` (left)
/// otherwise, including ties.
pub fn edge_side(phi_l: f64, phi_r: f64) -> Gamma {
    if wrap_angle(phi_l).abs() < wrap_angle(phi_r).abs() {
        Gamma::Plus
    } else {
        Gamma::Minus
    }
}

/// Side selection; holds the previous value unless `d_trig ≤ d < ∞`.
pub fn select_gamma(frame: &SensorFrame, state: &ControllerState, d_trig: f64) -> Gamma {
    match (frame.phi_l, frame.phi_r) {
        (Some(l), Some(r)) if d_trig <= frame.d && frame.d < f64::INFINITY => edge_side(l, r),
        _ => state.gamma,
    }
}

fn switching(x: f64, layer: Option<f64>) -> f64 {
    match layer {
        Some(w) => (x / w).clamp(-1.0, 1.0),
        None => sgn(x),
    }
}

/// One controller update.
pub fn step(frame: &SensorFrame, state: &ControllerState, params: &SlidingParams) -> Command {
    let mut next = *state;
    let crossed = frame.d <= params.d_trig && state.prev_d.is_none_or(|p| p > params.d_trig);
    match state.mode {
        Mode::A => {
            next.gamma = select_gamma(frame, state, params.d_trig);
            if crossed {
                // Γ is fixed by the frame at the crossing instant
                if let (Some(l), Some(r)) = (frame.phi_l, frame.phi_r) {
                    next.gamma = edge_side(l, r);
                }
                next.mode = Mode::B;
            }
        }
        Mode::B => {
            if frame.beta.abs() <= params.beta_tol && frame.d <= params.d_tar + params.epsilon {
                next.mode = Mode::A;
            }
        }
    }
    next.prev_d = Some(frame.d);

    let mut obstacle_lost = false;
    let u = match next.mode {
        Mode::A => 0.0,
        Mode::B => {
            let g = f64::from(next.gamma.value());
            let surface = if frame.d.is_finite() {
                frame.d_dot + chi(frame.d - params.d_tar, params.l, params.k)
            } else {
                obstacle_lost = true;
                chi(f64::INFINITY, params.l, params.k)
            };
            params.u_max * g * switching(surface, params.sgn_layer)
        }
    };
    Command { u, state: next, obstacle_lost }
}

/// Closed capture ball around the target.
pub fn check_target_reached(pose: &Pose, target: Vec2, params: &SlidingParams) -> bool {
    pose.position.dist(target) <= params.capture_radius
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// lhs < rhs
    Less,
    /// lhs > rhs
    Greater,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    /// Margin by which the inequality holds; positive iff it passes.
    pub slack: f64,
    pub pass: bool,
    pub note: Option<String>,
}

impl Condition {
    fn new(name: &'static str, lhs: f64, relation: Relation, rhs: f64) -> Self {
        let slack = match relation {
            Relation::Less => rhs - lhs,
            Relation::Greater => lhs - rhs,
        };
        let pass = match relation {
            Relation::Less => lhs < rhs,
            Relation::Greater => lhs > rhs,
        };
        // inf - inf: both sides unbounded means the bound is vacuous
        let slack = if slack.is_nan() { f64::INFINITY } else { slack };
        let pass = pass || (lhs.is_infinite() && rhs.is_infinite() && relation == Relation::Greater);
        Condition { name, lhs, rhs, relation, slack, pass, note: None }
    }

    fn vacuous(name: &'static str, note: &str) -> Self {
        Condition {
            name,
            lhs: f64::INFINITY,
            rhs: 0.0,
            relation: Relation::Greater,
            slack: f64::INFINITY,
            pass: true,
            note: Some(note.to_string()),
        }
    }

    fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub turning_radius: f64,
    pub min_curvature_radius: f64,
    pub conditions: Vec<Condition>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# R={} R_minus={}", fmt_len(self.turning_radius), fmt_len(self.min_curvature_radius))?;
        for c in &self.conditions {
            let rel = match c.relation {
                Relation::Less => "<",
                Relation::Greater => ">",
            };
            write!(
                f,
                "{} lhs={} {} rhs={} slack={} {}",
                c.name,
                fmt_len(c.lhs),
                rel,
                fmt_len(c.rhs),
                fmt_len(c.slack),
                if c.pass { "PASS" } else { "FAIL" }
            )?;
            if let Some(n) = &c.note {
                write!(f, " ({n})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub const DEFAULT_NON_BLOCKING_SAMPLES: usize = 256;

/// Evaluates every convergence assumption and parameter inequality.
/// Failures are report entries, never errors.
pub fn validate(scene: &Scene, params: &SlidingParams, sensor: &SensorConfig, samples: usize) -> ValidationReport {
    validate_with(Exec::default(), scene, params, sensor, samples)
}

pub fn validate_with(
    exec: Exec,
    scene: &Scene,
    params: &SlidingParams,
    sensor: &SensorConfig,
    samples: usize,
) -> ValidationReport {
    let r = params.turning_radius();
    let r_minus = scene.min_boundary_curvature_radius();
    let gap = scene.pairwise_obstacle_gap();
    let range = sensor.effective_range;
    let p = params;
    let mut out = Vec::new();

    if scene.obstacles().len() < 2 {
        out.push(Condition::vacuous("obstacle_spacing", "fewer than two obstacles"));
    } else {
        out.push(Condition::new("obstacle_spacing", gap, Relation::Greater, 2.0 * (3.0 * r + p.d_safe.max(r))));
    }
    out.push(Condition::new("sensor_range", range, Relation::Greater, 4.0 * r + r.max(p.d_safe)));
    out.push(Condition::new("target_clearance", scene.distance(scene.target()).0, Relation::Greater, p.d_safe.max(r)));
    out.push(Condition::new("d_tar_lower", p.d_tar, Relation::Greater, p.d_safe.max(r - r_minus)));
    out.push(Condition::new(
        "d_trig_lower",
        p.d_trig,
        Relation::Greater,
        (p.d_tar + p.epsilon).max(p.d_safe + 2.0 * r).max(3.0 * r),
    ));
    out.push(Condition::new("d_trig_upper", p.d_trig, Relation::Less, (range - 2.0 * r).min(0.5 * gap - r)));
    out.push(Condition::new("gain_condition", gain_condition_lhs(p, r_minus), Relation::Less, p.v / (p.l * p.k)));
    out.push(non_blocking(exec, scene, p, samples));

    ValidationReport { turning_radius: r, min_curvature_radius: r_minus, conditions: out }
}

/// Left side of the gain inequality; `+∞` when the effective radius does
/// not exceed the turning radius.
pub fn gain_condition_lhs(p: &SlidingParams, r_minus: f64) -> f64 {
    let r = p.turning_radius();
    let reach = p.d_tar.min(p.d_trig - 2.0 * r) + r_minus;
    if reach <= r {
        return f64::INFINITY;
    }
    let f = 1.0 - r / reach;
    (1.0 + p.l * p.l / (f * f * p.u_max * p.u_max)).sqrt()
}

/// Sampled non-blocking check: if a segment from `∂N[d_tar+ε, D_i]` to the
/// target enters `N[d_trig, D_j]`, every such `D_i` point must be farther
/// from the target than every `∂N[d_tar+ε, D_j]` point.
fn non_blocking(exec: Exec, scene: &Scene, p: &SlidingParams, samples: usize) -> Condition {
    const NAME: &str = "non_blocking";
    let obs = scene.obstacles();
    if obs.len() < 2 {
        return Condition::vacuous(NAME, "fewer than two obstacles");
    }
    let target = scene.target();
    let rings: Vec<Vec<Vec2>> = exec.map_slice(obs, |o| neighborhood_boundary_samples(o, p.d_tar + p.epsilon, samples));
    let near: Vec<f64> = rings.iter().map(|z| z.iter().map(|q| q.dist(target)).fold(f64::INFINITY, f64::min)).collect();
    let far: Vec<f64> = rings.iter().map(|z| z.iter().map(|q| q.dist(target)).fold(0.0, f64::max)).collect();

    let pairs: Vec<(usize, usize)> =
        (0..obs.len()).flat_map(|i| (0..obs.len()).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let worst = exec
        .map_slice(&pairs, |&(i, j)| {
            let blocks = rings[i].iter().any(|z| segment_distance_to_obstacle(*z, target, &obs[j]) <= p.d_trig);
            blocks.then(|| (near[i] - far[j], i, j))
        })
        .into_iter()
        .flatten()
        .min_by(|a, b| a.0.total_cmp(&b.0));

    match worst {
        None => Condition::vacuous(NAME, &format!("no obstructing pairs, {samples} samples per ring")),
        Some((_, i, j)) => Condition::new(NAME, near[i], Relation::Greater, far[j])
            .with_note(format!("worst pair ({i},{j}), {samples} samples per ring")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::Obstacle;

    fn params() -> SlidingParams {
        SlidingParams {
            v: 1.0,
            u_max: 1.0,
            d_safe: 0.5,
            d_tar: 1.5,
            d_trig: 3.5,
            epsilon: 0.1,
            l: 0.1,
            k: 1.0,
            beta_tol: 0.01,
            capture_radius: 0.5,
            initial_gamma: 1,
            sgn_layer: None,
        }
    }

    fn frame(d: f64, d_dot: f64, beta: f64, phi: Option<(f64, f64)>) -> SensorFrame {
        SensorFrame {
            d,
            d_dot,
            phi_l: phi.map(|p| p.0),
            phi_r: phi.map(|p| p.1),
            beta,
            nearest_obstacle: d.is_finite().then_some(0),
            ray_hits: Vec::new(),
        }
    }

    #[test]
    fn chi_values() {
        assert_eq!(chi(0.0, 0.33, 15.0), 0.0);
        assert!((chi(10.0, 0.33, 15.0) - 3.3).abs() < 1e-12);
        assert!((chi(-20.0, 0.33, 15.0) + 4.95).abs() < 1e-12);
        assert!((chi(15.0, 0.33, 15.0) - 4.95).abs() < 1e-12);
    }

    #[test]
    fn gamma_selection() {
        let st = ControllerState::new(&params());
        // right edge (min angle) nearer the heading: turn right
        assert_eq!(select_gamma(&frame(3.5, 0.0, 0.0, Some((-0.3, 0.5))), &st, 3.5), Gamma::Plus);
        assert_eq!(select_gamma(&frame(5.0, 0.0, 0.0, Some((-0.8, 0.2))), &st, 3.5), Gamma::Minus);
        assert_eq!(select_gamma(&frame(5.0, 0.0, 0.0, Some((-0.4, 0.4))), &st, 3.5), Gamma::Minus);
        let held = ControllerState { gamma: Gamma::Minus, ..st };
        assert_eq!(select_gamma(&frame(2.0, 0.0, 0.0, Some((-0.3, 0.5))), &held, 3.5), Gamma::Minus);
        assert_eq!(select_gamma(&frame(f64::INFINITY, 0.0, 0.0, None), &held, 3.5), Gamma::Minus);
    }

    #[test]
    fn mode_a_far_away() {
        let p = params();
        let st = ControllerState::new(&p);
        for beta in [0.0, 1.0, -2.0] {
            let c = step(&frame(f64::INFINITY, 0.0, beta, None), &st, &p);
            assert_eq!(c.u, 0.0);
            assert_eq!(c.state.mode, Mode::A);
        }
    }

    #[test]
    fn mode_b_law() {
        let p = params();
        let st = ControllerState { mode: Mode::B, gamma: Gamma::Plus, prev_d: Some(1.6) };
        let c = step(&frame(p.d_tar, -0.5, 0.3, Some((-0.3, 0.5))), &st, &p);
        assert_eq!(c.u, -p.u_max);
        assert_eq!(c.state.mode, Mode::B);
        // on the surface: argument 0 maps to +1
        let c = step(&frame(p.d_tar, 0.0, 0.3, Some((-0.3, 0.5))), &st, &p);
        assert_eq!(c.u, p.u_max);
    }

    #[test]
    fn exit_to_mode_a() {
        let p = params();
        let st = ControllerState { mode: Mode::B, gamma: Gamma::Plus, prev_d: Some(1.6) };
        let c = step(&frame(p.d_tar + p.epsilon / 2.0, 0.0, 0.0, Some((-0.3, 0.5))), &st, &p);
        assert_eq!(c.state.mode, Mode::A);
        assert_eq!(c.u, 0.0);
        // both conditions are needed
        let c = step(&frame(p.d_tar + 2.0 * p.epsilon, 0.0, 0.0, Some((-0.3, 0.5))), &st, &p);
        assert_eq!(c.state.mode, Mode::B);
        let c = step(&frame(p.d_tar, 0.0, 0.05, Some((-0.3, 0.5))), &st, &p);
        assert_eq!(c.state.mode, Mode::B);
    }

    #[test]
    fn trigger_on_downward_crossing_only() {
        let p = params();
        let st = ControllerState { prev_d: Some(3.6), ..ControllerState::new(&p) };
        let c = step(&frame(3.45, -0.5, 0.0, Some((-0.8, 0.2))), &st, &p);
        assert_eq!(c.state.mode, Mode::B);
        assert_eq!(c.state.gamma, Gamma::Minus);
        assert_eq!(c.u, p.u_max);

        // already below the threshold: no re-trigger
        let st = ControllerState { prev_d: Some(3.0), ..ControllerState::new(&p) };
        let c = step(&frame(2.9, -0.5, 0.0, Some((-0.8, 0.2))), &st, &p);
        assert_eq!(c.state.mode, Mode::A);

        // first frame already inside the trigger distance
        let st = ControllerState::new(&p);
        assert_eq!(step(&frame(3.0, 0.0, 0.0, Some((-0.3, 0.5))), &st, &p).state.mode, Mode::B);
    }

    #[test]
    fn lost_obstacle_holds_gamma() {
        let p = params();
        let st = ControllerState { mode: Mode::B, gamma: Gamma::Minus, prev_d: Some(3.0) };
        let c = step(&frame(f64::INFINITY, 0.0, 0.5, None), &st, &p);
        assert!(c.obstacle_lost);
        assert_eq!(c.u, -p.u_max);
        assert_eq!(c.state.gamma, Gamma::Minus);
    }

    #[test]
    fn boundary_layer() {
        let p = SlidingParams { sgn_layer: Some(0.2), ..params() };
        let st = ControllerState { mode: Mode::B, gamma: Gamma::Plus, prev_d: Some(1.6) };
        let c = step(&frame(p.d_tar, -0.05, 0.3, None), &st, &p);
        assert!((c.u + 0.25).abs() < 1e-12);
    }

    #[test]
    fn capture_ball() {
        let p = params();
        let t = Vec2::new(3.0, 4.0);
        assert!(check_target_reached(&Pose::new(t, 0.0), t, &p));
        assert!(check_target_reached(&Pose::new(Vec2::new(3.0, 3.5), 0.0), t, &p));
        assert!(!check_target_reached(&Pose::new(Vec2::new(3.0, 3.0), 0.0), t, &p));
    }

    #[test]
    fn param_checks() {
        assert!(params().check().is_ok());
        assert!(matches!(SlidingParams { d_tar: 4.0, ..params() }.check(), Err(ParamError::Ordering(..))));
        assert!(SlidingParams { initial_gamma: 0, ..params() }.check().is_err());
        assert!(SlidingParams { l: 0.0, ..params() }.check().is_err());
    }

    #[test]
    fn hand_evaluated_fixture_passes() {
        let p = params();
        let scene = Scene::new(vec![Obstacle::disc(Vec2::new(0.0, 0.0), 2.0).unwrap()], Vec2::new(22.0, 0.0)).unwrap();
        let sensor = SensorConfig::new(10.0, 10.0, 720, 0.2).unwrap();
        let rep = validate(&scene, &p, &sensor, 256);
        assert!(rep.all_pass(), "{rep}");
        let g = rep.get("gain_condition").unwrap();
        let expected = (1.0f64 + 0.01 / ((1.0 - 1.0 / 3.5f64).powi(2))).sqrt();
        assert!((g.lhs - expected).abs() < 1e-12);
        assert!((g.lhs - 1.0098).abs() < 1e-4);
        assert_eq!(g.rhs, 10.0);
        for c in &rep.conditions {
            assert!(c.slack > 0.0, "{}", c.name);
        }
    }

    #[test]
    fn touching_obstacles_fail_spacing() {
        let a = Obstacle::disc(Vec2::new(0.0, 0.0), 2.0).unwrap();
        let b = Obstacle::disc(Vec2::new(4.0, 0.0), 2.0).unwrap();
        let scene = Scene::new_unchecked(vec![a, b], Vec2::new(22.0, 0.0)).unwrap();
        let sensor = SensorConfig::new(10.0, 10.0, 720, 0.2).unwrap();
        let rep = validate(&scene, &params(), &sensor, 64);
        let c = rep.get("obstacle_spacing").unwrap();
        assert!(!c.pass && c.slack < 0.0);
        assert_eq!(c.lhs, 0.0);
    }

    #[test]
    fn non_blocking_detects_farther_blocker() {
        let p = params();
        let sensor = SensorConfig::new(10.0, 10.0, 720, 0.2).unwrap();
        // D_1 sits between D_0 and the target: allowed
        let a = Obstacle::disc(Vec2::new(0.0, 0.0), 2.0).unwrap();
        let b = Obstacle::disc(Vec2::new(14.0, 0.0), 2.0).unwrap();
        let good = Scene::new(vec![a.clone(), b.clone()], Vec2::new(28.0, 0.0)).unwrap();
        assert!(validate(&good, &p, &sensor, 128).get("non_blocking").unwrap().pass);
        // target right next to D_1: leaving D_0 heads into D_1's trigger zone
        // although parts of D_1's ring lie farther from the target than D_0's
        let b = Obstacle::disc(Vec2::new(10.0, 0.0), 2.0).unwrap();
        let bad = Scene::new(vec![a, b], Vec2::new(6.0, 3.0)).unwrap();
        assert!(!validate(&bad, &p, &sensor, 128).get("non_blocking").unwrap().pass);
    }
}
