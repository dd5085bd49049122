//! Simulated scanning range sensor.
//!
//! The scan reports the exact distance to the nearest obstacle (continuous
//! scanning is idealized), plus a fan of rays used to find the angular edges
//! of the visible part of that obstacle.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::{cast_unit, scene_distance, wrap_angle, Scene, Transform, Vec2};
use crate::par::Exec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensingError {
    #[error("sensor range must be finite and > 0, got {0}")]
    BadRange(f64),
    #[error("effective range must lie in (0, range], got {0}")]
    BadEffectiveRange(f64),
    #[error("ray_count must be at least 16, got {0}")]
    TooFewRays(usize),
    #[error("controller period must be > 0, got {0}")]
    BadPeriod(f64),
    #[error("range-rate smoothing must lie in [0, 1), got {0}")]
    BadSmoothing(f64),
    #[error("vehicle is at the target; bearing undefined")]
    AtTarget,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec2,
    pub theta: f64,
}

impl Pose {
    pub fn new(position: Vec2, theta: f64) -> Self {
        Pose { position, theta: wrap_angle(theta) }
    }

    pub fn heading(&self) -> Vec2 {
        Vec2::from_angle(self.theta)
    }

    pub fn transformed(&self, t: &Transform) -> Pose {
        Pose { position: t.apply(self.position), theta: t.apply_heading(self.theta) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorConfig {
    /// Physical sensor range `L`.
    pub range: f64,
    /// Range `L_des ≤ L` beyond which observations are ignored.
    pub effective_range: f64,
    pub ray_count: usize,
    /// Controller period used for range-rate differencing.
    pub dt_ctrl: f64,
    /// Exponential smoothing of the range rate; 0 disables it.
    pub d_dot_smoothing: f64,
}

pub const DEFAULT_RAY_COUNT: usize = 720;

impl SensorConfig {
    pub fn new(range: f64, effective_range: f64, ray_count: usize, dt_ctrl: f64) -> Result<Self, SensingError> {
        let cfg = SensorConfig { range, effective_range, ray_count, dt_ctrl, d_dot_smoothing: 0.0 };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), SensingError> {
        if !(self.range > 0.0 && self.range.is_finite()) {
            return Err(SensingError::BadRange(self.range));
        }
        if !(self.effective_range > 0.0 && self.effective_range <= self.range) {
            return Err(SensingError::BadEffectiveRange(self.effective_range));
        }
        if self.ray_count < 16 {
            return Err(SensingError::TooFewRays(self.ray_count));
        }
        if !(self.dt_ctrl > 0.0 && self.dt_ctrl.is_finite()) {
            return Err(SensingError::BadPeriod(self.dt_ctrl));
        }
        if !(0.0..1.0).contains(&self.d_dot_smoothing) {
            return Err(SensingError::BadSmoothing(self.d_dot_smoothing));
        }
        Ok(())
    }

    pub fn ray_spacing(&self) -> f64 {
        TAU / self.ray_count as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RayHit {
    pub distance: f64,
    pub obstacle: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensorFrame {
    /// Distance to the nearest obstacle, `+∞` beyond the effective range.
    pub d: f64,
    pub d_dot: f64,
    /// Clockwise-most vehicle-frame angle at which the nearest obstacle is
    /// seen; the minimum unless the visible part straddles `±π`.
    pub phi_l: Option<f64>,
    /// Counter-clockwise-most angle, the maximum in the same sense.
    pub phi_r: Option<f64>,
    pub beta: f64,
    pub nearest_obstacle: Option<usize>,
    pub ray_hits: Vec<Option<RayHit>>,
}

/// Vehicle-frame angle of ray `i` out of `n`, uniformly covering `[-π, π)`.
pub fn ray_angle(i: usize, n: usize) -> f64 {
    -PI + TAU * i as f64 / n as f64
}

/// Signed angle from the heading to the target, positive to the left.
pub fn target_bearing(pose: &Pose, target: Vec2) -> Result<f64, SensingError> {
    let rel = target - pose.position;
    if rel.norm_sq() == 0.0 {
        return Err(SensingError::AtTarget);
    }
    Ok(wrap_angle(rel.angle() - pose.theta))
}

/// One sensor sweep, differencing against the previous distance over the
/// configured controller period.
pub fn scan(pose: &Pose, scene: &Scene, cfg: &SensorConfig, prev_d: Option<f64>) -> SensorFrame {
    scan_with(Exec::default(), pose, scene, cfg, prev_d, cfg.dt_ctrl)
}

/// [`scan`] with an explicit executor and differencing interval.
pub fn scan_with(
    exec: Exec,
    pose: &Pose,
    scene: &Scene,
    cfg: &SensorConfig,
    prev_d: Option<f64>,
    elapsed: f64,
) -> SensorFrame {
    let n = cfg.ray_count;
    let range = cfg.effective_range;
    let ray_hits = exec.map_range(n, 64, |i| {
        let dir = Vec2::from_angle(pose.theta + ray_angle(i, n));
        cast_unit(pose.position, dir, scene, range).map(|(distance, obstacle)| RayHit { distance, obstacle })
    });

    let (exact, nearest) = scene_distance(pose.position, scene);
    let (d, nearest) = if exact <= range { (exact, nearest) } else { (f64::INFINITY, None) };

    let (phi_l, phi_r) = match nearest {
        Some(idx) => {
            let (lo, hi) = visible_edges(pose, scene, range, idx, &ray_hits, EdgeSide::Inner)
                .unwrap_or_else(|| {
                    let a = nearest_point_angle(pose, scene, idx);
                    (a, a)
                });
            (Some(lo), Some(hi))
        }
        None => (None, None),
    };

    let d_dot = match prev_d {
        Some(p) if p.is_finite() && d.is_finite() && elapsed > 0.0 => (d - p) / elapsed,
        _ => 0.0,
    };
    let beta = target_bearing(pose, scene.target()).unwrap_or(0.0);

    SensorFrame { d, d_dot, phi_l, phi_r, beta, nearest_obstacle: nearest, ray_hits }
}

/// Which side of a refined edge to report: the last angle that still sees
/// the obstacle, or the first one that does not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeSide {
    Inner,
    Outer,
}

fn nearest_point_angle(pose: &Pose, scene: &Scene, obstacle: usize) -> f64 {
    let near = scene.obstacles()[obstacle].closest_point(pose.position) - pose.position;
    wrap_angle(near.angle() - pose.theta)
}

/// Clockwise and counter-clockwise extremes of the rays that see
/// `obstacle` within `range`, both refined by bisection against single-ray
/// casts and wrapped to `(−π, π]`. Extremes are taken relative to the
/// direction of the nearest obstacle point, around which the visible part
/// of a convex obstacle spans less than `π`; when it straddles the
/// backward direction the clockwise edge can carry the larger angle.
/// `None` when no ray sees the obstacle.
pub fn visible_edges(
    pose: &Pose,
    scene: &Scene,
    range: f64,
    obstacle: usize,
    ray_hits: &[Option<RayHit>],
    side: EdgeSide,
) -> Option<(f64, f64)> {
    let n = ray_hits.len();
    let center = nearest_point_angle(pose, scene, obstacle);
    let mut extremes: Option<((f64, usize), (f64, usize))> = None;
    for (i, h) in ray_hits.iter().enumerate() {
        if !h.is_some_and(|h| h.obstacle == obstacle) {
            continue;
        }
        let rel = wrap_angle(ray_angle(i, n) - center);
        extremes = Some(match extremes {
            None => ((rel, i), (rel, i)),
            Some((lo, hi)) => (if rel < lo.0 { (rel, i) } else { lo }, if rel > hi.0 { (rel, i) } else { hi }),
        });
    }
    let ((_, first), (_, last)) = extremes?;
    let hits_at = |a: f64| {
        let dir = Vec2::from_angle(pose.theta + a);
        cast_unit(pose.position, dir, scene, range).is_some_and(|(_, o)| o == obstacle)
    };
    let step = TAU / n as f64;
    let (a_lo, a_hi) = (ray_angle(first, n), ray_angle(last, n));
    let lo = refine_edge(a_lo - step, a_lo, &hits_at, side);
    let hi = refine_edge(a_hi + step, a_hi, &hits_at, side);
    Some((wrap_angle(lo), wrap_angle(hi)))
}

/// Bisects between a missing and a hitting angle.
fn refine_edge(mut miss: f64, mut hit: f64, hits_at: &impl Fn(f64) -> bool, side: EdgeSide) -> f64 {
    for _ in 0..48 {
        let mid = 0.5 * (miss + hit);
        if mid == miss || mid == hit {
            break;
        }
        if hits_at(mid) {
            hit = mid;
        } else {
            miss = mid;
        }
    }
    match side {
        EdgeSide::Inner => hit,
        EdgeSide::Outer => miss,
    }
}

/// Optional exponential smoothing of the differenced range rate.
#[derive(Debug, Clone, Default)]
pub struct RangeRateFilter {
    smoothing: f64,
    last: Option<f64>,
}

impl RangeRateFilter {
    pub fn new(smoothing: f64) -> Self {
        RangeRateFilter { smoothing, last: None }
    }

    pub fn apply(&mut self, frame: &mut SensorFrame) {
        if self.smoothing == 0.0 || !frame.d.is_finite() {
            self.last = None;
            return;
        }
        let rate = match self.last {
            Some(prev) => self.smoothing * prev + (1.0 - self.smoothing) * frame.d_dot,
            None => frame.d_dot,
        };
        frame.d_dot = rate;
        self.last = Some(rate);
    }
}
