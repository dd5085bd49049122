//! Path-length gap between the sliding-mode route and the edge-pursuit route
//! around a straight wall.
//!
//! Setup: the wall lies on the line `y = 0`, the vehicle approaches from
//! below. At point `B` its lateral offset is `y0` and the wall point `C` at
//! range `L` lies straight ahead. The sliding route goes `B → C` and then
//! along the wall to its end `D`; the pursuit route keeps heading at the
//! visible edge at range `L`, so its offset decays as `y(s) = y0·e^(−s/L)`.
//! Both routes share `L` of straight travel, which leaves
//!
//! ```text
//! Δ = ∫₀^{s_E} (1/√(1 − y²/L²) − 1) ds
//! ```
//!
//! where `s_E` is the pursuit arc length at which the tracked edge reaches
//! `D`. The edge advances as `dx_e/ds = 1/√(1 − y²/L²)`, so for a wall
//! extending `S` beyond `C` the integration stops where `∫₀^{s_E} dx_e = S`.
//!
//! Quadrature runs in `w` with `s = w²/L`, which removes the `1/√s`
//! singularity of the integrand at `y0 = L`.

use std::f64::consts::{FRAC_PI_2, LN_2};

use serde::Serialize;
use thiserror::Error;

use crate::geo::{Obstacle, Scene, Vec2};
use crate::par::Exec;
use crate::sensing::{Pose, SensorConfig};
use crate::sim::{run_with, ControllerKind, RunOptions, ScenarioSpec, SimConfig, SimError, Trajectory};
use crate::sliding::SlidingParams;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("range L must be finite and > 0, got {0}")]
    BadRange(f64),
    #[error("offset must satisfy 0 < |y0| <= L, got y0 = {y0} with L = {l}")]
    BadOffset { y0: f64, l: f64 },
    #[error("wall extent must be > 0, got {0}")]
    BadWall(f64),
    #[error("step must satisfy 0 < ds <= L/100, got {0}")]
    BadStep(f64),
    #[error("route simulation needs a finite wall")]
    InfiniteWall,
    #[error("route simulation failed: {0}")]
    Sim(#[from] SimError),
    #[error("{controller:?} route never passed the wall end (outcome {outcome})")]
    WallEndNotReached { controller: ControllerKind, outcome: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonScenario {
    pub l: f64,
    pub y0: f64,
    /// Wall length beyond `C`; `f64::INFINITY` for an unbounded wall.
    pub wall_extent: f64,
}

impl ComparisonScenario {
    pub fn new(l: f64, y0: f64, wall_extent: f64) -> Result<Self, AnalysisError> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(AnalysisError::BadRange(l));
        }
        if !(y0 != 0.0 && y0.abs() <= l) {
            return Err(AnalysisError::BadOffset { y0, l });
        }
        if wall_extent.is_nan() || wall_extent <= 0.0 {
            return Err(AnalysisError::BadWall(wall_extent));
        }
        Ok(ComparisonScenario { l, y0, wall_extent })
    }

    pub fn infinite(l: f64, y0: f64) -> Result<Self, AnalysisError> {
        Self::new(l, y0, f64::INFINITY)
    }
}

pub fn delta_closed_form_infinite(l: f64, y0: f64) -> Result<f64, AnalysisError> {
    let sc = ComparisonScenario::infinite(l, y0)?;
    let tau = (sc.y0.abs() / sc.l).min(1.0).asin();
    Ok(-2.0 * sc.l * (0.5 * tau).cos().ln())
}

/// The `L ln 2` ceiling on the gap.
pub fn delta_bound(l: f64) -> f64 {
    l * LN_2
}

pub const DEFAULT_STEP_FRACTION: f64 = 1e-4;

const TAIL_CUTOFF: f64 = 1e-12;

// Integrands in w, both already multiplied by ds/dw = 2w/L:
// the gap density and the edge-progress density.
fn densities(w: f64, l: f64, q2: f64) -> (f64, f64) {
    let a = 2.0 * w * w / (l * l);
    // 1 − q²e^(−a) without cancellation
    let one_minus = (1.0 - q2) - q2 * (-a).exp_m1();
    let jac = 2.0 * w / l;
    if one_minus <= 0.0 {
        // only at w = 0 with |y0| = L; limit of jac/√(one_minus) is √2
        return (std::f64::consts::SQRT_2, std::f64::consts::SQRT_2);
    }
    let r = one_minus.sqrt();
    let x = 1.0 - one_minus;
    let gap = jac * x / (r * (1.0 + r));
    (gap, jac / r)
}

fn simpson(a: f64, b: f64, f: impl Fn(f64) -> (f64, f64)) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let (fa, ga) = f(a);
    let (fm, gm) = f(m);
    let (fb, gb) = f(b);
    let h = (b - a) / 6.0;
    (h * (fa + 4.0 * fm + fb), h * (ga + 4.0 * gm + gb))
}

/// Composite Simpson quadrature of the gap with step `ds` (in the `w`
/// variable, which has length units).
pub fn delta_numeric(sc: &ComparisonScenario, ds: f64) -> Result<f64, AnalysisError> {
    let sc = ComparisonScenario::new(sc.l, sc.y0, sc.wall_extent)?;
    if !(ds > 0.0 && ds <= sc.l / 100.0) {
        return Err(AnalysisError::BadStep(ds));
    }
    let l = sc.l;
    let q2 = (sc.y0 / l).powi(2).min(1.0);
    let f = |w: f64| densities(w, l, q2);
    let mut delta = 0.0;
    let mut progress = 0.0;
    let mut a = 0.0_f64;
    loop {
        let b = a + ds;
        let (dd, dp) = simpson(a, b, f);
        if progress + dp >= sc.wall_extent {
            // the edge reaches the wall end inside [a, b]
            let (mut lo, mut hi) = (a, b);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if progress + simpson(a, mid, f).1 < sc.wall_extent {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            delta += simpson(a, 0.5 * (lo + hi), f).0;
            return Ok(delta);
        }
        delta += dd;
        progress += dp;
        a = b;
        if sc.wall_extent.is_infinite() {
            // gap density in s is ≈ q²e^(−2s/L)/2
            let s = b * b / l;
            if 0.5 * q2 * (-2.0 * s / l).exp() < TAIL_CUTOFF {
                return Ok(delta);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaRow {
    pub y0_over_l: f64,
    pub delta_numeric_over_l: f64,
    /// Closed form for an unbounded wall.
    pub delta_closed_over_l: f64,
    /// `L ln 2 − Δ_numeric`, in units of `L`.
    pub bound_slack: f64,
}

pub fn delta_table(
    exec: Exec,
    l: f64,
    y0_fractions: &[f64],
    wall_extent: f64,
    ds: f64,
) -> Result<Vec<DeltaRow>, AnalysisError> {
    exec.map_slice(y0_fractions, |&q| {
        let sc = ComparisonScenario::new(l, q * l, wall_extent)?;
        let num = delta_numeric(&sc, ds)?;
        let closed = delta_closed_form_infinite(l, q * l)?;
        Ok(DeltaRow {
            y0_over_l: q,
            delta_numeric_over_l: num / l,
            delta_closed_over_l: closed / l,
            bound_slack: (delta_bound(l) - num) / l,
        })
    })
    .into_iter()
    .collect()
}

/// Controller settings for the route simulations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteSimConfig {
    pub v: f64,
    pub turning_radius: f64,
    pub d_tar: f64,
    pub d_trig: f64,
    pub epsilon: f64,
    pub d_safe: f64,
    pub l_gain: f64,
    pub k: f64,
    pub ctrl_hz: f64,
    pub ray_count: usize,
    /// Width of the linear band replacing the switching sign.
    pub sgn_layer: Option<f64>,
    pub wall_thickness: f64,
    /// Straight run-up before `B`.
    pub lead_in: f64,
}

impl RouteSimConfig {
    /// Lengths scale with `L`. With the pure switching law the heading
    /// chatters by `u_max/ctrl_hz` per tick, so the sampled `ḋ` swings by
    /// about `v·u_max/ctrl_hz`. The saturation level `l·k` has to stay above
    /// that swing or the surface sign stops seeing `d`. It also has to stay
    /// below `v·sin α`, otherwise a shallow approach first turns toward the
    /// wall and sweeps back through the target bearing inside the exit band.
    /// Both are met with `l·k = min(0.1, ½ sin α)·v` and a per-tick turn of
    /// `l·k/(2v)`.
    pub fn for_scenario(sc: &ComparisonScenario) -> Self {
        let l = sc.l;
        let v = 1.0;
        let r = 0.004 * l;
        let sin_a = (sc.y0.abs() / l).min(1.0);
        let lk = (0.5 * sin_a).min(0.1) * v;
        let u_max = v / r;
        RouteSimConfig {
            v,
            turning_radius: r,
            d_tar: 2.0 * r,
            d_trig: 5.0 * r,
            epsilon: 0.5 * r,
            d_safe: 0.5 * r,
            l_gain: lk / r,
            k: r,
            ctrl_hz: (2.0 * u_max * v / lk).max(5000.0 / l),
            ray_count: 90,
            sgn_layer: None,
            wall_thickness: 0.01 * l,
            lead_in: 0.1 * l,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteComparison {
    /// Length from `B` to the wall end for the sliding route.
    pub len_sliding: f64,
    pub len_pursuit: f64,
    pub delta: f64,
    pub delta_numeric: f64,
}

/// Largest approach angle used for the route scene; at exactly `π/2` the
/// two bypass sides tie and the choice would rest on rounding.
pub const MAX_APPROACH_ANGLE: f64 = FRAC_PI_2 - 1e-6;

/// Scene and start for one route. The wall occupies `[−3L, S] × [0, t]`
/// and `C` is the origin.
pub fn route_scenario(sc: &ComparisonScenario, cfg: &RouteSimConfig, controller: ControllerKind) -> Result<ScenarioSpec, AnalysisError> {
    if sc.wall_extent.is_infinite() {
        return Err(AnalysisError::InfiniteWall);
    }
    let l = sc.l;
    let alpha = (sc.y0.abs() / l).min(1.0).asin().min(MAX_APPROACH_ANGLE);
    let dir = Vec2::from_angle(alpha);
    let b = dir * (-l);
    let start = b - dir * cfg.lead_in;
    let target = dir * (2.0 * l + cfg.wall_thickness / alpha.sin());
    let wall = Obstacle::rectangle(-3.0 * l, 0.0, sc.wall_extent, cfg.wall_thickness).map_err(|_| AnalysisError::BadWall(sc.wall_extent))?;
    let scene = Scene::new(vec![wall], target).map_err(|_| AnalysisError::BadWall(sc.wall_extent))?;
    let pursuit = controller == ControllerKind::Pursuit;
    let params = SlidingParams {
        v: cfg.v,
        u_max: cfg.v / cfg.turning_radius,
        d_safe: if pursuit { 0.0 } else { cfg.d_safe },
        d_tar: cfg.d_tar,
        d_trig: cfg.d_trig,
        epsilon: cfg.epsilon,
        l: cfg.l_gain,
        k: cfg.k,
        beta_tol: 0.01,
        capture_radius: 0.01 * l,
        initial_gamma: 1,
        sgn_layer: cfg.sgn_layer,
    };
    let period = 1.0 / cfg.ctrl_hz;
    let sensor = SensorConfig::new(l, l, cfg.ray_count, period)?;
    let travel = cfg.lead_in + l + sc.wall_extent + 0.5 * l;
    let sim = SimConfig { dt_physics: period, ctrl_hz: cfg.ctrl_hz, max_time: Some(travel / cfg.v), controller };
    Ok(ScenarioSpec { scene, start: Pose::new(start, alpha), params, sensor, sim, theorem_mode: false })
}

impl From<crate::sensing::SensingError> for AnalysisError {
    fn from(e: crate::sensing::SensingError) -> Self {
        AnalysisError::Sim(SimError::Sensor(e))
    }
}

/// First time the trajectory crosses `x = x_end`, interpolated between ticks.
fn crossing_time(traj: &Trajectory, x_end: f64) -> Option<f64> {
    traj.samples.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        let (xa, xb) = (a.pose.position.x, b.pose.position.x);
        (xa < x_end && xb >= x_end).then(|| a.t + (b.t - a.t) * (x_end - xa) / (xb - xa))
    })
}

/// Simulates both controllers on the wall scene and measures each route
/// from `B` until it passes the wall end.
pub fn compare_routes(sc: &ComparisonScenario, cfg: &RouteSimConfig, ds: f64, exec: Exec) -> Result<RouteComparison, AnalysisError> {
    let sc = ComparisonScenario::new(sc.l, sc.y0, sc.wall_extent)?;
    let delta_numeric = delta_numeric(&sc, ds)?;
    let kinds = [ControllerKind::Sliding, ControllerKind::Pursuit];
    let specs = kinds.iter().map(|&k| route_scenario(&sc, cfg, k)).collect::<Result<Vec<_>, _>>()?;
    // the two runs are independent; each one scans sequentially
    let opts = RunOptions { strict: false, exec: Exec::Sequential };
    let lens = exec.map_slice(&specs, |spec| -> Result<f64, AnalysisError> {
        let traj = run_with(spec, &opts)?;
        let t = crossing_time(&traj, sc.wall_extent).ok_or_else(|| AnalysisError::WallEndNotReached {
            controller: spec.sim.controller,
            outcome: format!("{:?}", traj.outcome),
        })?;
        Ok(cfg.v * t - cfg.lead_in)
    });
    let mut lens = lens.into_iter();
    let len_sliding = lens.next().expect("two runs")?;
    let len_pursuit = lens.next().expect("two runs")?;
    Ok(RouteComparison { len_sliding, len_pursuit, delta: len_sliding - len_pursuit, delta_numeric })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert!((delta_closed_form_infinite(1.0, 1.0).unwrap() - LN_2).abs() < 1e-15);
        assert!((delta_closed_form_infinite(2.0, -2.0).unwrap() - 2.0 * LN_2).abs() < 1e-15);
        assert!(delta_closed_form_infinite(1.0, 1e-9).unwrap() < 1e-17);
        assert!(delta_closed_form_infinite(1.0, 0.0).is_err());
        assert!(delta_closed_form_infinite(1.0, 1.1).is_err());
    }

    #[test]
    fn numeric_matches_closed_form() {
        for q in [0.1, 0.5, 1.0] {
            let sc = ComparisonScenario::infinite(1.0, q).unwrap();
            let n = delta_numeric(&sc, 1e-3).unwrap();
            let c = delta_closed_form_infinite(1.0, q).unwrap();
            assert!(((n - c) / c).abs() < 1e-8, "{q}: {n} vs {c}");
        }
    }

    #[test]
    fn step_limits() {
        let sc = ComparisonScenario::infinite(1.0, 0.5).unwrap();
        assert!(delta_numeric(&sc, 0.02).is_err());
        assert!(delta_numeric(&sc, 0.0).is_err());
        assert!(ComparisonScenario::new(1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn short_wall_is_bounded_by_its_length() {
        // Δ = S − s_E < S
        let sc = ComparisonScenario::new(1.0, 1.0, 0.01).unwrap();
        let d = delta_numeric(&sc, 1e-4).unwrap();
        assert!(d > 0.0 && d < 0.01);
    }

    #[test]
    fn crossing_interpolates() {
        use crate::sim::{ModeTag, Outcome, Sample};
        let sample = |t: f64, x: f64| Sample {
            t,
            pose: Pose::new(Vec2::new(x, 0.0), 0.0),
            u: 0.0,
            d: f64::INFINITY,
            beta: 0.0,
            mode: ModeTag::A,
            gamma: 1,
        };
        let traj = Trajectory {
            samples: vec![sample(0.0, 0.0), sample(1.0, 1.0), sample(2.0, 2.0)],
            outcome: Outcome::Timeout { t: 2.0 },
            speed: 1.0,
            min_distance: f64::INFINITY,
            obstacle_lost_ticks: 0,
            discontinuities: 0,
            validation: crate::sliding::ValidationReport { turning_radius: 1.0, min_curvature_radius: 1.0, conditions: vec![] },
        };
        assert_eq!(crossing_time(&traj, 1.5), Some(1.5));
        assert_eq!(crossing_time(&traj, 3.0), None);
    }
}
