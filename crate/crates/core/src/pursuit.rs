//! Idealized edge-pursuit controller.
//!
//! Flies straight at the target while the straight segment (truncated at the
//! sensor range) is clear. Once the visible part of an obstacle blocks it,
//! the vehicle keeps heading at the visible edge of that part on one fixed
//! side. The output is a heading, not a turn rate: the vehicle is treated as
//! able to turn arbitrarily sharply.

use serde::{Deserialize, Serialize};

use crate::geo::{cast_unit, wrap_angle, Scene, Vec2};
use crate::sensing::{visible_edges, EdgeSide, Pose, SensorFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Around the minimum-angle (clockwise) edge.
    Right,
    /// Around the maximum-angle (counter-clockwise) edge.
    Left,
}

impl Side {
    pub fn sign(self) -> i8 {
        match self {
            Side::Right => 1,
            Side::Left => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PursuitState {
    StraightToTarget,
    EdgePursuit { side: Side, obstacle: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PursuitCommand {
    /// Desired world-frame heading, wrapped to `(-π, π]`.
    pub heading: f64,
    pub state: PursuitState,
    /// The pursued obstacle changed within an episode.
    pub discontinuity: bool,
}

/// One update. `frame` must come from a scan truncated at `range`.
pub fn pursuit_step(
    frame: &SensorFrame,
    pose: &Pose,
    scene: &Scene,
    target: Vec2,
    state: PursuitState,
    range: f64,
) -> PursuitCommand {
    let to_target = target - pose.position;
    let dist = to_target.norm();
    let Some(dir) = to_target.normalized() else {
        return PursuitCommand { heading: pose.theta, state: PursuitState::StraightToTarget, discontinuity: false };
    };
    let straight = PursuitCommand { heading: wrap_angle(dir.angle()), state: PursuitState::StraightToTarget, discontinuity: false };
    let Some((_, blocker)) = cast_unit(pose.position, dir, scene, range.min(dist)) else {
        return straight;
    };

    let target_angle = wrap_angle(dir.angle() - pose.theta);
    let (lo, hi) = visible_edges(pose, scene, range, blocker, &frame.ray_hits, EdgeSide::Outer)
        .unwrap_or((target_angle, target_angle));
    let (side, discontinuity) = match state {
        PursuitState::EdgePursuit { side, obstacle } => (side, obstacle != blocker),
        PursuitState::StraightToTarget => {
            // straight flight moves along the target direction, so the heading
            // change to each edge is measured from it
            let side = if wrap_angle(lo - target_angle).abs() < wrap_angle(hi - target_angle).abs() { Side::Right } else { Side::Left };
            (side, false)
        }
    };
    let edge = match side {
        Side::Right => lo,
        Side::Left => hi,
    };
    PursuitCommand {
        heading: wrap_angle(pose.theta + edge),
        state: PursuitState::EdgePursuit { side, obstacle: blocker },
        discontinuity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::Obstacle;
    use crate::sensing::{scan, SensorConfig};

    fn sensor(l: f64) -> SensorConfig {
        SensorConfig::new(l, l, 720, 0.01).unwrap()
    }

    #[test]
    fn clear_path_heads_at_target() {
        let scene = Scene::new(vec![Obstacle::disc(Vec2::new(0.0, 30.0), 1.0).unwrap()], Vec2::new(10.0, 10.0)).unwrap();
        let pose = Pose::new(Vec2::ZERO, 0.0);
        let f = scan(&pose, &scene, &sensor(5.0), None);
        let c = pursuit_step(&f, &pose, &scene, scene.target(), PursuitState::StraightToTarget, 5.0);
        assert_eq!(c.state, PursuitState::StraightToTarget);
        assert!((c.heading - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn wall_edge_at_range() {
        // wall along y = 0 above the vehicle, target behind it
        let wall = Obstacle::rectangle(-50.0, 0.0, 50.0, 0.01).unwrap();
        let scene = Scene::new(vec![wall], Vec2::new(1.0, 20.0)).unwrap();
        let l = 1.0;
        let y = 0.6;
        let pose = Pose::new(Vec2::new(0.0, -y), std::f64::consts::FRAC_PI_2);
        let f = scan(&pose, &scene, &sensor(l), None);
        let c = pursuit_step(&f, &pose, &scene, scene.target(), PursuitState::StraightToTarget, l);
        assert!(matches!(c.state, PursuitState::EdgePursuit { side: Side::Right, .. }));
        // heading points at (x + sqrt(L² − y²), 0)
        let expected = Vec2::new((l * l - y * y).sqrt(), y).angle();
        assert!((c.heading - expected).abs() < 1e-9, "{} vs {}", c.heading, expected);
    }

    #[test]
    fn reverts_when_clear() {
        let wall = Obstacle::rectangle(-50.0, 0.0, 0.5, 0.01).unwrap();
        let scene = Scene::new(vec![wall], Vec2::new(2.0, 5.0)).unwrap();
        let pose = Pose::new(Vec2::new(1.0, -0.2), 0.3);
        let f = scan(&pose, &scene, &sensor(1.0), None);
        let st = PursuitState::EdgePursuit { side: Side::Right, obstacle: 0 };
        let c = pursuit_step(&f, &pose, &scene, scene.target(), st, 1.0);
        assert_eq!(c.state, PursuitState::StraightToTarget);
        assert!((c.heading - (scene.target() - pose.position).angle()).abs() < 1e-15);
    }
}
