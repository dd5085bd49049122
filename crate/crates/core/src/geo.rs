//! Planar geometry kernel: obstacles, distances, ray casting and
//! c-neighborhoods of convex sets.
//!
//! Unbounded distances are reported as `f64::INFINITY`; use [`fmt_len`] to
//! render them the way the text outputs expect (`inf`).

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("disc radius must be finite and > 0, got {0}")]
    BadRadius(f64),
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon vertex {0} is not finite")]
    NonFiniteVertex(usize),
    #[error("polygon vertex {0} repeats a previous vertex")]
    RepeatedVertex(usize),
    #[error("polygon is not strictly convex and counter-clockwise at vertex {0}")]
    NotConvexCcw(usize),
    #[error("polygon winds more than once around its interior")]
    SelfOverlapping,
    #[error("ray direction must be a non-zero finite vector")]
    ZeroDirection,
    #[error("target lies inside obstacle {0}")]
    TargetInsideObstacle(usize),
    #[error("obstacles {0} and {1} are not disjoint")]
    ObstaclesOverlap(usize, usize),
    #[error("target must be finite")]
    NonFiniteTarget,
}

/// Renders a length, printing the unbounded sentinel as `inf`.
pub fn fmt_len(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x}")
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_angle(a: f64) -> Self {
        let (s, c) = a.sin_cos();
        Vec2::new(c, s)
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    pub fn rotated(self, a: f64) -> Vec2 {
        let (s, c) = a.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Left-hand normal (rotation by +π/2).
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Rigid motion, optionally preceded by a reflection across the x-axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transform {
    pub reflect: bool,
    pub rotation: f64,
    pub shift: Vec2,
}

impl Transform {
    pub fn rigid(rotation: f64, shift: Vec2) -> Self {
        Transform { reflect: false, rotation, shift }
    }

    /// Reflection across the x-axis.
    pub fn mirror_x_axis() -> Self {
        Transform { reflect: true, rotation: 0.0, shift: Vec2::ZERO }
    }

    pub fn apply(&self, p: Vec2) -> Vec2 {
        let p = if self.reflect { Vec2::new(p.x, -p.y) } else { p };
        p.rotated(self.rotation) + self.shift
    }

    pub fn apply_heading(&self, theta: f64) -> f64 {
        let t = if self.reflect { -theta } else { theta };
        wrap_angle(t + self.rotation)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Disc { center: Vec2, radius: f64 },
    Polygon { vertices: Vec<Vec2> },
}

/// Compact convex obstacle. Construction validates the shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Shape", into = "Shape")]
pub struct Obstacle {
    shape: Shape,
}

impl TryFrom<Shape> for Obstacle {
    type Error = GeoError;
    fn try_from(shape: Shape) -> Result<Self, GeoError> {
        match shape {
            Shape::Disc { center, radius } => Obstacle::disc(center, radius),
            Shape::Polygon { vertices } => Obstacle::polygon(vertices),
        }
    }
}

impl From<Obstacle> for Shape {
    fn from(o: Obstacle) -> Shape {
        o.shape
    }
}

impl Obstacle {
    pub fn disc(center: Vec2, radius: f64) -> Result<Self, GeoError> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(GeoError::BadRadius(radius));
        }
        Ok(Obstacle { shape: Shape::Disc { center, radius } })
    }

    /// Strictly convex polygon with counter-clockwise vertices.
    pub fn polygon(vertices: Vec<Vec2>) -> Result<Self, GeoError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeoError::TooFewVertices(n));
        }
        for (i, v) in vertices.iter().enumerate() {
            if !v.is_finite() {
                return Err(GeoError::NonFiniteVertex(i));
            }
            if vertices[..i].contains(v) {
                return Err(GeoError::RepeatedVertex(i));
            }
        }
        let mut turning = 0.0;
        for i in 0..n {
            let e0 = vertices[(i + 1) % n] - vertices[i];
            let e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
            let c = e0.cross(e1);
            if c <= 0.0 {
                return Err(GeoError::NotConvexCcw((i + 1) % n));
            }
            turning += c.atan2(e0.dot(e1));
        }
        if (turning - TAU).abs() > 1e-6 {
            return Err(GeoError::SelfOverlapping);
        }
        Ok(Obstacle { shape: Shape::Polygon { vertices } })
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, GeoError> {
        Obstacle::polygon(vec![
            Vec2::new(x0, y0),
            Vec2::new(x1, y0),
            Vec2::new(x1, y1),
            Vec2::new(x0, y1),
        ])
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn transformed(&self, t: &Transform) -> Obstacle {
        let shape = match &self.shape {
            Shape::Disc { center, radius } => Shape::Disc { center: t.apply(*center), radius: *radius },
            Shape::Polygon { vertices } => {
                let mut vs: Vec<Vec2> = vertices.iter().map(|v| t.apply(*v)).collect();
                if t.reflect {
                    vs.reverse();
                }
                Shape::Polygon { vertices: vs }
            }
        };
        Obstacle { shape }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        distance_to_obstacle(p, self) == 0.0
    }

    /// Closest boundary point to `p` (for `p` outside); for interior
    /// points the result is `p` itself.
    pub fn closest_point(&self, p: Vec2) -> Vec2 {
        match &self.shape {
            Shape::Disc { center, radius } => {
                let rel = p - *center;
                let n = rel.norm();
                if n <= *radius {
                    p
                } else {
                    *center + rel * (radius / n)
                }
            }
            Shape::Polygon { vertices } => {
                if polygon_contains(vertices, p) {
                    return p;
                }
                let mut best = (f64::INFINITY, p);
                for (a, b) in edges(vertices) {
                    let q = closest_on_segment(p, a, b);
                    let d = q.dist(p);
                    if d < best.0 {
                        best = (d, q);
                    }
                }
                best.1
            }
        }
    }

    pub fn centroid(&self) -> Vec2 {
        match &self.shape {
            Shape::Disc { center, .. } => *center,
            Shape::Polygon { vertices } => {
                let s = vertices.iter().fold(Vec2::ZERO, |acc, v| acc + *v);
                s * (1.0 / vertices.len() as f64)
            }
        }
    }
}

fn edges(vs: &[Vec2]) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
    (0..vs.len()).map(move |i| (vs[i], vs[(i + 1) % vs.len()]))
}

fn polygon_contains(vs: &[Vec2], p: Vec2) -> bool {
    edges(vs).all(|(a, b)| (b - a).cross(p - a) >= 0.0)
}

fn closest_on_segment(p: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 == 0.0 {
        return a;
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    closest_on_segment(p, a, b).dist(p)
}

fn segments_intersect(a0: Vec2, a1: Vec2, b0: Vec2, b1: Vec2) -> bool {
    let d1 = (a1 - a0).cross(b0 - a0);
    let d2 = (a1 - a0).cross(b1 - a0);
    let d3 = (b1 - b0).cross(a0 - b0);
    let d4 = (b1 - b0).cross(a1 - b0);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    // collinear / touching cases fall back to the distance test
    false
}

fn segment_segment_distance(a0: Vec2, a1: Vec2, b0: Vec2, b1: Vec2) -> f64 {
    if segments_intersect(a0, a1, b0, b1) {
        return 0.0;
    }
    point_segment_distance(a0, b0, b1)
        .min(point_segment_distance(a1, b0, b1))
        .min(point_segment_distance(b0, a0, a1))
        .min(point_segment_distance(b1, a0, a1))
}

/// Euclidean distance from `p` to the closed obstacle set (0 inside).
pub fn distance_to_obstacle(p: Vec2, obs: &Obstacle) -> f64 {
    match &obs.shape {
        Shape::Disc { center, radius } => (p.dist(*center) - radius).max(0.0),
        Shape::Polygon { vertices } => {
            if polygon_contains(vertices, p) {
                0.0
            } else {
                edges(vertices)
                    .map(|(a, b)| point_segment_distance(p, a, b))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// Distance from the segment `[a, b]` to the obstacle (0 if they meet).
pub fn segment_distance_to_obstacle(a: Vec2, b: Vec2, obs: &Obstacle) -> f64 {
    match &obs.shape {
        Shape::Disc { center, radius } => (point_segment_distance(*center, a, b) - radius).max(0.0),
        Shape::Polygon { vertices } => {
            if polygon_contains(vertices, a) || polygon_contains(vertices, b) {
                return 0.0;
            }
            edges(vertices).map(|(p, q)| segment_segment_distance(a, b, p, q)).fold(f64::INFINITY, f64::min)
        }
    }
}

/// Set distance between two obstacles.
pub fn obstacle_gap(a: &Obstacle, b: &Obstacle) -> f64 {
    match (&a.shape, &b.shape) {
        (Shape::Disc { center: c1, radius: r1 }, Shape::Disc { center: c2, radius: r2 }) => {
            (c1.dist(*c2) - r1 - r2).max(0.0)
        }
        (Shape::Disc { center, radius }, Shape::Polygon { .. }) => (distance_to_obstacle(*center, b) - radius).max(0.0),
        (Shape::Polygon { .. }, Shape::Disc { center, radius }) => (distance_to_obstacle(*center, a) - radius).max(0.0),
        (Shape::Polygon { vertices: va }, Shape::Polygon { vertices: vb }) => {
            if va.iter().any(|v| polygon_contains(vb, *v)) || vb.iter().any(|v| polygon_contains(va, *v)) {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for (a0, a1) in edges(va) {
                for (b0, b1) in edges(vb) {
                    best = best.min(segment_segment_distance(a0, a1, b0, b1));
                }
            }
            best
        }
    }
}

/// Minimum pairwise set distance; `+∞` with fewer than two obstacles.
pub fn pairwise_obstacle_gap(obstacles: &[Obstacle]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..obstacles.len() {
        for j in i + 1..obstacles.len() {
            best = best.min(obstacle_gap(&obstacles[i], &obstacles[j]));
        }
    }
    best
}

/// Entry distance of the ray `origin + t·dir` (`dir` unit) into `obs`,
/// `Some(0)` when the origin is inside.
pub fn ray_hit(origin: Vec2, dir: Vec2, obs: &Obstacle) -> Option<f64> {
    match &obs.shape {
        Shape::Disc { center, radius } => {
            let oc = origin - *center;
            let c = oc.norm_sq() - radius * radius;
            if c <= 0.0 {
                return Some(0.0);
            }
            let b = oc.dot(dir);
            let disc = b * b - c;
            if disc < 0.0 {
                return None;
            }
            let t = -b - disc.sqrt();
            (t >= 0.0).then_some(t)
        }
        Shape::Polygon { vertices } => {
            let mut t_in = 0.0_f64;
            let mut t_out = f64::INFINITY;
            for (a, b) in edges(vertices) {
                let e = b - a;
                // outward normal of a CCW edge
                let n = Vec2::new(e.y, -e.x);
                let num = n.dot(origin - a);
                let den = n.dot(dir);
                if den == 0.0 {
                    if num > 0.0 {
                        return None;
                    }
                    continue;
                }
                let t = -num / den;
                if den < 0.0 {
                    t_in = t_in.max(t);
                } else {
                    t_out = t_out.min(t);
                }
                if t_in > t_out {
                    return None;
                }
            }
            Some(t_in)
        }
    }
}

/// Maps a cross-section parameter on `∂N[c, obs]` to a point. Returns the
/// total perimeter and a closure from arc length to point.
fn offset_boundary(obs: &Obstacle, c: f64) -> (f64, Box<dyn Fn(f64) -> Vec2 + '_>) {
    match &obs.shape {
        Shape::Disc { center, radius } => {
            let r = radius + c;
            let center = *center;
            (TAU * r, Box::new(move |s| center + Vec2::from_angle(s / r) * r))
        }
        Shape::Polygon { vertices } => {
            let n = vertices.len();
            let normal = |i: usize| {
                let e = vertices[(i + 1) % n] - vertices[i];
                Vec2::new(e.y, -e.x).normalized().unwrap_or(Vec2::ZERO)
            };
            // pieces: for vertex i an arc (from normal of edge i-1 to normal of
            // edge i), then the offset copy of edge i
            let mut pieces = Vec::with_capacity(2 * n);
            for i in 0..n {
                let n_in = normal((i + n - 1) % n);
                let n_out = normal(i);
                let a0 = n_in.angle();
                let sweep = n_in.cross(n_out).atan2(n_in.dot(n_out));
                pieces.push(Piece::Arc { center: vertices[i], start: a0, sweep, radius: c });
                pieces.push(Piece::Line { from: vertices[i] + n_out * c, to: vertices[(i + 1) % n] + n_out * c });
            }
            let total: f64 = pieces.iter().map(Piece::len).sum();
            (
                total,
                Box::new(move |mut s| {
                    for p in &pieces {
                        let l = p.len();
                        if s <= l {
                            return p.at(s);
                        }
                        s -= l;
                    }
                    pieces[0].at(0.0)
                }),
            )
        }
    }
}

enum Piece {
    Arc { center: Vec2, start: f64, sweep: f64, radius: f64 },
    Line { from: Vec2, to: Vec2 },
}

impl Piece {
    fn len(&self) -> f64 {
        match self {
            Piece::Arc { sweep, radius, .. } => sweep * radius,
            Piece::Line { from, to } => from.dist(*to),
        }
    }

    fn at(&self, s: f64) -> Vec2 {
        match self {
            Piece::Arc { center, start, radius, .. } => {
                if *radius == 0.0 {
                    *center
                } else {
                    *center + Vec2::from_angle(start + s / radius) * *radius
                }
            }
            Piece::Line { from, to } => {
                let l = from.dist(*to);
                if l == 0.0 {
                    *from
                } else {
                    *from + (*to - *from) * (s / l)
                }
            }
        }
    }
}

/// `n` points spaced uniformly by arc length on the boundary of the
/// c-neighborhood `N[c, obs] = {z : dist(z, obs) ≤ c}`.
pub fn neighborhood_boundary_samples(obs: &Obstacle, c: f64, n: usize) -> Vec<Vec2> {
    let (perimeter, at) = offset_boundary(obs, c.max(0.0));
    (0..n).map(|k| at(perimeter * k as f64 / n as f64)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scene {
    obstacles: Vec<Obstacle>,
    target: Vec2,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneRaw {
    obstacles: Vec<Obstacle>,
    target: Vec2,
}

impl<'de> Deserialize<'de> for Scene {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = SceneRaw::deserialize(d)?;
        Scene::new(raw.obstacles, raw.target).map_err(serde::de::Error::custom)
    }
}

impl Scene {
    /// Checks that the target is outside every obstacle and that the
    /// obstacles are pairwise disjoint.
    pub fn new(obstacles: Vec<Obstacle>, target: Vec2) -> Result<Self, GeoError> {
        let scene = Scene::new_unchecked(obstacles, target)?;
        for i in 0..scene.obstacles.len() {
            for j in i + 1..scene.obstacles.len() {
                if obstacle_gap(&scene.obstacles[i], &scene.obstacles[j]) <= 0.0 {
                    return Err(GeoError::ObstaclesOverlap(i, j));
                }
            }
        }
        Ok(scene)
    }

    /// Like [`Scene::new`] but tolerates touching or overlapping obstacles,
    /// so that invalid layouts can still be diagnosed by the validator.
    pub fn new_unchecked(obstacles: Vec<Obstacle>, target: Vec2) -> Result<Self, GeoError> {
        if !target.is_finite() {
            return Err(GeoError::NonFiniteTarget);
        }
        if let Some(i) = obstacles.iter().position(|o| o.contains(target)) {
            return Err(GeoError::TargetInsideObstacle(i));
        }
        Ok(Scene { obstacles, target })
    }

    pub fn empty(target: Vec2) -> Self {
        Scene { obstacles: Vec::new(), target }
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    pub fn target(&self) -> Vec2 {
        self.target
    }

    pub fn transformed(&self, t: &Transform) -> Scene {
        Scene {
            obstacles: self.obstacles.iter().map(|o| o.transformed(t)).collect(),
            target: t.apply(self.target),
        }
    }

    /// Minimum distance and nearest obstacle index (lowest index on ties);
    /// `(+∞, None)` for an empty scene.
    pub fn distance(&self, p: Vec2) -> (f64, Option<usize>) {
        scene_distance(p, self)
    }

    pub fn ray_cast(&self, origin: Vec2, dir: Vec2, max_range: f64) -> Result<Option<(f64, usize)>, GeoError> {
        ray_cast(origin, dir, self, max_range)
    }

    pub fn min_boundary_curvature_radius(&self) -> f64 {
        min_boundary_curvature_radius(self)
    }

    pub fn pairwise_obstacle_gap(&self) -> f64 {
        pairwise_obstacle_gap(&self.obstacles)
    }
}

pub fn scene_distance(p: Vec2, scene: &Scene) -> (f64, Option<usize>) {
    let mut best = (f64::INFINITY, None);
    for (i, o) in scene.obstacles.iter().enumerate() {
        let d = distance_to_obstacle(p, o);
        if d < best.0 {
            best = (d, Some(i));
        }
    }
    best
}

/// Nearest intersection of the ray with the scene within `max_range`.
pub fn ray_cast(origin: Vec2, dir: Vec2, scene: &Scene, max_range: f64) -> Result<Option<(f64, usize)>, GeoError> {
    let dir = dir.normalized().ok_or(GeoError::ZeroDirection)?;
    Ok(cast_unit(origin, dir, scene, max_range))
}

pub(crate) fn cast_unit(origin: Vec2, dir: Vec2, scene: &Scene, max_range: f64) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for (i, o) in scene.obstacles.iter().enumerate() {
        if let Some(t) = ray_hit(origin, dir, o) {
            if t <= max_range && best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, i));
            }
        }
    }
    best
}

/// `R_-`: the smallest boundary curvature radius. Polygon corners count as
/// zero; an empty scene yields `+∞`.
pub fn min_boundary_curvature_radius(scene: &Scene) -> f64 {
    scene
        .obstacles
        .iter()
        .map(|o| match o.shape {
            Shape::Disc { radius, .. } => radius,
            Shape::Polygon { .. } => 0.0,
        })
        .fold(f64::INFINITY, f64::min)
}
