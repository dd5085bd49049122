//! Trajectory export: CSV rows per controller tick and an SVG plot.

use std::fmt::Write as _;

use crate::geo::{fmt_len, neighborhood_boundary_samples, Shape, Vec2};
use crate::sim::{ScenarioSpec, Trajectory};

pub const CSV_HEADER: &str = "t,x,y,theta,u,d,beta,mode,gamma";

fn num(x: f64) -> String {
    if x.is_infinite() && x > 0.0 {
        "inf".to_string()
    } else {
        format!("{x}")
    }
}

/// One row per recorded sample. Floats use the shortest exact
/// representation, so identical trajectories give identical bytes.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(64 * (traj.samples.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in &traj.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            num(s.t),
            num(s.pose.position.x),
            num(s.pose.position.y),
            num(s.pose.theta),
            num(s.u),
            num(s.d),
            num(s.beta),
            s.mode.as_str(),
            s.gamma
        );
    }
    out
}

struct Frame {
    min: Vec2,
    max: Vec2,
}

impl Frame {
    fn include(&mut self, p: Vec2) {
        self.min = Vec2::new(self.min.x.min(p.x), self.min.y.min(p.y));
        self.max = Vec2::new(self.max.x.max(p.x), self.max.y.max(p.y));
    }
}

fn points(pts: &[Vec2]) -> String {
    let mut s = String::new();
    for (i, p) in pts.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        // y is flipped by the enclosing transform
        let _ = write!(s, "{:.4},{:.4}", p.x, p.y);
    }
    s
}

const RING_SAMPLES: usize = 128;

/// Plot with filled obstacles, dashed `d_tar` and `d_trig` rings, the path,
/// and start/target markers.
pub fn trajectory_svg(spec: &ScenarioSpec, traj: &Trajectory) -> String {
    let p = &spec.params;
    let target = spec.scene.target();
    let mut frame = Frame { min: target, max: target };
    frame.include(spec.start.position);
    for s in &traj.samples {
        frame.include(s.pose.position);
    }
    let mut rings = Vec::new();
    for obs in spec.scene.obstacles() {
        for (c, class) in [(p.d_tar, "tar"), (p.d_trig, "trig")] {
            let ring = neighborhood_boundary_samples(obs, c, RING_SAMPLES);
            ring.iter().for_each(|&q| frame.include(q));
            rings.push((ring, class));
        }
    }
    let pad = 0.05 * (frame.max - frame.min).norm().max(1.0);
    let (x0, y0) = (frame.min.x - pad, frame.min.y - pad);
    let (w, h) = (frame.max.x - frame.min.x + 2.0 * pad, frame.max.y - frame.min.y + 2.0 * pad);
    let stroke = 0.003 * w.max(h);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:.4} {:.4} {w:.4} {h:.4}" width="800" height="{:.0}">"#,
        -(y0 + h),
        800.0 * h / w
    );
    let _ = writeln!(
        out,
        "<style>.obs{{fill:#8899aa;stroke:none}} .tar{{fill:none;stroke:#2a7;stroke-dasharray:{d},{d}}} \
         .trig{{fill:none;stroke:#d83;stroke-dasharray:{d},{d}}} .path{{fill:none;stroke:#124;}}</style>",
        d = 4.0 * stroke
    );
    let _ = writeln!(out, r#"<g transform="scale(1,-1)" stroke-width="{stroke:.4}">"#);
    for obs in spec.scene.obstacles() {
        match obs.shape() {
            Shape::Disc { center, radius } => {
                let _ = writeln!(out, r#"<circle class="obs" cx="{:.4}" cy="{:.4}" r="{radius:.4}"/>"#, center.x, center.y);
            }
            Shape::Polygon { vertices } => {
                let _ = writeln!(out, r#"<polygon class="obs" points="{}"/>"#, points(vertices));
            }
        }
    }
    for (ring, class) in &rings {
        let _ = writeln!(out, r#"<polygon class="{class}" points="{}"/>"#, points(ring));
    }
    let path: Vec<Vec2> = traj.samples.iter().map(|s| s.pose.position).collect();
    let _ = writeln!(out, r#"<polyline class="path" points="{}"/>"#, points(&path));
    let r = 4.0 * stroke;
    let s = spec.start.position;
    let _ = writeln!(out, r##"<circle cx="{:.4}" cy="{:.4}" r="{r:.4}" fill="#36c"><title>start</title></circle>"##, s.x, s.y);
    let _ = writeln!(
        out,
        r##"<circle cx="{:.4}" cy="{:.4}" r="{:.4}" fill="#c33"><title>target (capture {})</title></circle>"##,
        target.x,
        target.y,
        r.max(p.capture_radius),
        fmt_len(p.capture_radius)
    );
    out.push_str("</g>\n</svg>\n");
    out
}
