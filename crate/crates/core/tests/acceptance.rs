//! Acceptance suite. Runs without the libtest harness so the PASS/FAIL
//! line for each criterion is always printed; exits non-zero on any FAIL.

use std::f64::consts::{LN_2, PI};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use slidenav::analysis::{
    compare_routes, delta_closed_form_infinite, delta_numeric, ComparisonScenario, RouteSimConfig, DEFAULT_STEP_FRACTION,
};
use slidenav::export::trajectory_csv;
use slidenav::geo::{wrap_angle, Transform, Vec2};
use slidenav::scenario::{passing_fixture, random_theorem_scenario, table_params, theorem_disc};
use slidenav::sim::{integrate_arc, path_length, run_batch, run_with, ModeTag, Outcome, RunOptions, Trajectory};
use slidenav::{Exec, Pose};

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(start: Instant, budget: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < budget, || format!("took {took:.2?}, budget {budget:?}"))
}

fn c1_gap_bound() -> Verdict {
    let t0 = Instant::now();
    let closed = delta_closed_form_infinite(1.0, 1.0).map_err(|e| e.to_string())?;
    ensure((closed - LN_2).abs() <= 1e-9, || format!("closed form {closed} != ln 2"))?;
    let mut worst: f64 = 0.0;
    for q in [0.1, 0.25, 0.5, 0.75, 1.0] {
        let sc = ComparisonScenario::infinite(1.0, q).map_err(|e| e.to_string())?;
        let num = delta_numeric(&sc, DEFAULT_STEP_FRACTION).map_err(|e| e.to_string())?;
        let cf = delta_closed_form_infinite(1.0, q).map_err(|e| e.to_string())?;
        let rel = (num - cf).abs() / cf;
        worst = worst.max(rel);
        ensure(rel <= 1e-6, || format!("y0={q}: numeric {num} vs closed {cf}"))?;
        ensure(num <= LN_2 && cf <= LN_2, || format!("y0={q}: {num} / {cf} above ln 2"))?;
    }
    within_budget(t0, Duration::from_secs(1))?;
    Ok(format!("closed={closed:.15} worst_rel={worst:.1e} t={:.0?}", t0.elapsed()))
}

fn c2_simulated_gap() -> Verdict {
    let t0 = Instant::now();
    let mut notes = Vec::new();
    for (q, wall) in [(1.0, 30.0), (0.75, 5.0), (0.5, 5.0), (0.3, 5.0), (0.2, 5.0)] {
        let sc = ComparisonScenario::new(1.0, q, wall).map_err(|e| e.to_string())?;
        let cfg = RouteSimConfig::for_scenario(&sc);
        let cmp = compare_routes(&sc, &cfg, DEFAULT_STEP_FRACTION, Exec::Parallel).map_err(|e| e.to_string())?;
        ensure(cmp.delta > 0.0, || format!("y0={q}: delta {} not positive", cmp.delta))?;
        if q == 1.0 {
            let rel = (cmp.delta - LN_2).abs() / LN_2;
            ensure(rel <= 0.05, || format!("y0=1: delta {} is {:.1}% from ln 2", cmp.delta, 100.0 * rel))?;
            notes.push(format!("y0=1 delta={:.5} ({:+.2}%)", cmp.delta, 100.0 * (cmp.delta / LN_2 - 1.0)));
        } else {
            notes.push(format!("y0={q} delta={:.5}", cmp.delta));
        }
    }
    within_budget(t0, Duration::from_secs(30))?;
    Ok(format!("{} t={:.1?}", notes.join(", "), t0.elapsed()))
}

const SCENES: u64 = 24;

fn random_runs() -> Result<Vec<(slidenav::ScenarioSpec, Trajectory)>, String> {
    let specs: Vec<_> = (0..SCENES).map(random_theorem_scenario).collect();
    let opts = RunOptions { strict: true, exec: Exec::Parallel };
    let trajs = run_batch(&specs, &opts);
    specs
        .into_iter()
        .zip(trajs)
        .enumerate()
        .map(|(i, (s, t))| t.map(|t| (s, t)).map_err(|e| format!("seed {i}: {e}")))
        .collect()
}

fn c3_target_reached(runs: &[(slidenav::ScenarioSpec, Trajectory)], took: Duration) -> Verdict {
    for (i, (spec, traj)) in runs.iter().enumerate() {
        ensure(spec.validate(Exec::Sequential).all_pass(), || format!("seed {i}: validation fails"))?;
        spec.check_preconditions().map_err(|e| format!("seed {i}: {e}"))?;
        let Outcome::TargetReached { t_f } = traj.outcome else {
            return Err(format!("seed {i}: {:?}", traj.outcome));
        };
        ensure(t_f.is_finite() && t_f <= spec.max_time(), || format!("seed {i}: t_f {t_f}"))?;
        ensure(traj.min_distance >= spec.params.d_safe, || format!("seed {i}: min d {}", traj.min_distance))?;
    }
    ensure(took < Duration::from_secs(120), || format!("took {took:.1?}"))?;
    let bypasses: usize = runs.iter().map(|(_, t)| t.mode_b_intervals().len()).sum();
    Ok(format!("{} scenes, {bypasses} bypasses, t={took:.1?}", runs.len()))
}

fn c4_boundary_band(runs: &[(slidenav::ScenarioSpec, Trajectory)]) -> Verdict {
    let mut worst: f64 = 1.0;
    let mut intervals = 0;
    for (i, (spec, traj)) in runs.iter().enumerate() {
        let d_tar = spec.params.d_tar;
        for range in traj.mode_b_intervals() {
            let tail = &traj.samples[range.start + range.len() / 4..range.end];
            if tail.is_empty() {
                continue;
            }
            intervals += 1;
            let inside = tail.iter().filter(|s| (s.d - d_tar).abs() <= 0.15 * d_tar).count();
            let frac = inside as f64 / tail.len() as f64;
            worst = worst.min(frac);
            ensure(frac >= 0.9, || format!("seed {i}, samples {range:?}: only {:.1}% in band", 100.0 * frac))?;
        }
    }
    ensure(intervals > 0, || "no mode-B intervals".into())?;
    Ok(format!("{intervals} intervals, worst {:.1}% in band", 100.0 * worst))
}

/// Edge angles of a disc seen from `p` with a sensor of range `range`,
/// clockwise edge first.
fn disc_edges(p: Vec2, center: Vec2, radius: f64, range: f64) -> (f64, f64) {
    let rel = center - p;
    let dist = rel.norm();
    let half = if (dist * dist - radius * radius).sqrt() <= range {
        (radius / dist).asin()
    } else {
        ((dist * dist + range * range - radius * radius) / (2.0 * dist * range)).acos()
    };
    (rel.angle() - half, rel.angle() + half)
}

fn first_bypass(traj: &Trajectory) -> Option<usize> {
    traj.samples.iter().position(|s| s.mode == ModeTag::B)
}

fn c5_gamma() -> Verdict {
    let spec = theorem_disc();
    let opts = RunOptions { strict: true, exec: Exec::Sequential };
    let a = run_with(&spec, &opts).map_err(|e| e.to_string())?;
    let mirrored = spec.transformed(&Transform::mirror_x_axis());
    let b = run_with(&mirrored, &opts).map_err(|e| e.to_string())?;

    let ia = first_bypass(&a).ok_or("no bypass")?;
    let switch = &a.samples[ia];
    let disc = spec.scene.obstacles()[0].clone();
    let slidenav::Shape::Disc { center, radius } = *disc.shape() else { unreachable!() };
    let to_target = (spec.scene.target() - switch.pose.position).angle();
    let (cw, ccw) = disc_edges(switch.pose.position, center, radius, spec.sensor.effective_range);
    // passing the clockwise edge keeps the obstacle on the left: a right turn
    let expected: i8 = if wrap_angle(cw - to_target).abs() < wrap_angle(ccw - to_target).abs() { 1 } else { -1 };
    ensure(switch.gamma == expected, || format!("gamma {} at switch, nearer edge says {expected}", switch.gamma))?;
    let abeam = a.samples.iter().min_by(|p, q| (p.pose.position.x - center.x).abs().total_cmp(&(q.pose.position.x - center.x).abs()));
    let side = abeam.map(|s| (s.pose.position.y - center.y).signum()).unwrap_or(0.0);
    ensure(side == -(expected as f64), || "vehicle passed on the other side".into())?;

    let ib = first_bypass(&b).ok_or("no bypass in mirror")?;
    ensure(b.samples[ib].gamma == -switch.gamma, || "mirror did not negate gamma".into())?;
    ensure(a.samples.len() == b.samples.len(), || "mirror sample counts differ".into())?;
    let mut dev: f64 = 0.0;
    for (sa, sb) in a.samples.iter().zip(&b.samples) {
        let m = Transform::mirror_x_axis().apply(sa.pose.position);
        dev = dev.max(m.dist(sb.pose.position));
    }
    ensure(dev < 1e-6, || format!("mirror deviation {dev}"))?;
    let (la, lb) = (path_length(&a), path_length(&b));
    let tol = spec.params.v * spec.sim.period();
    ensure((la - lb).abs() <= tol, || format!("path lengths {la} vs {lb}"))?;
    Ok(format!("gamma={} mirror={} max_dev={dev:.1e} lengths {la:.4}/{lb:.4}", switch.gamma, b.samples[ib].gamma))
}

fn c6_validator() -> Verdict {
    let table = table_params().validate(Exec::Sequential);
    let gain = table.get("gain_condition").ok_or("no gain condition")?;
    ensure(!gain.pass, || "table parameters pass the gain condition".into())?;
    ensure((gain.rhs - 0.3030).abs() <= 1e-4, || format!("rhs {}", gain.rhs))?;
    ensure(gain.lhs >= 1.0, || format!("lhs {}", gain.lhs))?;
    let fixture = passing_fixture().validate(Exec::Sequential);
    for c in &fixture.conditions {
        ensure(c.pass && c.slack > 0.0, || format!("fixture {}: lhs {} rhs {} slack {}", c.name, c.lhs, c.rhs, c.slack))?;
    }
    let min_slack = fixture.conditions.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
    Ok(format!("table lhs={:.4} rhs={:.6}; fixture {} conditions, min slack {min_slack:.4}", gain.lhs, gain.rhs, fixture.conditions.len()))
}

fn rk4(pose: &Pose, v: f64, u: f64, dt: f64, h: f64) -> Pose {
    let f = |s: [f64; 3]| [v * s[2].cos(), v * s[2].sin(), u];
    let mut s = [pose.position.x, pose.position.y, pose.theta];
    let n = (dt / h).round().max(1.0) as usize;
    let h = dt / n as f64;
    for _ in 0..n {
        let k1 = f(s);
        let k2 = f([s[0] + 0.5 * h * k1[0], s[1] + 0.5 * h * k1[1], s[2] + 0.5 * h * k1[2]]);
        let k3 = f([s[0] + 0.5 * h * k2[0], s[1] + 0.5 * h * k2[1], s[2] + 0.5 * h * k2[2]]);
        let k4 = f([s[0] + h * k3[0], s[1] + h * k3[1], s[2] + h * k3[2]]);
        for j in 0..3 {
            s[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    Pose::new(Vec2::new(s[0], s[1]), s[2])
}

fn c7_integrator() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let v = rng.gen_range(0.1..3.0);
        let u = if i % 10 == 0 { 0.0 } else { rng.gen_range(-3.0..3.0) };
        let dt = rng.gen_range(1e-3..0.2);
        let p0 = Pose::new(Vec2::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)), rng.gen_range(-PI..PI));
        let exact = integrate_arc(&p0, v, u, dt);
        let approx = rk4(&p0, v, u, dt, 1e-4);
        let err = exact.position.dist(approx.position).max((exact.theta - approx.theta).abs());
        worst = worst.max(err);
        ensure(err <= 1e-10, || format!("draw {i} (v={v}, u={u}, dt={dt}): error {err}"))?;
    }
    let traj = run_with(&theorem_disc(), &RunOptions::default()).map_err(|e| e.to_string())?;
    let (first, last) = (traj.samples.first().unwrap(), traj.samples.last().unwrap());
    let len = path_length(&traj);
    ensure(len == traj.speed * (last.t - first.t), || format!("path length {len}"))?;
    let chords: f64 = traj.samples.windows(2).map(|w| w[0].pose.position.dist(w[1].pose.position)).sum();
    ensure(chords <= len * (1.0 + 1e-12), || format!("chords {chords} exceed {len}"))?;
    Ok(format!("worst step error {worst:.1e}, path length {len:.4}"))
}

fn c8_determinism() -> Verdict {
    let spec = random_theorem_scenario(3);
    let seq = RunOptions { strict: false, exec: Exec::Sequential };
    let par = RunOptions { strict: false, exec: Exec::Parallel };
    let a = trajectory_csv(&run_with(&spec, &seq).map_err(|e| e.to_string())?);
    let b = trajectory_csv(&run_with(&spec, &seq).map_err(|e| e.to_string())?);
    let c = trajectory_csv(&run_with(&spec, &par).map_err(|e| e.to_string())?);
    ensure(a == b, || "repeated run differs".into())?;
    ensure(a == c, || "parallel run differs".into())?;

    let base = run_with(&spec, &seq).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (rot, shift) in [(0.7, Vec2::new(3.0, -2.0)), (-2.4, Vec2::new(-15.0, 8.0)), (PI / 2.0, Vec2::ZERO)] {
        let t = Transform::rigid(rot, shift);
        let moved = run_with(&spec.transformed(&t), &seq).map_err(|e| e.to_string())?;
        ensure(moved.samples.len() == base.samples.len(), || format!("rotation {rot}: sample counts differ"))?;
        for (s0, s1) in base.samples.iter().zip(&moved.samples) {
            let dp = t.apply(s0.pose.position).dist(s1.pose.position);
            let dh = wrap_angle(t.apply_heading(s0.pose.theta) - s1.pose.theta).abs();
            worst = worst.max(dp).max(dh);
            ensure(dp <= 1e-9 && dh <= 1e-9, || format!("rotation {rot} at t={}: {dp:.2e} / {dh:.2e}", s0.t))?;
        }
    }
    Ok(format!("{} csv bytes identical, worst rotated deviation {worst:.1e}", a.len()))
}

fn main() {
    let t0 = Instant::now();
    let runs = random_runs();
    let took = t0.elapsed();
    let (c3, c4) = match &runs {
        Ok(r) => (c3_target_reached(r, took), c4_boundary_band(r)),
        Err(e) => (Err(e.clone()), Err(e.clone())),
    };
    let results = [
        ("1 gap bound", c1_gap_bound()),
        ("2 simulated gap", c2_simulated_gap()),
        ("3 target reached safely", c3),
        ("4 boundary regulation", c4),
        ("5 gamma and mirror", c5_gamma()),
        ("6 validator fidelity", c6_validator()),
        ("7 integrator exactness", c7_integrator()),
        ("8 determinism and equivariance", c8_determinism()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
