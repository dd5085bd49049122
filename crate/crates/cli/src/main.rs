use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use slidenav::analysis::{
    compare_routes, delta_bound, delta_table, ComparisonScenario, RouteSimConfig, DEFAULT_STEP_FRACTION,
};
use slidenav::export::{trajectory_csv, trajectory_svg};
use slidenav::scenario::{load_scenario, preset, random_theorem_scenario, scenario_to_json, PRESETS};
use slidenav::sim::{path_length, run_batch, run_with, ControllerKind, Outcome, RunOptions, ScenarioSpec, SimError};
use slidenav::Exec;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const SIM_BOUND_FACTOR: f64 = 1.05;

#[derive(Parser)]
#[command(name = "slidenav", version, about = "Sliding-mode obstacle avoidance simulator")]
struct Cli {
    /// Run everything on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Controller {
    Sliding,
    Pursuit,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario against every parameter and geometry condition.
    Validate {
        scenario: PathBuf,
        /// Boundary samples per neighbourhood for the non-blocking check.
        #[arg(long, default_value_t = slidenav::sliding::DEFAULT_NON_BLOCKING_SAMPLES)]
        samples: usize,
    },
    /// Simulate a scenario.
    Run {
        scenario: PathBuf,
        /// Override the controller named in the file.
        #[arg(long, value_enum)]
        controller: Option<Controller>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Refuse to run when validation fails.
        #[arg(long)]
        strict: bool,
    },
    /// Path-length gap between the two controllers around a straight wall.
    Compare {
        /// Sensor range.
        #[arg(long = "L", default_value_t = 1.0)]
        range: f64,
        /// Lateral offset at the start of the bypass.
        #[arg(long)]
        y0: f64,
        /// Wall length beyond the first contact point, or "inf".
        #[arg(long, default_value = "inf")]
        wall: String,
        /// Also tabulate y0/L = 0.1, 0.25, 0.5, 0.75, 1.
        #[arg(long)]
        table: bool,
        /// Skip the closed-loop simulation.
        #[arg(long)]
        no_sim: bool,
        /// Write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run a batch: random validated scenes, or one scenario under varied
    /// parameter values.
    Sweep {
        /// Base scenario; omit to draw random scenes.
        scenario: Option<PathBuf>,
        /// Parameter to vary (any numeric field of the params block).
        #[arg(long, requires = "scenario")]
        param: Option<String>,
        /// Comma-separated values for --param.
        #[arg(long, value_delimiter = ',', requires = "param")]
        values: Vec<f64>,
        /// Number of random scenes.
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write a built-in scenario as JSON.
    Init {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
        preset: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn load(path: &Path) -> Result<ScenarioSpec, u8> {
    load_scenario(path).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_USAGE
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn outcome_line(o: &Outcome) -> String {
    match o {
        Outcome::TargetReached { t_f } => format!("target reached at t = {t_f:.3} s"),
        Outcome::Timeout { t } => format!("timeout at t = {t:.3} s"),
        Outcome::SafetyViolated { t, d } => format!("safety violated at t = {t:.3} s (d = {d:.4})"),
        Outcome::ControllerFault { t, reason } => format!("controller fault at t = {t:.3} s: {reason}"),
    }
}

fn cmd_validate(path: &Path, samples: usize, exec: Exec) -> Result<u8> {
    let spec = match load(path) {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let report = slidenav::sliding::validate_with(exec, &spec.scene, &spec.params, &spec.sensor, samples);
    print!("{report}");
    Ok(if report.all_pass() { 0 } else { EXIT_FAIL })
}

fn cmd_run(
    path: &Path,
    controller: Option<Controller>,
    csv: Option<&Path>,
    svg: Option<&Path>,
    strict: bool,
    exec: Exec,
) -> Result<u8> {
    let mut spec = match load(path) {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    if let Some(c) = controller {
        spec.sim.controller = match c {
            Controller::Sliding => ControllerKind::Sliding,
            Controller::Pursuit => ControllerKind::Pursuit,
        };
    }
    let traj = match run_with(&spec, &RunOptions { strict, exec }) {
        Ok(t) => t,
        Err(SimError::Validation(report)) => {
            print!("{report}");
            eprintln!("error: validation failed; not running in strict mode");
            return Ok(EXIT_FAIL);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_USAGE);
        }
    };
    if !traj.validation.all_pass() {
        eprintln!("warning: scenario fails validation; convergence is not guaranteed");
    }
    println!("{}", outcome_line(&traj.outcome));
    println!("path length {:.3} m, min distance {}", path_length(&traj), slidenav::geo::fmt_len(traj.min_distance));
    println!("mode-B intervals {}", traj.mode_b_intervals().len());
    if traj.obstacle_lost_ticks > 0 {
        println!("obstacle lost on {} ticks", traj.obstacle_lost_ticks);
    }
    if traj.discontinuities > 0 {
        println!("pursuit target switched {} times", traj.discontinuities);
    }
    if let Some(p) = csv {
        write(p, &trajectory_csv(&traj))?;
    }
    if let Some(p) = svg {
        write(p, &trajectory_svg(&spec, &traj))?;
    }
    Ok(traj.outcome.exit_code() as u8)
}

fn parse_wall(s: &str) -> Result<f64> {
    match s {
        "inf" | "infinity" => Ok(f64::INFINITY),
        _ => s.parse::<f64>().with_context(|| format!("invalid wall extent {s:?}")),
    }
}

fn cmd_compare(l: f64, y0: f64, wall: &str, table: bool, no_sim: bool, csv: Option<&Path>, exec: Exec) -> Result<u8> {
    let wall = match parse_wall(wall) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_USAGE);
        }
    };
    let sc = match ComparisonScenario::new(l, y0, wall) {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_USAGE);
        }
    };
    let ds = DEFAULT_STEP_FRACTION * l;
    let mut fractions = vec![y0 / l];
    if table {
        fractions.extend([0.1, 0.25, 0.5, 0.75, 1.0].iter().filter(|&&q| q != y0 / l));
    }
    let rows = delta_table(exec, l, &fractions, wall, ds)?;
    let mut ok = rows[0].delta_numeric_over_l > 0.0 && rows[0].bound_slack >= -1e-9;

    let sim = if no_sim || wall.is_infinite() {
        None
    } else {
        let r = compare_routes(&sc, &RouteSimConfig::for_scenario(&sc), ds, exec)?;
        // the simulated gap carries discretization error; allow 5 % over the bound
        ok &= r.delta > 0.0 && r.delta <= SIM_BOUND_FACTOR * delta_bound(l);
        Some(r)
    };

    println!("L = {l}, wall = {}", slidenav::geo::fmt_len(wall));
    println!("{:>8} {:>14} {:>14} {:>12}", "y0/L", "delta_num/L", "delta_inf/L", "bound_slack");
    let mut out = String::from("y0_over_l,delta_numeric_over_l,delta_closed_over_l,bound_slack\n");
    for r in &rows {
        println!(
            "{:>8.4} {:>14.9} {:>14.9} {:>12.9}",
            r.y0_over_l, r.delta_numeric_over_l, r.delta_closed_over_l, r.bound_slack
        );
        out.push_str(&format!("{},{},{},{}\n", r.y0_over_l, r.delta_numeric_over_l, r.delta_closed_over_l, r.bound_slack));
    }
    if let Some(r) = &sim {
        println!(
            "simulated: sliding {:.4} m, pursuit {:.4} m, delta/L {:.6} ({:+.2}% vs quadrature)",
            r.len_sliding,
            r.len_pursuit,
            r.delta / l,
            100.0 * (r.delta / r.delta_numeric - 1.0)
        );
    } else if !no_sim {
        println!("simulated: skipped for an unbounded wall");
    }
    if let Some(p) = csv {
        write(p, &out)?;
    }
    Ok(if ok { 0 } else { EXIT_FAIL })
}

fn set_param(spec: &mut ScenarioSpec, name: &str, value: f64) -> Result<()> {
    let mut json = serde_json::to_value(&spec.params)?;
    let slot = json.get_mut(name).with_context(|| format!("unknown parameter {name:?}"))?;
    if !slot.is_number() {
        bail!("parameter {name:?} is not numeric");
    }
    *slot = serde_json::json!(value);
    spec.params = serde_json::from_value(json).with_context(|| format!("setting {name} = {value}"))?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    base: Option<&Path>,
    param: Option<&str>,
    values: &[f64],
    seeds: u64,
    first_seed: u64,
    csv: Option<&Path>,
    exec: Exec,
) -> Result<u8> {
    let (labels, specs): (Vec<String>, Vec<ScenarioSpec>) = match (base, param) {
        (Some(path), Some(name)) => {
            let base = match load(path) {
                Ok(s) => s,
                Err(code) => return Ok(code),
            };
            if values.is_empty() {
                eprintln!("error: --values is empty");
                return Ok(EXIT_USAGE);
            }
            let mut specs = Vec::new();
            for &v in values {
                let mut s = base.clone();
                if let Err(e) = set_param(&mut s, name, v) {
                    eprintln!("error: {e:#}");
                    return Ok(EXIT_USAGE);
                }
                specs.push(s);
            }
            (values.iter().map(|v| format!("{name}={v}")).collect(), specs)
        }
        (Some(path), None) => {
            let s = match load(path) {
                Ok(s) => s,
                Err(code) => return Ok(code),
            };
            (vec!["base".into()], vec![s])
        }
        _ => {
            let range = first_seed..first_seed + seeds;
            let specs = exec.map_slice(&range.clone().collect::<Vec<_>>(), |&s| random_theorem_scenario(s));
            (range.map(|s| format!("seed={s}")).collect(), specs)
        }
    };
    let results = run_batch(&specs, &RunOptions { strict: false, exec });
    let mut out = String::from("case,outcome,t_end,min_distance,path_length,mode_b_intervals,valid\n");
    let mut all_reached = true;
    for (label, res) in labels.iter().zip(results) {
        let line = match res {
            Ok(t) => {
                let (name, t_end) = match &t.outcome {
                    Outcome::TargetReached { t_f } => ("target_reached", *t_f),
                    Outcome::Timeout { t } => ("timeout", *t),
                    Outcome::SafetyViolated { t, .. } => ("safety_violated", *t),
                    Outcome::ControllerFault { t, .. } => ("controller_fault", *t),
                };
                all_reached &= name == "target_reached";
                format!(
                    "{label},{name},{t_end},{},{},{},{}",
                    slidenav::geo::fmt_len(t.min_distance),
                    path_length(&t),
                    t.mode_b_intervals().len(),
                    t.validation.all_pass()
                )
            }
            Err(e) => {
                all_reached = false;
                format!("{label},error,,,,,\"{e}\"")
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    print!("{out}");
    if let Some(p) = csv {
        write(p, &out)?;
    }
    Ok(if all_reached { 0 } else { EXIT_FAIL })
}

fn cmd_init(name: &str, output: Option<&Path>) -> Result<u8> {
    let spec = preset(name).with_context(|| format!("unknown preset {name}"))?;
    let json = scenario_to_json(&spec) + "\n";
    match output {
        Some(p) => write(p, &json)?,
        None => print!("{json}"),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let result = match &cli.command {
        Command::Validate { scenario, samples } => cmd_validate(scenario, *samples, exec),
        Command::Run { scenario, controller, csv, svg, strict } => {
            cmd_run(scenario, *controller, csv.as_deref(), svg.as_deref(), *strict, exec)
        }
        Command::Compare { range, y0, wall, table, no_sim, csv } => {
            cmd_compare(*range, *y0, wall, *table, *no_sim, csv.as_deref(), exec)
        }
        Command::Sweep { scenario, param, values, seeds, seed, csv } => {
            cmd_sweep(scenario.as_deref(), param.as_deref(), values, *seeds, *seed, csv.as_deref(), exec)
        }
        Command::Init { preset, output } => cmd_init(preset, output.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
