//! Command-line front end. [`run`] parses arguments, executes one command
//! and returns the process exit code:
//!
//! * 0: every check passed
//! * 1: a check failed
//! * 2: bad input (unreadable or malformed model, unknown section, …)
//! * 3: internal inconsistency

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::algebroid::VALIDITY_TOL;
use crate::dynamics::{integrate, Trajectory, DEFAULT_STEP};
use crate::hj::{self, COCYCLE_TOL, FLOW_TOL, HJ_TOL, X_EQUATION_TOL};
use crate::modelfile::{load_model, resolve_section};
use crate::models::{by_name, Model};
use crate::sample::{SamplePlan, DEFAULT_BOX, DEFAULT_COUNT, DEFAULT_SEED};
use crate::{Error, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

/// Default horizon of `verify`.
pub const DEFAULT_HORIZON: f64 = 1.0;
/// Default number of initial points of `verify`.
pub const DEFAULT_X0_POINTS: usize = 10;
/// Thresholds of the witness search run by `verify` when (ii) fails.
pub const WITNESS_HJ: f64 = 0.1;
pub const WITNESS_R: f64 = 1e-3;
pub const WITNESS_RADIUS: f64 = 0.1;

/// Every default used by the commands, as printed by `--show-defaults`.
pub fn defaults_table() -> Vec<(&'static str, String)> {
    vec![
        ("box", format!("[{}, {}]", DEFAULT_BOX.0, DEFAULT_BOX.1)),
        ("samples", DEFAULT_COUNT.to_string()),
        ("seed", DEFAULT_SEED.to_string()),
        ("step", format!("{DEFAULT_STEP:e}")),
        ("horizon", DEFAULT_HORIZON.to_string()),
        ("x0_points", DEFAULT_X0_POINTS.to_string()),
        ("validity_tol", format!("{VALIDITY_TOL:e}")),
        ("cocycle_tol", format!("{COCYCLE_TOL:e}")),
        ("hj_tol", format!("{HJ_TOL:e}")),
        ("flow_tol", format!("{FLOW_TOL:e}")),
        ("x_equation_tol", format!("{X_EQUATION_TOL:e}")),
        ("witness_hj", format!("{WITNESS_HJ:e}")),
        ("witness_r", format!("{WITNESS_R:e}")),
        ("witness_radius", WITNESS_RADIUS.to_string()),
    ]
}

#[derive(Debug, Parser)]
#[command(name = "lieaff", version, about = "Hamiltonian mechanics and Hamilton-Jacobi checks on Lie affgebroids")]
struct Cli {
    /// Print every default value and exit.
    #[arg(long)]
    show_defaults: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Args)]
struct Sampling {
    /// Sampling box for one variable, `NAME=LO:HI`; repeatable.
    #[arg(long = "box", value_name = "NAME=LO:HI", allow_hyphen_values = true)]
    boxes: Vec<String>,
    /// Number of sample points.
    #[arg(long)]
    samples: Option<usize>,
    /// Seed of the sample points.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the algebroid axioms of the bidual, vertical and prolongation charts.
    Validate {
        /// Model file, or a built-in model name such as `rigid:1,2,3`.
        model: String,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Integrate the Hamilton equations and write a CSV trajectory.
    Flow {
        model: String,
        /// Initial base point, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        /// Initial fiber point, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        y0: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long = "t-end", allow_hyphen_values = true)]
        t_end: f64,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write every k-th step (the last state is always written).
        #[arg(long, default_value_t = 1)]
        every: usize,
    },
    /// Check the cocycle condition and the Hamilton-Jacobi equation for a section.
    Hj {
        model: String,
        /// Section name from the model, `W=<expr>`, or `<alpha0>;<alpha1>,…`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Compare the flow condition along integral curves with the HJ equation.
    Verify {
        model: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// Initial points `a,b;c,d;…`; seeded points from the model's x0 box when absent.
        #[arg(long = "x0-set", allow_hyphen_values = true)]
        x0_set: Option<String>,
        /// Number of seeded initial points when `--x0-set` is absent.
        #[arg(long, default_value_t = DEFAULT_X0_POINTS)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_HORIZON)]
        horizon: f64,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
        #[command(flatten)]
        sampling: Sampling,
    },
}

/// Runs one command, writing reports to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    if cli.show_defaults {
        for (k, v) in defaults_table() {
            let _ = writeln!(out, "{k} = {v}");
        }
        return EXIT_PASS;
    }
    let Some(command) = cli.command else {
        let _ = writeln!(err, "no command given; see --help");
        return EXIT_INPUT;
    };
    let result = match command {
        Command::Validate { model, sampling } => cmd_validate(&model, &sampling, out),
        Command::Flow { model, x0, y0, t0, t_end, step, out: path, every } => {
            cmd_flow(&model, &x0, &y0, t0, t_end, step, path.as_deref(), every, out)
        }
        Command::Hj { model, alpha, sampling } => cmd_hj(&model, &alpha, &sampling, out),
        Command::Verify { model, alpha, x0_set, points, horizon, step, sampling } => {
            cmd_verify(&model, &alpha, x0_set.as_deref(), points, horizon, step, &sampling, out)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Integration { .. } => EXIT_FAIL,
                _ => EXIT_INPUT,
            }
        }
    }
}

/// A model file, or a built-in model when no such file exists.
pub fn load(model: &str) -> Result<Model> {
    let path = Path::new(model);
    if path.exists() {
        return load_model(path);
    }
    by_name(model).map_err(|_| Error::Model(format!("`{model}` is neither a readable file nor a built-in model")))
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("`{v}` is not a number"))))
        .collect()
}

fn apply_sampling(model: &Model, sampling: &Sampling) -> Result<SamplePlan> {
    let mut plan = model.plan.clone();
    for spec in &sampling.boxes {
        let bad = || Error::Invalid(format!("box `{spec}` must look like NAME=LO:HI"));
        let (name, range) = spec.split_once('=').ok_or_else(bad)?;
        let (lo, hi) = range.split_once(':').ok_or_else(bad)?;
        let (lo, hi): (f64, f64) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
        if !model.chart.phase_vars().iter().any(|v| v == name) {
            return Err(Error::Invalid(format!("box for unknown variable `{name}`")));
        }
        if !(lo <= hi) {
            return Err(bad());
        }
        plan = plan.with_box(name, lo, hi);
    }
    if let Some(n) = sampling.samples {
        plan.count = n;
    }
    if let Some(s) = sampling.seed {
        plan.seed = s;
    }
    Ok(plan)
}

fn header(out: &mut dyn Write, model: &Model, plan: &SamplePlan) -> Result<()> {
    writeln!(out, "model = {}", model.name)?;
    writeln!(out, "samples = {}", plan.count)?;
    writeln!(out, "seed = {}", plan.seed)?;
    Ok(())
}

fn cmd_validate(model: &str, sampling: &Sampling, out: &mut dyn Write) -> Result<i32> {
    let model = load(model)?;
    let plan = apply_sampling(&model, sampling)?;
    let report = model.chart.validate(&plan)?;
    header(out, &model, &plan)?;
    write!(out, "{report}")?;
    Ok(if report.is_valid() { EXIT_PASS } else { EXIT_FAIL })
}

/// CSV text of a trajectory, header `t,<base vars>,<fiber vars>`.
pub fn trajectory_csv(model: &Model, traj: &Trajectory<f64>, every: usize) -> String {
    let mut csv = String::from("t");
    for v in model.chart.phase_vars() {
        csv.push(',');
        csv.push_str(&v);
    }
    csv.push('\n');
    let last = traj.len() - 1;
    for (k, (t, z)) in traj.times.iter().zip(&traj.states).enumerate() {
        if k % every.max(1) != 0 && k != last {
            continue;
        }
        let _ = write!(csv, "{t}");
        for v in z {
            let _ = write!(csv, ",{v}");
        }
        csv.push('\n');
    }
    if let Some(reason) = &traj.aborted {
        let _ = writeln!(csv, "# ABORTED: {reason}");
    }
    csv
}

#[allow(clippy::too_many_arguments)]
fn cmd_flow(
    model: &str,
    x0: &str,
    y0: &str,
    t0: f64,
    t_end: f64,
    step: f64,
    path: Option<&Path>,
    every: usize,
    out: &mut dyn Write,
) -> Result<i32> {
    let model = load(model)?;
    let mut state = parse_list(x0)?;
    state.extend(parse_list(y0)?);
    let traj = integrate(&model.hamiltonian, &state, t0, t_end, step)?;
    let csv = trajectory_csv(&model, &traj, every);
    match path {
        Some(p) => {
            std::fs::write(p, &csv)?;
            writeln!(out, "rows = {}", traj.len())?;
            writeln!(out, "complete = {}", traj.is_complete())?;
        }
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(if traj.is_complete() { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_hj(model: &str, alpha: &str, sampling: &Sampling, out: &mut dyn Write) -> Result<i32> {
    let model = load(model)?;
    let plan = apply_sampling(&model, sampling)?;
    let section = resolve_section(&model, alpha)?;
    let report = hj::hj_report(&section, &model.hamiltonian, &plan)?;
    header(out, &model, &plan)?;
    writeln!(out, "alpha = {alpha}")?;
    writeln!(out, "f = {}", hj::f_of(&model.hamiltonian, &section))?;
    write!(out, "{report}")?;
    Ok(if report.holds() { EXIT_PASS } else { EXIT_FAIL })
}

fn parse_x0_set(spec: &str, dim: usize) -> Result<Vec<Vec<f64>>> {
    spec.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|p| {
            let x = parse_list(p)?;
            if x.len() != dim {
                return Err(Error::Invalid(format!("initial point `{p}` needs {dim} coordinates")));
            }
            Ok(x)
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    model: &str,
    alpha: &str,
    x0_set: Option<&str>,
    points: usize,
    horizon: f64,
    step: f64,
    sampling: &Sampling,
    out: &mut dyn Write,
) -> Result<i32> {
    let model = load(model)?;
    let plan = apply_sampling(&model, sampling)?;
    let section = resolve_section(&model, alpha)?;
    let x0s = match x0_set {
        Some(spec) => parse_x0_set(spec, model.chart.base_dim())?,
        None => model.x0_plan(points, plan.seed).points::<f64, _>(model.chart.vars()),
    };
    if x0s.is_empty() {
        return Err(Error::Invalid("no initial points".into()));
    }
    header(out, &model, &plan)?;
    writeln!(out, "alpha = {alpha}")?;
    writeln!(out, "horizon = {horizon}")?;
    writeln!(out, "step = {step:e}")?;
    let batch = match hj::verify_batch(&section, &model.hamiltonian, &x0s, horizon, step, &plan) {
        Err(Error::NotCocycle { residual }) => {
            writeln!(out, "cocycle_residual = {residual:.6e}")?;
            writeln!(out, "cocycle = false")?;
            return Ok(EXIT_INPUT);
        }
        other => other?,
    };
    write!(out, "{batch}")?;
    if !batch.condition_ii() {
        let witness = match batch.runs.iter().position(|r| r.max_r >= WITNESS_R) {
            Some(k) => Some((batch.runs[k].x0.clone(), batch.runs[k].max_r)),
            None => hj::find_witness(
                &section,
                &model.hamiltonian,
                &plan,
                horizon,
                step,
                WITNESS_HJ,
                WITNESS_R,
                WITNESS_RADIUS,
                DEFAULT_X0_POINTS,
            )?
            .map(|w| (w.report.x0, w.report.max_r)),
        };
        match witness {
            Some((x0, r)) => {
                let x0: Vec<String> = x0.iter().map(|v| v.to_string()).collect();
                writeln!(out, "witness_x0 = {}", x0.join(","))?;
                writeln!(out, "witness_max_r = {r:.6e}")?;
            }
            None => writeln!(out, "witness_x0 = none")?,
        }
    }
    if !batch.consistent() || !batch.agree() {
        return Ok(EXIT_INCONSISTENT);
    }
    Ok(if batch.condition_i() { EXIT_PASS } else { EXIT_FAIL })
}
