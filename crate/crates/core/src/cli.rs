//! Command dispatch for the `relaxwave` binary.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use clap::Parser;

use crate::config::{Cli, Command, Format, RunConfig};
use crate::error::{Error, Result};
use crate::evans::{lambda_curves, nyquist_export, stability_verdict, winding_number, ContourLadder, EvansContext, Verdict};
use crate::io::{self, CsvTable};
use crate::numeric::{linspace, logspace};
use crate::pde::{HeavisideMode, SimConfig, Simulation};
use crate::poly::ModelParams;
use crate::profile::WaveProfile;
use crate::speed::{trace_curve, DEFAULT_C_MAX_PARABOLIC};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NO_WAVE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// Samples written by `profile`.
pub const PROFILE_SAMPLES: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Inconclusive,
}

/// Exit code for a failed run.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoRoot { .. }
        | Error::MultipleRoots { .. }
        | Error::NonRealResult { .. }
        | Error::HeavisideViolation(_)
        | Error::ThresholdMismatch { .. }
        | Error::NonPositiveThreshold(_)
        | Error::Classification(_)
        | Error::EmptyCurve => EXIT_NO_WAVE,
        Error::ZeroOnContour { .. } | Error::PatternBreakdown(_) => EXIT_INCONCLUSIVE,
        _ => EXIT_ERROR,
    }
}

/// Parse arguments, run, and report errors on stderr. Returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests land here too
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let config = match crate::config::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    run(&config)
}

/// Execute `config`, writing to `--out` or stdout.
pub fn run(config: &RunConfig) -> i32 {
    let mut buf = Vec::new();
    let status = match execute(config, &mut buf) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &config.output {
        Some(path) => std::fs::write(path, &buf),
        None => std::io::stdout().write_all(&buf),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_ERROR;
    }
    match status {
        Status::Ok => EXIT_OK,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// Run `config`, writing the main artifact to `out`. Simulation snapshots go
/// to files next to `--out`.
pub fn execute<W: Write>(config: &RunConfig, out: &mut W) -> Result<Status> {
    config.validate()?;
    log::info!("running {:?}", config.command);
    match config.command {
        Command::Profile => profile(config, out),
        Command::Speedcurve => speedcurve(config, out),
        Command::Evans => evans(config, out),
        Command::Winding => winding(config, out),
        Command::LambdaCurves => curves(config, out),
        Command::Simulate => simulate(config, out),
        Command::Verdict => verdict(config, out),
    }
}

fn context(params: &ModelParams) -> Result<EvansContext> {
    EvansContext::new(WaveProfile::build(params)?)
}

fn profile<W: Write>(config: &RunConfig, out: &mut W) -> Result<Status> {
    let wave = WaveProfile::build(&config.params)?;
    let (lo, hi) = wave.support(20.0);
    let samples = wave.sample(&linspace(lo, hi, PROFILE_SAMPLES));
    match config.format {
        Format::Csv => {
            let mut t = CsvTable::new(["z", "u", "du", "w"])
                .meta("config", config)?
                .meta("summary", &wave.summary())?;
            for s in &samples {
                t.push(vec![s.z, s.u, s.du, s.w]);
            }
            t.write_to(out)?;
        }
        Format::Json => io::write_json(
            out,
            config,
            vec![("summary", io::json(&wave.summary())?), ("samples", io::json(&samples)?)],
        )?,
    }
    Ok(Status::Ok)
}

fn speedcurve<W: Write>(config: &RunConfig, out: &mut W) -> Result<Status> {
    let p = &config.params;
    let g = &config.speed_grid;
    let c_max = g.c_max.unwrap_or(if p.tau > 0.0 {
        0.999 / p.tau.sqrt()
    } else {
        DEFAULT_C_MAX_PARABOLIC
    });
    let curve = trace_curve(p.b, p.d, p.tau, &logspace(g.c_min, c_max, g.c_steps))?;
    let fold = curve.refined_fold().ok().or(curve.fold);
    let solution = match p.a {
        Some(a) => Some(curve.solve_for_threshold(a)?),
        None => None,
    };
    let summary = json!({
        "fold": fold,
        "gaps": curve.gaps,
        "interior_maxima": curve.interior_maxima,
        "solution": solution,
    });
    match config.format {
        Format::Csv => {
            let mut t = CsvTable::new(["c", "a", "s", "z1", "alpha3"])
                .meta("config", config)?
                .meta("summary", &summary)?;
            for q in &curve.points {
                t.push(vec![q.c, q.a, q.s, q.z1, q.alpha3]);
            }
            t.write_to(out)?;
        }
        Format::Json => io::write_json(out, config, vec![("summary", summary), ("points", io::json(&curve.points)?)])?,
    }
    Ok(Status::Ok)
}

fn evans<W: Write>(config: &RunConfig, out: &mut W) -> Result<Status> {
    let ctx = context(&config.params)?;
    let trace = nyquist_export(&ctx, &config.contour)?;
    let summary = json!({
        "total_arg": trace.total_arg,
        "min_abs_E": trace.min_abs_e,
        "pattern_violations": trace.pattern_violations,
        "samples": trace.samples.len(),
    });
    match config.format {
        Format::Csv => {
            let mut t = CsvTable::new(["re_lambda", "im_lambda", "re_E", "im_E"])
                .meta("config", config)?
                .meta("summary", &summary)?;
            for s in &trace.samples {
                t.push(vec![s.lambda[0], s.lambda[1], s.e[0], s.e[1]]);
            }
            t.write_to(out)?;
        }
        Format::Json => io::write_json(out, config, vec![("summary", summary), ("samples", io::json(&trace.samples)?)])?,
    }
    Ok(Status::Ok)
}

fn winding<W: Write>(config: &RunConfig, out: &mut W) -> Result<Status> {
    let ctx = context(&config.params)?;
    let w = winding_number(&ctx, &config.contour)?;
    match config.format {
        Format::Csv => {
            let mut t = CsvTable::new(["r", "R", "n_zeros", "min_abs_E", "samples"]).meta("config", config)?;
            t.push(vec![w.r, w.big_r, w.n_zeros as f64, w.min_abs_e, w.samples as f64]);
            t.write_to(out)?;
        }
        Format::Json => {
            let serde_json::Value::Object(fields) = io::json(&w)? else {
                unreachable!("winding result serializes to an object")
            };
            io::write_json(out, config, fields)?
        }
    }
    Ok(Status::Ok)
}

fn curves<W: Write>(config: &RunConfig, out: &mut W) -> Result<Status> {
    let g = &config.wave_grid;
    let curves = lambda_curves(&config.params, &linspace(-g.k_max, g.k_max, g.k_steps))?;
    let summary = json!({ "max_real_part": curves.max_real_part() });
    match config.format {
        Format::Csv => {
            let mut cols = vec!["k".to_string()];
            for j in 1..=curves.branches.len() {
                cols.push(format!("re_lambda_{j}"));
                cols.push(format!("im_lambda_{j}"));
            }
            let mut t = CsvTable::new(cols).meta("config", config)?.meta("summary", &summary)?;
            for (i, &k) in curves.k_grid.iter().enumerate() {
                let mut row = vec![k];
                for br in &curves.branches {
                    row.extend_from_slice(&br[i]);
                }
                t.push(row);
            }
            t.write_to(out)?;
        }
        Format::Json => io::write_json(out, config, vec![("summary", summary), ("curves", io::json(&curves)?)])?,
    }
    Ok(Status::Ok)
}

/// Simulation setup resolved against the wave.
pub fn sim_config(config: &RunConfig, wave: &WaveProfile) -> SimConfig {
    let s = &config.sim;
    let mut sim = SimConfig::for_profile(wave, s.nx);
    if let Some(t) = s.t_end {
        sim.t_end = t;
        sim.half_length = SimConfig::required_half_length(wave, t);
    }
    if let Some(l) = s.half_length {
        sim.half_length = l;
    }
    sim.dt = s.dt;
    sim.perturb_eps = s.eps;
    sim.heaviside = match s.smooth {
        Some(width) => HeavisideMode::Smoothed { width },
        None => HeavisideMode::Sharp,
    };
    sim.snapshot_times = s.snapshots.clone();
    sim
}

/// `run.csv` -> `run.snap0.csv`, `run.snap1.csv`, ...
pub fn snapshot_path(out: &Path, i: usize) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.snap{i}.csv"))
}

fn simulate<W: Write>(config: &RunConfig, out: &mut W) -> Result<Status> {
    let wave = WaveProfile::build(&config.params)?;
    let report = Simulation::new(&wave, sim_config(config, &wave)).run()?;
    let summary = json!({
        "speed_est": report.speed_est,
        "final_shape_err": report.final_shape_err,
        "max_shape_err": report.max_shape_err,
        "unstable": report.unstable,
        "reason": report.reason,
        "dt": report.dt,
        "dx": report.dx,
        "steps": report.steps,
        "L": report.config.half_length,
        "T": report.config.t_end,
    });
    match config.format {
        Format::Csv => {
            let mut t = CsvTable::new(["t", "front", "shift", "shape_err", "amplitude_ratio"])
                .meta("config", config)?
                .meta("summary", &summary)?;
            for m in &report.series {
                t.push(vec![m.t, m.front, m.shift, m.shape_err, m.amplitude_ratio]);
            }
            t.write_to(out)?;
        }
        Format::Json => io::write_json(out, config, vec![("summary", summary), ("series", io::json(&report.series)?)])?,
    }
    match &config.output {
        Some(path) => {
            for (i, snap) in report.snapshots.iter().enumerate() {
                let mut t = CsvTable::new(["x", "u", "w"])
                    .meta("config", config)?
                    .meta("snapshot", &json!({ "t": snap.t }))?;
                for k in 0..snap.x.len() {
                    t.push(vec![snap.x[k], snap.u[k], snap.w[k]]);
                }
                let mut f = std::fs::File::create(snapshot_path(path, i))?;
                t.write_to(&mut f)?;
            }
        }
        None if !report.snapshots.is_empty() => log::warn!("snapshots need --out; skipped"),
        None => {}
    }
    Ok(Status::Ok)
}

fn verdict<W: Write>(config: &RunConfig, out: &mut W) -> Result<Status> {
    let ctx = context(&config.params)?;
    let ladder = ContourLadder {
        n_arc: config.contour.n_arc,
        n_seg: config.contour.n_seg,
        ..ContourLadder::default()
    };
    let report = stability_verdict(&ctx, &ladder)?;
    match config.format {
        Format::Csv => {
            let mut t = CsvTable::new(["r", "R", "n_zeros", "min_abs_E", "samples"])
                .meta("config", config)?
                .meta("verdict", &report.verdict)?;
            for w in &report.windings {
                t.push(vec![w.r, w.big_r, w.n_zeros as f64, w.min_abs_e, w.samples as f64]);
            }
            t.write_to(out)?;
        }
        Format::Json => io::write_json(
            out,
            config,
            vec![("verdict", io::json(&report.verdict)?), ("windings", io::json(&report.windings)?)],
        )?,
    }
    Ok(match report.verdict {
        Verdict::Inconclusive { .. } => Status::Inconclusive,
        _ => Status::Ok,
    })
}
