//! Run configuration: command-line flags over an optional flat `key=value`
//! file over defaults.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evans::HalfRingContour;
use crate::poly::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Profile,
    Speedcurve,
    Evans,
    Winding,
    LambdaCurves,
    Simulate,
    Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Speed grid for `speedcurve`; `c_max` defaults to just below `1 / sqrt(tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedGrid {
    pub c_min: f64,
    pub c_max: Option<f64>,
    pub c_steps: usize,
}

/// Symmetric wavenumber grid `[-k_max, k_max]` for `lambda-curves`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveGrid {
    pub k_max: f64,
    pub k_steps: usize,
}

/// Simulation settings; `L` and `T` default to the values sized for the wave.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSettings {
    #[serde(rename = "L")]
    pub half_length: Option<f64>,
    pub nx: usize,
    pub dt: Option<f64>,
    #[serde(rename = "T")]
    pub t_end: Option<f64>,
    pub eps: f64,
    /// Width of the smoothed Heaviside; sharp when absent.
    pub smooth: Option<f64>,
    pub snapshots: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub params: ModelParams,
    pub contour: HalfRingContour,
    pub speed_grid: SpeedGrid,
    pub wave_grid: WaveGrid,
    pub sim: SimSettings,
    pub output: Option<PathBuf>,
    pub format: Format,
}

pub const DEFAULT_B: f64 = 0.5;
pub const DEFAULT_C: f64 = 1.5;
pub const DEFAULT_D: f64 = 0.1;
pub const DEFAULT_TAU: f64 = 0.1;

#[derive(Debug, Parser)]
#[command(name = "relaxwave", version, about = "Solitary waves of the relaxing McKean-FitzHugh-Nagumo system")]
pub struct Cli {
    /// What to compute.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Flat key=value file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Prescribed threshold (checked against the one implied by c).
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Inner contour radius.
    #[arg(long)]
    pub r: Option<f64>,
    /// Outer contour radius.
    #[arg(long = "R")]
    pub big_r: Option<f64>,
    #[arg(long)]
    pub n_arc: Option<usize>,
    #[arg(long)]
    pub n_seg: Option<usize>,
    #[arg(long)]
    pub c_min: Option<f64>,
    #[arg(long)]
    pub c_max: Option<f64>,
    #[arg(long)]
    pub c_steps: Option<usize>,
    #[arg(long)]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub k_steps: Option<usize>,
    /// Half-length of the simulation domain.
    #[arg(long = "L")]
    pub half_length: Option<f64>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Simulated time.
    #[arg(long = "T")]
    pub t_end: Option<f64>,
    /// Relative amplitude perturbation of the initial wave.
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Smoothed Heaviside width.
    #[arg(long)]
    pub smooth: Option<f64>,
    /// Comma-separated snapshot times.
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Every key accepted in a config file (hyphens and underscores are interchangeable).
pub const FILE_KEYS: &[&str] = &[
    "command", "a", "b", "c", "d", "tau", "r", "R", "n-arc", "n-seg", "c-min", "c-max", "c-steps", "k-max",
    "k-steps", "L", "nx", "dt", "T", "eps", "smooth", "snapshots", "out", "format",
];

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| Error::Parse {
        key: key.to_string(),
        msg: format!("`{v}`: {e}"),
    })
}

fn parse_enum<T: ValueEnum>(key: &str, v: &str) -> Result<T> {
    T::from_str(v, true).map_err(|e| Error::Parse {
        key: key.to_string(),
        msg: e,
    })
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

/// Parse `key = value` lines into the flag set. `#` starts a comment.
pub fn parse_file(contents: &str) -> Result<Cli> {
    let mut cli = Cli::parse_from(["relaxwave"]);
    for (lineno, raw) in contents.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            key: format!("line {}", lineno + 1),
            msg: format!("expected key=value, got `{line}`"),
        })?;
        let key = key.trim().replace('_', "-");
        let v = value.trim();
        match key.as_str() {
            "command" => cli.command = Some(parse_enum(&key, v)?),
            "a" => cli.a = Some(parse_value(&key, v)?),
            "b" => cli.b = Some(parse_value(&key, v)?),
            "c" => cli.c = Some(parse_value(&key, v)?),
            "d" => cli.d = Some(parse_value(&key, v)?),
            "tau" => cli.tau = Some(parse_value(&key, v)?),
            "r" => cli.r = Some(parse_value(&key, v)?),
            "R" => cli.big_r = Some(parse_value(&key, v)?),
            "n-arc" => cli.n_arc = Some(parse_value(&key, v)?),
            "n-seg" => cli.n_seg = Some(parse_value(&key, v)?),
            "c-min" => cli.c_min = Some(parse_value(&key, v)?),
            "c-max" => cli.c_max = Some(parse_value(&key, v)?),
            "c-steps" => cli.c_steps = Some(parse_value(&key, v)?),
            "k-max" => cli.k_max = Some(parse_value(&key, v)?),
            "k-steps" => cli.k_steps = Some(parse_value(&key, v)?),
            "L" => cli.half_length = Some(parse_value(&key, v)?),
            "nx" => cli.nx = Some(parse_value(&key, v)?),
            "dt" => cli.dt = Some(parse_value(&key, v)?),
            "T" => cli.t_end = Some(parse_value(&key, v)?),
            "eps" => cli.eps = Some(parse_value(&key, v)?),
            "smooth" => cli.smooth = Some(parse_value(&key, v)?),
            "snapshots" => cli.snapshots = Some(parse_list(&key, v)?),
            "out" => cli.out = Some(PathBuf::from(v)),
            "format" => cli.format = Some(parse_enum(&key, v)?),
            _ => {
                return Err(Error::Parse {
                    key,
                    msg: "unknown key".into(),
                })
            }
        }
    }
    Ok(cli)
}

macro_rules! overlay {
    ($top:expr, $base:expr; $($field:ident),*) => {
        $( if $top.$field.is_none() { $top.$field = $base.$field.take(); } )*
    };
}

/// Resolve a configuration from command-line `args` (program name first) and
/// the contents of an optional config file. Flags override file values.
pub fn parse_config<I, T>(args: I, file: Option<&str>) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Parse {
        key: "args".into(),
        msg: e.to_string().trim().to_string(),
    })?;
    resolve(cli, file)
}

/// Resolve parsed flags, reading the file named by `--config` if present.
pub fn from_cli(cli: Cli) -> Result<RunConfig> {
    let contents = match &cli.config {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|e| Error::Parse {
            key: "config".into(),
            msg: format!("{}: {e}", path.display()),
        })?),
        None => None,
    };
    resolve(cli, contents.as_deref())
}

fn resolve(mut cli: Cli, file: Option<&str>) -> Result<RunConfig> {
    if let Some(contents) = file {
        let mut base = parse_file(contents)?;
        overlay!(cli, base; command, a, b, c, d, tau, r, big_r, n_arc, n_seg, c_min, c_max, c_steps,
            k_max, k_steps, half_length, nx, dt, t_end, eps, smooth, snapshots, out, format);
    }
    let command = cli.command.ok_or_else(|| Error::Parse {
        key: "command".into(),
        msg: "missing (profile | speedcurve | evans | winding | lambda-curves | simulate | verdict)".into(),
    })?;
    let params = ModelParams {
        a: cli.a,
        b: cli.b.unwrap_or(DEFAULT_B),
        c: cli.c.unwrap_or(DEFAULT_C),
        d: cli.d.unwrap_or(DEFAULT_D),
        tau: cli.tau.unwrap_or(DEFAULT_TAU),
    };
    let config = RunConfig {
        command,
        params,
        contour: HalfRingContour {
            r: cli.r.unwrap_or(0.1),
            big_r: cli.big_r.unwrap_or(20.0),
            n_arc: cli.n_arc.unwrap_or(1000),
            n_seg: cli.n_seg.unwrap_or(1000),
        },
        speed_grid: SpeedGrid {
            c_min: cli.c_min.unwrap_or(crate::speed::DEFAULT_C_MIN),
            c_max: cli.c_max,
            c_steps: cli.c_steps.unwrap_or(crate::speed::DEFAULT_STEPS),
        },
        wave_grid: WaveGrid {
            k_max: cli.k_max.unwrap_or(10.0),
            k_steps: cli.k_steps.unwrap_or(401),
        },
        sim: SimSettings {
            half_length: cli.half_length,
            nx: cli.nx.unwrap_or(8192),
            dt: cli.dt,
            t_end: cli.t_end,
            eps: cli.eps.unwrap_or(0.0),
            smooth: cli.smooth,
            snapshots: cli.snapshots.unwrap_or_default(),
        },
        output: cli.out,
        format: cli.format.unwrap_or_default(),
    };
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    /// Check every numeric field, whether or not the command uses it.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.contour.validate()?;
        let g = &self.speed_grid;
        let c_hi = g.c_max.unwrap_or(f64::INFINITY);
        if !(g.c_min > 0.0 && c_hi > g.c_min) || g.c_steps < 2 {
            return Err(Error::InvalidParams(format!(
                "speed grid needs 0 < c-min < c-max and c-steps >= 2 (c-min = {}, c-max = {:?}, c-steps = {})",
                g.c_min, g.c_max, g.c_steps
            )));
        }
        if !(self.wave_grid.k_max > 0.0 && self.wave_grid.k_max.is_finite()) || self.wave_grid.k_steps < 2 {
            return Err(Error::InvalidParams("k grid needs k-max > 0 and k-steps >= 2".into()));
        }
        let s = &self.sim;
        if s.nx < 5 {
            return Err(Error::InvalidParams(format!("nx = {} must be at least 5", s.nx)));
        }
        for (name, v) in [("L", s.half_length), ("dt", s.dt), ("T", s.t_end), ("smooth", s.smooth)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::InvalidParams(format!("{name} = {v} must be positive")));
                }
            }
        }
        if !(s.eps > -1.0 && s.eps.is_finite()) {
            return Err(Error::InvalidParams(format!("eps = {} must exceed -1", s.eps)));
        }
        if s.snapshots.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::InvalidParams("snapshot times must be nonnegative".into()));
        }
        Ok(())
    }
}
