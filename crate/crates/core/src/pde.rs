//! Explicit finite differences for
//!
//! ```text
//! tau u_tt + u_t = u_xx + H(u - a) - u - w,    w_t = b u - d w
//! ```
//!
//! on `[-L, L]` with homogeneous Dirichlet data. For `tau > 0` the `u` update
//! is the centered three-level scheme
//!
//! ```text
//! tau (u+ - 2u + u-) / dt^2 + (u+ - u-) / (2 dt) = D2 u + H(u - a) - u - w
//! ```
//!
//! which is stable for `dt <= dx sqrt(tau)`; for `tau = 0` it is forward Euler
//! (`dt <= dx^2 / 2`). `w` is advanced by the trapezoidal rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::golden_min;
use crate::poly::ModelParams;
use crate::profile::WaveProfile;

/// Fraction of the stability limit used for the time step.
pub const CFL_SAFETY: f64 = 0.9;
/// Largest field magnitude tolerated at the boundary.
pub const BOUNDARY_TOL: f64 = 1e-8;
/// Decay lengths kept between the wave and each boundary.
const MARGIN_DECAYS: f64 = 20.0;

pub const SHAPE_ERR_LIMIT: f64 = 0.25;
pub const AMPLITUDE_RANGE: (f64, f64) = (0.5, 2.0);
pub const BLOW_UP_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum HeavisideMode {
    /// Grid-sampled indicator of `u > a`.
    Sharp,
    /// `(1 + tanh((u - a) / width)) / 2`.
    Smoothed { width: f64 },
}

impl HeavisideMode {
    #[inline]
    pub fn eval(self, u: f64, a: f64) -> f64 {
        match self {
            HeavisideMode::Sharp => {
                if u > a {
                    1.0
                } else {
                    0.0
                }
            }
            HeavisideMode::Smoothed { width } => 0.5 * (1.0 + ((u - a) / width).tanh()),
        }
    }
}

/// Direction the pulse travels in `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `u(t, x) = u_c(x - x0 + c t)`.
    Left,
    /// Mirrored wave `u(t, x) = u_c(-(x - x0) + c t)`.
    Right,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Left => 1.0,
            Direction::Right => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Half-length `L` of the domain `[-L, L]`.
    #[serde(rename = "L")]
    pub half_length: f64,
    /// Grid points, including both boundary nodes.
    pub nx: usize,
    /// Time step; `None` picks the largest stable step.
    pub dt: Option<f64>,
    #[serde(rename = "T")]
    pub t_end: f64,
    /// Relative amplitude perturbation: `u(0) = (1 + eps) u_c`.
    #[serde(rename = "eps")]
    pub perturb_eps: f64,
    pub heaviside: HeavisideMode,
    /// Number of measurements taken over `[0, T]`.
    pub n_measure: usize,
    /// Times at which the fields are stored.
    pub snapshot_times: Vec<f64>,
}

impl SimConfig {
    /// `T = 20 / c` on the smallest domain that keeps the wave clear of both
    /// boundaries, with `nx` points.
    pub fn for_profile(profile: &WaveProfile, nx: usize) -> Self {
        let t_end = 20.0 / profile.speed();
        Self {
            half_length: Self::required_half_length(profile, t_end),
            nx,
            dt: None,
            t_end,
            perturb_eps: 0.0,
            heaviside: HeavisideMode::Sharp,
            n_measure: 50,
            snapshot_times: Vec::new(),
        }
    }

    /// Smallest `L` for which a wave travelling for `t_end` stays localized.
    pub fn required_half_length(profile: &WaveProfile, t_end: f64) -> f64 {
        let width = footprint(profile, t_end);
        (0.5 * width * 1.02).ceil()
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / (self.nx - 1) as f64
    }

    /// Stability limit on `dt` for relaxation time `tau`.
    pub fn dt_limit(&self, tau: f64) -> f64 {
        let dx = self.dx();
        if tau > 0.0 {
            CFL_SAFETY * dx * tau.sqrt()
        } else {
            CFL_SAFETY * dx * dx / 2.0
        }
    }

    /// Time step and step count: `dt` is shrunk so that a whole number of
    /// steps reaches `T`.
    pub fn resolve_dt(&self, tau: f64) -> Result<(f64, usize)> {
        let limit = self.dt_limit(tau);
        let dt = match self.dt {
            Some(dt) if dt > limit => return Err(Error::Cfl { dt, limit }),
            Some(dt) if dt > 0.0 => dt,
            Some(dt) => return Err(Error::Precondition(format!("dt = {dt} must be positive"))),
            None => limit,
        };
        let n = (self.t_end / dt - 1e-9).ceil().max(1.0) as usize;
        Ok((self.t_end / n as f64, n))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_length > 0.0 && self.half_length.is_finite()) {
            return Err(Error::Precondition("L must be positive".into()));
        }
        if self.nx < 5 {
            return Err(Error::Precondition("nx must be at least 5".into()));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Precondition("T must be nonnegative".into()));
        }
        if !(self.perturb_eps.is_finite() && self.perturb_eps > -1.0) {
            return Err(Error::Precondition("eps must exceed -1".into()));
        }
        if let HeavisideMode::Smoothed { width } = self.heaviside {
            if !(width > 0.0) {
                return Err(Error::Precondition("smoothing width must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Extent of `x` swept by the wave over `t_end` plus decay margins.
fn footprint(profile: &WaveProfile, t_end: f64) -> f64 {
    let ahead = MARGIN_DECAYS / profile.alphas.positive_root();
    let behind = profile.z1 + MARGIN_DECAYS / profile.tail_rate();
    ahead + profile.speed() * t_end + behind
}

/// Fields at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub dt: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    /// `u` one step earlier (three-level scheme).
    pub u_prev: Vec<f64>,
    /// Centered estimate of `u_t`; at `t = 0` the seeded value.
    pub ut: Vec<f64>,
    pub w: Vec<f64>,
    pub steps: usize,
    /// Position of the rising threshold crossing at `t = 0`.
    pub x0: f64,
    pub direction: Direction,
    pub initial_max: f64,
}

impl SimState {
    /// Arbitrary initial data; `u_prev` is `u - dt ut`.
    pub fn from_fields(x: Vec<f64>, u: Vec<f64>, ut: Vec<f64>, w: Vec<f64>, dt: f64) -> Result<Self> {
        let n = x.len();
        if u.len() != n || ut.len() != n || w.len() != n || n < 3 {
            return Err(Error::Precondition("field lengths differ from the grid".into()));
        }
        let u_prev = u.iter().zip(&ut).map(|(u, v)| u - dt * v).collect();
        let initial_max = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(Self {
            t: 0.0,
            dt,
            x,
            u,
            u_prev,
            ut,
            w,
            steps: 0,
            x0: 0.0,
            direction: Direction::Left,
            initial_max,
        })
    }

    /// Replace the first-order seed by `u - dt ut + dt^2 u_tt / 2`, with
    /// `u_tt` from the discrete equation (`tau > 0` only).
    pub fn seed_second_order(&mut self, params: &ModelParams, threshold: f64, mode: HeavisideMode) {
        if params.tau <= 0.0 {
            return;
        }
        let n = self.u.len();
        let inv_dx2 = 1.0 / (self.dx() * self.dx());
        for i in 1..n - 1 {
            let u = self.u[i];
            let f = (self.u[i - 1] - 2.0 * u + self.u[i + 1]) * inv_dx2 + mode.eval(u, threshold) - u - self.w[i];
            let utt = (f - self.ut[i]) / params.tau;
            self.u_prev[i] = u - self.dt * self.ut[i] + 0.5 * self.dt * self.dt * utt;
        }
    }

    pub fn dx(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    pub fn max_abs_u(&self) -> f64 {
        self.u.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn boundary_magnitude(&self) -> f64 {
        let n = self.u.len() - 1;
        [self.u[0], self.u[n], self.w[0], self.w[n], self.u[1], self.u[n - 1], self.w[1], self.w[n - 1]]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.w).all(|v| v.is_finite())
    }

    /// Position of the leading threshold crossing, linearly interpolated.
    pub fn front_position(&self, a: f64) -> Option<f64> {
        let n = self.u.len();
        let cross = |i: usize, j: usize| {
            let (ui, uj) = (self.u[i], self.u[j]);
            self.x[i] + (a - ui) / (uj - ui) * (self.x[j] - self.x[i])
        };
        match self.direction {
            Direction::Left => (0..n - 1)
                .find(|&i| self.u[i] <= a && self.u[i + 1] > a)
                .map(|i| cross(i, i + 1)),
            Direction::Right => (1..n)
                .rev()
                .find(|&i| self.u[i] <= a && self.u[i - 1] > a)
                .map(|i| cross(i, i - 1)),
        }
    }
}

fn grid(config: &SimConfig) -> Vec<f64> {
    let l = config.half_length;
    let dx = config.dx();
    (0..config.nx)
        .map(|i| if i + 1 == config.nx { l } else { -l + dx * i as f64 })
        .collect()
}

/// Starting position of the rising crossing so that the wave is centred in
/// the room left after `T`.
fn placement(profile: &WaveProfile, config: &SimConfig, direction: Direction) -> Result<f64> {
    let l = config.half_length;
    let ahead = MARGIN_DECAYS / profile.alphas.positive_root() + profile.speed() * config.t_end;
    let behind = profile.z1 + MARGIN_DECAYS / profile.tail_rate();
    let (lo, hi) = match direction {
        Direction::Left => (-l + ahead, l - behind),
        Direction::Right => (-l + behind, l - ahead),
    };
    if lo > hi {
        return Err(Error::DomainTooSmall(format!(
            "the wave needs L >= {:.3}, got L = {l}",
            SimConfig::required_half_length(profile, config.t_end)
        )));
    }
    Ok(0.5 * (lo + hi))
}

/// Sample the traveling wave (times `1 + eps`) on the grid, with `u_t = c u_c'`.
pub fn init_from_profile(profile: &WaveProfile, config: &SimConfig) -> Result<SimState> {
    init_directed(profile, config, Direction::Left)
}

/// Mirror image `x -> -x` of [`init_from_profile`]: the pulse travels right.
pub fn init_mirrored(profile: &WaveProfile, config: &SimConfig) -> Result<SimState> {
    init_directed(profile, config, Direction::Right)
}

fn init_directed(profile: &WaveProfile, config: &SimConfig, direction: Direction) -> Result<SimState> {
    config.validate()?;
    let (dt, _) = config.resolve_dt(profile.params.tau)?;
    let x0 = placement(profile, config, direction)?;
    let x = grid(config);
    let sigma = direction.sign();
    let scale = 1.0 + config.perturb_eps;
    let c = profile.speed();
    let n = x.len();
    let (mut u, mut ut, mut w, mut u_prev) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 1..n - 1 {
        let z = sigma * (x[i] - x0);
        let s = profile.eval(z);
        u[i] = scale * s.u;
        w[i] = scale * s.w;
        ut[i] = scale * c * s.du;
        // exact traveling-wave value one step back
        u_prev[i] = scale * profile.u(z - c * dt);
    }
    let initial_max = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let state = SimState {
        t: 0.0,
        dt,
        x,
        u,
        u_prev,
        ut,
        w,
        steps: 0,
        x0,
        direction,
        initial_max,
    };
    let edge = [profile.u(sigma * (-config.half_length - x0)), profile.u(sigma * (config.half_length - x0))]
        .into_iter()
        .chain([
            profile.eval(sigma * (-config.half_length - x0)).w,
            profile.eval(sigma * (config.half_length - x0)).w,
        ])
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if edge > BOUNDARY_TOL {
        return Err(Error::DomainTooSmall(format!("field magnitude {edge:e} at the boundary")));
    }
    Ok(state)
}

/// Advance one time step in place.
pub fn step(state: &mut SimState, params: &ModelParams, threshold: f64, mode: HeavisideMode) {
    let n = state.u.len();
    let dt = state.dt;
    let inv_dx2 = 1.0 / (state.dx() * state.dx());
    let (b, d, tau) = (params.b, params.d, params.tau);
    let mut next = vec![0.0; n];
    if tau > 0.0 {
        let lead = tau / (dt * dt) + 0.5 / dt;
        for i in 1..n - 1 {
            let u = state.u[i];
            let f = (state.u[i - 1] - 2.0 * u + state.u[i + 1]) * inv_dx2 + mode.eval(u, threshold) - u - state.w[i];
            let um = state.u_prev[i];
            next[i] = (f + tau * (2.0 * u - um) / (dt * dt) + um * 0.5 / dt) / lead;
        }
    } else {
        for i in 1..n - 1 {
            let u = state.u[i];
            let f = (state.u[i - 1] - 2.0 * u + state.u[i + 1]) * inv_dx2 + mode.eval(u, threshold) - u - state.w[i];
            next[i] = u + dt * f;
        }
    }
    let damp = 0.5 * d * dt;
    for i in 1..n - 1 {
        state.w[i] = (state.w[i] * (1.0 - damp) + 0.5 * dt * b * (state.u[i] + next[i])) / (1.0 + damp);
        state.ut[i] = if tau > 0.0 {
            (next[i] - state.u_prev[i]) / (2.0 * dt)
        } else {
            (next[i] - state.u[i]) / dt
        };
    }
    state.u_prev = std::mem::replace(&mut state.u, next);
    state.t += dt;
    state.steps += 1;
}

/// Comparison of the current fields with the translated traveling wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub t: f64,
    /// Leading threshold crossing.
    pub front: f64,
    /// Best-fit position of the profile's rising crossing.
    pub shift: f64,
    /// `min_s ||u - u_c(. - s)|| / ||u_c||`.
    pub shape_err: f64,
    /// `max u / max u_c`.
    pub amplitude_ratio: f64,
}

/// Fit the profile to the current `u`.
pub fn measure(state: &SimState, profile: &WaveProfile) -> Result<Measurement> {
    let a = profile.threshold();
    let front = state.front_position(a).ok_or(Error::WaveLost)?;
    let sigma = state.direction.sign();
    let dx = state.dx();
    // restrict the fit to where either field can be non-negligible
    let (z_lo, z_hi) = profile.support(40.0);
    let window = |s: f64| -> (usize, usize) {
        let (x_a, x_b) = if sigma > 0.0 { (s + z_lo, s + z_hi) } else { (s - z_hi, s - z_lo) };
        let lo = ((x_a - 2.0 - state.x[0]) / dx).floor().max(0.0) as usize;
        let hi = (((x_b + 2.0 - state.x[0]) / dx).ceil() as usize).min(state.x.len() - 1);
        (lo, hi)
    };
    let norm_ref: f64 = {
        let (lo, hi) = window(front);
        (lo..=hi)
            .map(|i| profile.u(sigma * (state.x[i] - front)).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let total_u2: f64 = state.u.iter().map(|v| v * v).sum();
    let misfit = |s: f64| -> f64 {
        let (lo, hi) = window(s);
        let mut inside_u2 = 0.0;
        let mut acc = 0.0;
        for i in lo..=hi {
            let r = state.u[i] - profile.u(sigma * (state.x[i] - s));
            acc += r * r;
            inside_u2 += state.u[i] * state.u[i];
        }
        // mass of u outside the window counts fully
        (acc + (total_u2 - inside_u2).max(0.0)).sqrt() / norm_ref
    };
    let (shift, shape_err) = golden_min(misfit, front - 1.0, front + 1.0, 1e-7);
    let peak = state.u.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    Ok(Measurement {
        t: state.t,
        front,
        shift,
        shape_err,
        amplitude_ratio: peak / profile.peak().1,
    })
}

/// Outcome of a full run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub dt: f64,
    pub dx: f64,
    pub steps: usize,
    /// Speed from a linear fit of the front position, positive along the
    /// direction of travel.
    pub speed_est: Option<f64>,
    pub series: Vec<Measurement>,
    pub final_shape_err: Option<f64>,
    pub max_shape_err: Option<f64>,
    pub unstable: bool,
    pub reason: Option<String>,
    #[serde(skip)]
    pub snapshots: Vec<Snapshot>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
}

impl Snapshot {
    fn of(state: &SimState) -> Self {
        Self {
            t: state.t,
            x: state.x.clone(),
            u: state.u.clone(),
            w: state.w.clone(),
        }
    }
}

/// Launch the (perturbed) traveling wave and track it up to `T`.
pub struct Simulation<'a> {
    pub profile: &'a WaveProfile,
    pub config: SimConfig,
    pub direction: Direction,
}

impl<'a> Simulation<'a> {
    pub fn new(profile: &'a WaveProfile, config: SimConfig) -> Self {
        Self {
            profile,
            config,
            direction: Direction::Left,
        }
    }

    pub fn mirrored(mut self) -> Self {
        self.direction = Direction::Right;
        self
    }

    pub fn run(&self) -> Result<SimReport> {
        let p = &self.profile.params;
        let a = self.profile.threshold();
        let mut state = init_directed(self.profile, &self.config, self.direction)?;
        let (_, n_steps) = self.config.resolve_dt(p.tau)?;
        let every = (n_steps / self.config.n_measure.max(1)).max(1);
        let mut snap_times: Vec<f64> = self.config.snapshot_times.clone();
        snap_times.sort_by(f64::total_cmp);
        let mut snap_idx = 0;
        let mut snapshots = Vec::new();
        let mut series = Vec::new();
        let mut reason = None;

        let take_snaps = |state: &SimState, idx: &mut usize, out: &mut Vec<Snapshot>| {
            while *idx < snap_times.len() && snap_times[*idx] <= state.t + 0.5 * state.dt {
                out.push(Snapshot::of(state));
                *idx += 1;
            }
        };
        take_snaps(&state, &mut snap_idx, &mut snapshots);
        series.push(measure(&state, self.profile)?);

        for k in 1..=n_steps {
            step(&mut state, p, a, self.config.heaviside);
            take_snaps(&state, &mut snap_idx, &mut snapshots);
            if !state.is_finite() || state.max_abs_u() > BLOW_UP_FACTOR * state.initial_max {
                reason = Some(format!("blow-up at t = {:.4}", state.t));
                break;
            }
            if k % every == 0 || k == n_steps {
                match measure(&state, self.profile) {
                    Ok(m) => {
                        let (lo, hi) = AMPLITUDE_RANGE;
                        if reason.is_none() {
                            if m.shape_err > SHAPE_ERR_LIMIT {
                                reason = Some(format!("shape error {:.3} at t = {:.4}", m.shape_err, m.t));
                            } else if m.amplitude_ratio < lo || m.amplitude_ratio > hi {
                                reason =
                                    Some(format!("amplitude ratio {:.3} at t = {:.4}", m.amplitude_ratio, m.t));
                            }
                        }
                        series.push(m);
                    }
                    Err(Error::WaveLost) => {
                        reason = Some(format!("wave lost at t = {:.4}", state.t));
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        if state.boundary_magnitude() > BOUNDARY_TOL && reason.is_none() {
            log::warn!("fields reached the boundary: {:e}", state.boundary_magnitude());
        }
        let speed_est = fit_speed(&series).map(|v| -v * self.direction.sign());
        Ok(SimReport {
            config: self.config.clone(),
            dt: state.dt,
            dx: state.dx(),
            steps: state.steps,
            speed_est,
            final_shape_err: series.last().map(|m| m.shape_err),
            max_shape_err: series.iter().map(|m| m.shape_err).reduce(f64::max),
            unstable: reason.is_some(),
            reason,
            series,
            snapshots,
        })
    }
}

/// Least-squares slope of front position against time.
fn fit_speed(series: &[Measurement]) -> Option<f64> {
    if series.len() < 2 {
        return None;
    }
    let n = series.len() as f64;
    let mt = series.iter().map(|m| m.t).sum::<f64>() / n;
    let mx = series.iter().map(|m| m.front).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for m in series {
        sxy += (m.t - mt) * (m.front - mx);
        sxx += (m.t - mt) * (m.t - mt);
    }
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fast() -> WaveProfile {
        WaveProfile::for_speed(0.5, 1.5, 0.1, 0.1).unwrap()
    }

    #[test]
    fn initial_fields_match_profile() {
        let w = fast();
        let cfg = SimConfig::for_profile(&w, 4097);
        let st = init_from_profile(&w, &cfg).unwrap();
        let m = measure(&st, &w).unwrap();
        assert!(m.shape_err < 1e-6, "{}", m.shape_err);
        assert!((m.amplitude_ratio - 1.0).abs() < 1e-4);
        let i = st.x.iter().position(|&x| x >= st.x0).unwrap();
        let expected = w.speed() * w.slope_at_rise();
        if (st.x[i] - st.x0).abs() < 1e-12 {
            assert!((st.ut[i] - expected).abs() < 1e-12);
        }
        assert!(st.boundary_magnitude() < BOUNDARY_TOL);
    }

    #[test]
    fn small_domain_rejected() {
        let w = fast();
        let mut cfg = SimConfig::for_profile(&w, 1025);
        cfg.half_length = 20.0;
        assert!(matches!(init_from_profile(&w, &cfg), Err(Error::DomainTooSmall(_))));
    }

    #[test]
    fn explicit_dt_checked() {
        let w = fast();
        let mut cfg = SimConfig::for_profile(&w, 1025);
        cfg.dt = Some(1.0);
        assert!(matches!(init_from_profile(&w, &cfg), Err(Error::Cfl { .. })));
    }

    #[test]
    fn rest_state_is_preserved() {
        let x: Vec<f64> = (0..101).map(|i| -5.0 + 0.1 * i as f64).collect();
        let zero = vec![0.0; 101];
        let mut st = SimState::from_fields(x, zero.clone(), zero.clone(), zero.clone(), 0.02).unwrap();
        let p = ModelParams::new(0.5, 1.0, 0.1, 0.1).unwrap();
        for _ in 0..100 {
            step(&mut st, &p, 0.2, HeavisideMode::Sharp);
        }
        assert!(st.u.iter().chain(&st.w).all(|&v| v == 0.0));
    }
}
