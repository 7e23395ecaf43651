//! The exact solitary traveling wave of the relaxing McKean system.
//!
//! In the moving frame `z = x + c t` the wave solves the piecewise linear
//! system `V' = A V - g H(u - a) e_1` with `V = (u', u, w)`. It crosses the
//! threshold `a` at `z = 0` (rising) and `z = z1 > 0` (falling), so
//!
//! * `z < 0`: `V = a e^{alpha3 z} X3`,
//! * `0 < z < z1`: three exponential modes plus the constant `A^{-1} (g, 0, 0)`,
//! * `z > z1`: the two decaying modes only.
//!
//! Decay for `z -> +inf` fixes `s = e^{-alpha3 z1}` through the threshold,
//! and `u(z1) = a` becomes the transcendental equation `h(s) = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{cexpm1, logspace, refine_root};
use crate::poly::{alpha_roots, char_poly_alpha, CharRoots, ModalBasis, ModelParams, C64};

/// Imaginary parts larger than this (relative to the term scale) mean the
/// roots were mis-classified.
const IMAG_TOL: f64 = 1e-9;

/// Relative tolerance between a prescribed threshold and the one implied by `c`.
pub const THRESHOLD_MATCH_TOL: f64 = 1e-6;

/// Number of samples in the sign-change scan of `h`.
pub const SCAN_SAMPLES: usize = 512;

/// `h(s) = A1 (1 - s^{p1}) + A2 (1 - s^{p2}) + s - 1`, `p_j = -alpha_j / alpha3`.
#[derive(Debug, Clone, Copy)]
pub struct HFunction {
    pub coef: [C64; 2],
    pub powers: [C64; 2],
}

impl HFunction {
    pub fn new(alphas: &CharRoots, params: &ModelParams) -> Result<Self> {
        let (c, d) = (params.c, params.d);
        let [a1, a2, a3] = alphas.as_array();
        let gap = (a1 - a2).norm();
        if gap <= 1e-12 * a1.norm().max(a2.norm()) {
            return Err(Error::SingularFundamentalMatrix);
        }
        let den3 = d + c * a3;
        let k1 = a3 * (a2 - a3) * (d + c * a1) / (a1 * (a1 - a2) * den3);
        let k2 = a3 * (a3 - a1) * (d + c * a2) / (a2 * (a1 - a2) * den3);
        Ok(Self {
            coef: [k1, k2],
            powers: [-a1 / a3, -a2 / a3],
        })
    }

    /// Complex value of `h` at `s = exp(ln_s)`; the imaginary part is roundoff.
    pub fn eval_log(&self, ln_s: f64) -> C64 {
        let mut h = C64::new(ln_s.exp_m1(), 0.0);
        for j in 0..2 {
            h -= self.coef[j] * cexpm1(self.powers[j] * ln_s);
        }
        h
    }

    /// Scale of the individual terms, used for noise floors.
    pub fn scale(&self) -> f64 {
        1.0 + self.coef[0].norm() + self.coef[1].norm()
    }

    pub fn eval_log_real(&self, ln_s: f64) -> Result<f64> {
        let h = self.eval_log(ln_s);
        if h.im.abs() > IMAG_TOL * self.scale() {
            return Err(Error::NonRealResult { s: ln_s.exp(), im: h.im });
        }
        Ok(h.re)
    }

    /// `lim_{s -> 0+} h(s) = A1 + A2 - 1` (both powers have positive real part).
    pub fn limit_at_zero(&self) -> f64 {
        (self.coef[0] + self.coef[1]).re - 1.0
    }

    /// `h''(1) = -sum_j A_j p_j (p_j - 1)`.
    pub fn second_derivative_at_one(&self) -> f64 {
        let mut v = C64::new(0.0, 0.0);
        for j in 0..2 {
            v -= self.coef[j] * self.powers[j] * (self.powers[j] - 1.0);
        }
        v.re
    }
}

/// `h(s)` for `s` in `(0, 1]`.
pub fn h_function(s: f64, alphas: &CharRoots, params: &ModelParams) -> Result<f64> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Precondition(format!("s = {s} outside (0, 1]")));
    }
    HFunction::new(alphas, params)?.eval_log_real(s.ln())
}

/// Root `s*` of `h` in `(0, 1)`, kept together with `ln s*` so that
/// `z1 = -ln(s*) / alpha3` is exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SRoot {
    pub s: f64,
    pub ln_s: f64,
    pub alphas: CharRoots,
}

impl SRoot {
    pub fn z1(&self) -> f64 {
        -self.ln_s / self.alphas.positive_root()
    }
}

/// Locate the unique root of `h` in `(0, 1)`.
///
/// The scan runs over `q = -ln s`, log-spaced from `1e-8` up to the point
/// where both power terms are below `e^{-42}`, so that roots at very small
/// `s` (fast waves with long excited intervals) are not missed. Samples whose
/// magnitude is at the roundoff floor (near the double root at `s = 1`) do not
/// count as sign changes.
pub fn solve_s(params: &ModelParams) -> Result<SRoot> {
    let alphas = alpha_roots(params)?;
    let h = HFunction::new(&alphas, params)?;
    let slowest = h.powers.iter().map(|p| p.re).fold(f64::INFINITY, f64::min);
    let q_max = (42.0 / slowest).max(-(1e-8f64).ln());
    let grid = logspace(1e-8, q_max, SCAN_SAMPLES);
    let floor = 64.0 * f64::EPSILON * h.scale();

    let mut kept: Vec<(f64, f64)> = Vec::with_capacity(grid.len());
    for &q in &grid {
        let v = h.eval_log_real(-q)?;
        if v.abs() > floor {
            kept.push((q, v));
        }
    }
    let changes: Vec<usize> = (1..kept.len())
        .filter(|&i| kept[i - 1].1.signum() != kept[i].1.signum())
        .collect();
    match changes.len() {
        0 => Err(Error::NoRoot { c: params.c }),
        1 => {
            let i = changes[0];
            let (lo, hi) = (kept[i - 1].0, kept[i].0);
            let q = refine_root(
                |q| h.eval_log(-q).re,
                lo,
                hi,
                4.0 * f64::EPSILON * hi,
                0.0,
            );
            Ok(SRoot {
                s: (-q).exp(),
                ln_s: -q,
                alphas,
            })
        }
        n => {
            log::warn!("h(s) changes sign {n} times at c = {}", params.c);
            Err(Error::MultipleRoots { c: params.c, count: n })
        }
    }
}

/// `a = (1 - s) alpha1 alpha2 (d + alpha3 c) / ((alpha3 - alpha1)(alpha3 - alpha2)(b + d))`.
pub fn threshold_from_s(s: f64, alphas: &CharRoots, params: &ModelParams) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Precondition(format!("s = {s} outside (0, 1)")));
    }
    threshold_from_log_s(s.ln(), alphas, params)
}

pub(crate) fn threshold_from_log_s(ln_s: f64, alphas: &CharRoots, params: &ModelParams) -> Result<f64> {
    let a = (-ln_s.exp_m1()) * threshold_scale(alphas, params);
    if a.im.abs() > IMAG_TOL * a.norm().max(1e-300) {
        return Err(Error::NonRealResult { s: ln_s.exp(), im: a.im });
    }
    if !(a.re > 0.0) {
        return Err(Error::NonPositiveThreshold(a.re));
    }
    Ok(a.re)
}

fn threshold_scale(alphas: &CharRoots, params: &ModelParams) -> C64 {
    let [a1, a2, a3] = alphas.as_array();
    a1 * a2 * (params.d + a3 * params.c) / ((a3 - a1) * (a3 - a2) * (params.b + params.d))
}

/// Which inequality chain of the existence criterion holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Existence {
    /// `h` has a local minimum at `s = 1` and `h(0+) < 0`.
    MinBranch,
    /// `h` has a local maximum at `s = 1` and `h(0+) > 0`.
    MaxBranch,
    None,
}

/// Existence test from the sign of `W` at
/// `y_lo = sqrt(g (d + b) / (c^2 g + d))` and `y_hi = sqrt(g (d - d^2 + 2b) / d)`.
pub fn existence_check(params: &ModelParams) -> Result<Existence> {
    params.validate()?;
    let (b, d) = (params.b, params.d);
    if d <= 0.0 {
        return Err(Error::Precondition("existence check requires d > 0".into()));
    }
    if d - d * d + 2.0 * b <= 0.0 {
        return Err(Error::Precondition(format!(
            "d - d² + 2b = {} must be positive",
            d - d * d + 2.0 * b
        )));
    }
    let g = params.gamma();
    let c = params.c;
    let w = char_poly_alpha(params)?;
    let y_lo = (g * (d + b) / (c * c * g + d)).sqrt();
    let y_hi = (g * (d - d * d + 2.0 * b) / d).sqrt();
    let (w_lo, w_hi) = (w.eval(y_lo), w.eval(y_hi));
    Ok(if w_lo < 0.0 && 0.0 < w_hi {
        Existence::MinBranch
    } else if w_hi < 0.0 && 0.0 < w_lo {
        Existence::MaxBranch
    } else {
        Existence::None
    })
}

/// Interval of the piecewise solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    /// `z < 0`, ahead of the wave.
    Front,
    /// `0 < z < z1`, where `u > a`.
    Excited,
    /// `z > z1`, the recovery tail.
    Tail,
}

/// One sample of the wave: `u_c`, `u_c'` and `w_c` at `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub z: f64,
    pub u: f64,
    pub du: f64,
    pub w: f64,
}

/// Piecewise exponential solitary wave.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveProfile {
    /// Parameters with the threshold `a` resolved.
    pub params: ModelParams,
    pub alphas: CharRoots,
    pub s: f64,
    pub z1: f64,
    basis: ModalBasis,
    particular: [f64; 3],
    /// Excited-interval coefficients: modes 1, 2 about `z = 0`, mode 3 about `z = z1`.
    excited: [C64; 3],
    /// Tail coefficients about `z = z1` (mode 3 vanishes).
    tail: [C64; 3],
}

impl WaveProfile {
    /// Wave at speed `params.c`. A prescribed `params.a` must match the
    /// threshold implied by `c` to within [`THRESHOLD_MATCH_TOL`].
    pub fn build(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let root = solve_s(params)?;
        let a = threshold_from_log_s(root.ln_s, &root.alphas, params)?;
        if let Some(given) = params.a {
            if (given - a).abs() > THRESHOLD_MATCH_TOL * a {
                return Err(Error::ThresholdMismatch { given, derived: a });
            }
        }
        let mut resolved = *params;
        resolved.a = Some(a);
        Self::from_root(resolved, a, &root)
    }

    /// Wave at speed `c` with the threshold it implies.
    pub fn for_speed(b: f64, c: f64, d: f64, tau: f64) -> Result<Self> {
        Self::build(&ModelParams::new(b, c, d, tau)?)
    }

    fn from_root(params: ModelParams, a: f64, root: &SRoot) -> Result<Self> {
        let alphas = root.alphas;
        let zero = C64::new(0.0, 0.0);
        let basis = ModalBasis::new(&params, zero, alphas.as_array())?;
        let (b, d) = (params.b, params.d);
        let particular = [0.0, d / (b + d), b / (b + d)];
        let p = basis.coords(particular.map(|v| C64::new(v, 0.0)));
        let z1 = root.z1();
        // left boundary value a X3 minus the particular solution; the
        // alpha3 coefficient a - p3 = -s p3 is re-referenced to z1 as -p3
        let excited = [-p[0], -p[1], -p[2]];
        let tail = [
            excited[0] * (alphas.r1 * z1).exp() + p[0],
            excited[1] * (alphas.r2 * z1).exp() + p[1],
            zero,
        ];
        let profile = Self {
            params,
            alphas,
            s: root.s,
            z1,
            basis,
            particular,
            excited,
            tail,
        };
        let jump = (p[2] * (1.0 - root.s) - a).norm();
        if jump > 1e-9 * a.max(1e-300) {
            return Err(Error::Classification(format!(
                "threshold inconsistent with the modal decomposition ({jump:e})"
            )));
        }
        profile.check_heaviside()?;
        Ok(profile)
    }

    pub fn threshold(&self) -> f64 {
        self.params.a.expect("profile threshold is always resolved")
    }

    pub fn speed(&self) -> f64 {
        self.params.c
    }

    pub fn piece(&self, z: f64) -> Piece {
        if z < 0.0 {
            Piece::Front
        } else if z < self.z1 {
            Piece::Excited
        } else {
            Piece::Tail
        }
    }

    /// Modal coefficients of `piece` and the reference points they are expanded about.
    fn modes(&self, piece: Piece) -> ([C64; 3], [f64; 3]) {
        let a = C64::new(self.threshold(), 0.0);
        let zero = C64::new(0.0, 0.0);
        match piece {
            Piece::Front => ([zero, zero, a], [0.0; 3]),
            Piece::Excited => (self.excited, [0.0, 0.0, self.z1]),
            Piece::Tail => (self.tail, [self.z1; 3]),
        }
    }

    /// `(V, V')` on a given piece (extended analytically past its ends).
    fn eval_on(&self, piece: Piece, z: f64) -> ([f64; 3], [f64; 3]) {
        let (coef, refs) = self.modes(piece);
        let mut v = [C64::new(0.0, 0.0); 3];
        let mut dv = v;
        for j in 0..3 {
            if coef[j] == C64::new(0.0, 0.0) {
                continue;
            }
            let r = self.basis.roots[j];
            let k = coef[j] * (r * (z - refs[j])).exp();
            for i in 0..3 {
                v[i] += k * self.basis.right[j][i];
                dv[i] += k * r * self.basis.right[j][i];
            }
        }
        let mut out = [v[0].re, v[1].re, v[2].re];
        if piece == Piece::Excited {
            for i in 0..3 {
                out[i] += self.particular[i];
            }
        }
        (out, [dv[0].re, dv[1].re, dv[2].re])
    }

    /// `(u', u, w)` evaluated with the formula of `piece`.
    pub fn state_on(&self, piece: Piece, z: f64) -> [f64; 3] {
        self.eval_on(piece, z).0
    }

    /// `(u'', u', w')` evaluated with the formula of `piece`.
    pub fn derivative_on(&self, piece: Piece, z: f64) -> [f64; 3] {
        self.eval_on(piece, z).1
    }

    pub fn eval(&self, z: f64) -> ProfileSample {
        let v = self.state_on(self.piece(z), z);
        ProfileSample {
            z,
            u: v[1],
            du: v[0],
            w: v[2],
        }
    }

    pub fn u(&self, z: f64) -> f64 {
        self.state_on(self.piece(z), z)[1]
    }

    /// `u_c''` (one-sided at the switch points, taken from the right).
    pub fn second_derivative(&self, z: f64) -> f64 {
        self.derivative_on(self.piece(z), z)[0]
    }

    /// `u_c'(0) = a alpha3`.
    pub fn slope_at_rise(&self) -> f64 {
        self.state_on(Piece::Front, 0.0)[0]
    }

    /// `u_c'(z1)`, negative for a single-hump wave.
    pub fn slope_at_fall(&self) -> f64 {
        self.state_on(Piece::Tail, self.z1)[0]
    }

    /// Slowest decay rate behind the wave, `min(-Re alpha1, -Re alpha2)`.
    pub fn tail_rate(&self) -> f64 {
        (-self.alphas.r1.re).min(-self.alphas.r2.re)
    }

    /// Residuals of the traveling-wave ODE system at `z`:
    /// `(tau c^2 - 1) u'' + c u' + u - H(u - a) + w` and `c w' - b u + d w`.
    pub fn ode_residual(&self, z: f64) -> [f64; 2] {
        let p = &self.params;
        let piece = self.piece(z);
        let (v, dv) = self.eval_on(piece, z);
        let (du, u, w) = (v[0], v[1], v[2]);
        let (ddu, dw) = (dv[0], dv[2]);
        let heaviside = if u > self.threshold() { 1.0 } else { 0.0 };
        [
            (p.tau * p.c * p.c - 1.0) * ddu + p.c * du + u - heaviside + w,
            p.c * dw - p.b * u + p.d * w,
        ]
    }

    /// Peak of `u_c` and its location.
    pub fn peak(&self) -> (f64, f64) {
        let n = 400;
        let (mut zbest, mut ubest) = (0.0, self.threshold());
        for i in 0..=n {
            let z = self.z1 * i as f64 / n as f64;
            let u = self.u(z);
            if u > ubest {
                zbest = z;
                ubest = u;
            }
        }
        let h = self.z1 / n as f64;
        let (lo, hi) = ((zbest - h).max(0.0), (zbest + h).min(self.z1));
        crate::numeric::golden_max(|z| self.u(z), lo, hi, 1e-12 * self.z1.max(1.0))
    }

    /// `z` range outside which `|u|`, `|w|` are below `e^{-decades}` times their
    /// threshold-crossing values.
    pub fn support(&self, decay: f64) -> (f64, f64) {
        let front = -decay / self.alphas.positive_root();
        let tail = self.z1 + decay / self.tail_rate();
        (front, tail)
    }

    /// Sample the profile on `grid`.
    pub fn sample(&self, grid: &[f64]) -> Vec<ProfileSample> {
        grid.iter().map(|&z| self.eval(z)).collect()
    }

    fn check_heaviside(&self) -> Result<()> {
        let a = self.threshold();
        if !(self.slope_at_rise() > 0.0) {
            return Err(Error::HeavisideViolation("u_c'(0) is not positive".into()));
        }
        if !(self.slope_at_fall() < 0.0) {
            return Err(Error::HeavisideViolation(format!(
                "u_c'(z1) = {} is not negative",
                self.slope_at_fall()
            )));
        }
        let n = 2000;
        for i in 1..n {
            let z = self.z1 * i as f64 / n as f64;
            if !(self.state_on(Piece::Excited, z)[1] > a) {
                return Err(Error::HeavisideViolation(format!("u_c <= a at z = {z} inside (0, z1)")));
            }
        }
        let span = 40.0 / self.tail_rate();
        for i in 1..=n {
            let z = self.z1 + span * i as f64 / n as f64;
            if !(self.state_on(Piece::Tail, z)[1] < a) {
                return Err(Error::HeavisideViolation(format!("u_c >= a at z = {z} behind the wave")));
            }
        }
        Ok(())
    }

    /// Summary used in export headers.
    pub fn summary(&self) -> ProfileSummary {
        ProfileSummary {
            params: self.params,
            a: self.threshold(),
            s: self.s,
            z1: self.z1,
            alphas: self.alphas.as_array().map(|z| [z.re, z.im]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub params: ModelParams,
    pub a: f64,
    pub s: f64,
    pub z1: f64,
    pub alphas: [[f64; 2]; 3],
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slow() -> WaveProfile {
        WaveProfile::for_speed(0.5, 0.65, 0.1, 0.1).unwrap()
    }

    #[test]
    fn h_vanishes_at_one() {
        let p = ModelParams::new(0.5, 0.65, 0.1, 0.1).unwrap();
        let alphas = alpha_roots(&p).unwrap();
        assert_eq!(h_function(1.0, &alphas, &p).unwrap(), 0.0);
        assert!(h_function(0.0, &alphas, &p).is_err());
    }

    #[test]
    fn left_limits_at_the_rise() {
        let w = slow();
        let a = w.threshold();
        let a3 = w.alphas.positive_root();
        let v = w.state_on(Piece::Front, 0.0);
        let p = &w.params;
        assert!((v[0] - a * a3).abs() < 1e-14);
        assert!((v[1] - a).abs() < 1e-15);
        assert!((v[2] - a * p.b / (p.c * a3 + p.d)).abs() < 1e-15);
    }

    #[test]
    fn threshold_crossings() {
        let w = slow();
        let a = w.threshold();
        assert!((w.u(0.0) - a).abs() < 1e-12);
        assert!((w.u(w.z1) - a).abs() < 1e-10);
        assert!((w.s - (-w.alphas.positive_root() * w.z1).exp()).abs() < 1e-15);
    }

    #[test]
    fn decays_at_both_ends() {
        let w = slow();
        let a3 = w.alphas.positive_root();
        assert!(w.u(-50.0 / a3).abs() < 1e-15);
        let far = w.z1 + 50.0 / w.tail_rate();
        assert!(w.u(far).abs() < 1e-15);
    }

    #[test]
    fn single_hump_above_threshold() {
        let w = slow();
        let (zp, up) = w.peak();
        assert!(zp > 0.0 && zp < w.z1);
        assert!(up > w.threshold());
    }

    #[test]
    fn residual_uses_the_right_heaviside_branch() {
        let w = slow();
        let r_mid = w.ode_residual(0.5 * w.z1);
        let r_left = w.ode_residual(-1.0);
        let r_right = w.ode_residual(w.z1 + 2.0);
        for r in [r_mid, r_left, r_right] {
            assert!(r[0].abs() < 1e-12 && r[1].abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn mismatched_threshold_is_rejected() {
        let p = ModelParams::new(0.5, 0.65, 0.1, 0.1).unwrap().with_threshold(0.25).unwrap();
        assert!(matches!(WaveProfile::build(&p), Err(Error::ThresholdMismatch { .. })));
        let ok = ModelParams::new(0.5, 0.65, 0.1, 0.1)
            .unwrap()
            .with_threshold(slow().threshold())
            .unwrap();
        assert!(WaveProfile::build(&ok).is_ok());
    }

    #[test]
    fn no_wave_below_the_existence_range() {
        let p = ModelParams::new(0.5, 0.2, 0.1, 0.1).unwrap();
        assert_eq!(existence_check(&p).unwrap(), Existence::None);
        assert!(matches!(solve_s(&p), Err(Error::NoRoot { .. })));
    }

    #[test]
    fn existence_preconditions() {
        let p = ModelParams::new(0.5, 1.0, 0.0, 0.1).unwrap();
        assert!(matches!(existence_check(&p), Err(Error::Precondition(_))));
        let q = ModelParams::new(0.01, 1.0, 3.0, 0.1).unwrap();
        assert!(matches!(existence_check(&q), Err(Error::Precondition(_))));
    }

    #[test]
    fn zero_d_profile_is_allowed() {
        let w = WaveProfile::for_speed(0.5, 1.0, 0.0, 0.1);
        if let Ok(w) = w {
            assert!((w.u(0.0) - w.threshold()).abs() < 1e-12);
        }
    }
}
