//! Spectral stability of the solitary wave through a closed-form Evans function.
//!
//! For `lambda` with the root pattern `Re b3 > 0 > Re b1, Re b2` the
//! perturbation decaying at `-inf` is `U(0) e^{b3 z} Y3`. It picks up the jump
//! `S1 = -g U(0) / u_c'(0)` in `U'` at `z = 0`, is transferred across
//! `(0, z1)` in the eigenbasis of `A(lambda)`, and picks up
//! `S2 = g U(z1) / u_c'(z1)` at `z = z1`. The Evans function is the
//! coefficient of the growing mode `e^{b3 (z - z1)}` behind the wave:
//!
//! ```text
//! E(l) = U(0) + (S1 + S2 e^{-b3 z1}) (d + c b3 + l) / (c (b1 - b3)(b2 - b3))
//! ```
//!
//! Zeros of `E` in the right half-plane are unstable eigenvalues; they are
//! counted by the winding number of `E` along a half-ring contour.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{char_poly_beta_unchecked, solve_cubic, CharRoots, CubicCoeffs, ModelParams, RootPattern, C64};
use crate::profile::WaveProfile;

/// Roots closer than this make the Evans formula's denominators degenerate.
pub const COALESCENCE_TOL: f64 = 1e-9;
/// Smallest admissible `|E|` on a contour.
pub const ZERO_TOL: f64 = 1e-10;
/// Imaginary residue tolerated for `E` at real `lambda`.
pub const REAL_AXIS_TOL: f64 = 1e-9;

/// Roots of `W_lambda(beta)` ordered so that `b3` has the largest real part.
///
/// Where the sign pattern `Re b3 > 0 > Re b1, Re b2` holds this matches the
/// continuation of the `lambda = 0` classification, since the real parts can
/// only change sign across the curves `W_lambda(ik) = 0`.
pub fn beta_roots(lambda: C64, params: &ModelParams) -> Result<CharRoots> {
    params.validate()?;
    let roots = ordered_betas(lambda, params)?;
    if !pattern_holds(&roots) {
        return Err(Error::PatternBreakdown(lambda));
    }
    Ok(roots)
}

fn ordered_betas(lambda: C64, params: &ModelParams) -> Result<CharRoots> {
    let coeffs = char_poly_beta_unchecked(params, lambda);
    let mut r = solve_cubic(&coeffs)?;
    r.sort_by(|a, b| a.re.total_cmp(&b.re));
    let (mut r1, mut r2, mut r3) = (r[0], r[1], r[2]);
    let pattern = if lambda.im == 0.0 {
        // real coefficients: make the roots exactly real or conjugate
        let is_real = |z: C64| z.im.abs() <= 1e-9 * z.norm().max(1e-300);
        if is_real(r3) {
            r3.im = 0.0;
        }
        if is_real(r1) && is_real(r2) {
            r1.im = 0.0;
            r2.im = 0.0;
            RootPattern::RealPair
        } else if !is_real(r1) && !is_real(r2) {
            let re = 0.5 * (r1.re + r2.re);
            let im = 0.5 * (r1.im.abs() + r2.im.abs());
            r1 = C64::new(re, -im);
            r2 = C64::new(re, im);
            RootPattern::ConjugatePair
        } else {
            RootPattern::Complex
        }
    } else {
        if (r1.re - r2.re).abs() <= 1e-12 * r1.norm().max(r2.norm()) && r1.im > r2.im {
            std::mem::swap(&mut r1, &mut r2);
        }
        RootPattern::Complex
    };
    Ok(CharRoots { r1, r2, r3, pattern })
}

fn pattern_holds(r: &CharRoots) -> bool {
    r.r3.re > 0.0 && r.r1.re < 0.0 && r.r2.re < 0.0
}

/// Everything the Evans function needs from the wave.
#[derive(Debug, Clone)]
pub struct EvansContext {
    pub params: ModelParams,
    pub profile: WaveProfile,
    /// Normalization `U(0)` of the perturbation.
    pub u0: f64,
    /// `u_c'(0) > 0`.
    pub du0: f64,
    /// `u_c'(z1) < 0`.
    pub du1: f64,
    pub z1: f64,
}

/// Pieces of one Evans evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvansParts {
    pub lambda: C64,
    pub betas: CharRoots,
    pub s1: C64,
    /// `S2 e^{-b3 z1}`, finite for large `|lambda|`.
    pub s2_scaled: C64,
    /// `U(z1) e^{-b3 z1}`.
    pub u_z1_scaled: C64,
    pub value: C64,
    /// Whether the root sign pattern held at `lambda`.
    pub pattern_ok: bool,
}

impl EvansParts {
    /// `U(z1)` itself (overflows for large `Re b3 z1`).
    pub fn u_z1(&self, z1: f64) -> C64 {
        self.u_z1_scaled * (self.betas.r3 * z1).exp()
    }

    pub fn s2(&self, z1: f64) -> C64 {
        self.s2_scaled * (self.betas.r3 * z1).exp()
    }
}

impl EvansContext {
    pub fn new(profile: WaveProfile) -> Result<Self> {
        Self::with_normalization(profile, 1.0)
    }

    pub fn with_normalization(profile: WaveProfile, u0: f64) -> Result<Self> {
        if u0 == 0.0 || !u0.is_finite() {
            return Err(Error::Precondition("U(0) must be nonzero".into()));
        }
        let du0 = profile.slope_at_rise();
        let du1 = profile.slope_at_fall();
        if !(du0 > 0.0 && du1 < 0.0) {
            return Err(Error::HeavisideViolation(format!(
                "slopes at the crossings u'(0) = {du0}, u'(z1) = {du1}"
            )));
        }
        Ok(Self {
            params: profile.params,
            z1: profile.z1,
            profile,
            u0,
            du0,
            du1,
        })
    }

    /// Context for the wave at speed `c`.
    pub fn for_speed(b: f64, c: f64, d: f64, tau: f64) -> Result<Self> {
        Self::new(WaveProfile::for_speed(b, c, d, tau)?)
    }

    /// Evans function at `lambda`; fails where the root pattern breaks or the
    /// roots coalesce.
    pub fn evans(&self, lambda: C64) -> Result<C64> {
        let parts = self.parts(lambda)?;
        if !parts.pattern_ok {
            return Err(Error::PatternBreakdown(lambda));
        }
        Ok(parts.value)
    }

    /// Like [`EvansContext::evans`], but retries once at
    /// `lambda + 1e-7 (1 + |lambda|) e^{i pi / 4}` on coalescent roots.
    pub fn evans_perturbed(&self, lambda: C64) -> Result<C64> {
        match self.evans(lambda) {
            Err(Error::CoalescentBeta(_)) => {
                let shift = C64::from_polar(1e-7 * (1.0 + lambda.norm()), FRAC_PI_4);
                self.evans(lambda + shift)
            }
            other => other,
        }
    }

    /// Full evaluation, with `b3` taken as the root of largest real part even
    /// if the sign pattern fails (reported in [`EvansParts::pattern_ok`]).
    pub fn parts(&self, lambda: C64) -> Result<EvansParts> {
        let p = &self.params;
        let betas = ordered_betas(lambda, p)?;
        let b = betas.as_array();
        let scale = b.iter().map(|r| r.norm()).fold(1.0, f64::max);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            if (b[i] - b[j]).norm() < COALESCENCE_TOL * scale {
                return Err(Error::CoalescentBeta(lambda));
            }
        }
        let g = p.gamma();
        let c = p.c;
        // kappa_j = (c b_j + d + lambda) / W'_lambda(b_j): coordinate of e_1 along Y_j
        let kappa = |j: usize| -> C64 {
            let mut den = C64::new(c, 0.0);
            for k in 0..3 {
                if k != j {
                    den *= b[j] - b[k];
                }
            }
            (c * b[j] + p.d + lambda) / den
        };
        let u0 = C64::new(self.u0, 0.0);
        let s1 = -g * u0 / self.du0;
        let b3 = b[2];
        let mut transfer = C64::new(0.0, 0.0);
        for j in 0..3 {
            transfer += kappa(j) * ((b[j] - b3) * self.z1).exp();
        }
        let u_z1_scaled = u0 + s1 * transfer;
        let s2_scaled = g * u_z1_scaled / self.du1;
        let value = u0 + kappa(2) * (s1 + s2_scaled);
        Ok(EvansParts {
            lambda,
            betas,
            s1,
            s2_scaled,
            u_z1_scaled,
            value,
            pattern_ok: pattern_holds(&betas),
        })
    }

    /// `E` on `(0, lambda_max]` at `n` equally spaced real points.
    pub fn real_axis_scan(&self, lambda_max: f64, n: usize) -> Result<Vec<(f64, f64)>> {
        if !(lambda_max > 0.0) || n == 0 {
            return Err(Error::Precondition("need lambda_max > 0 and n > 0".into()));
        }
        (1..=n)
            .map(|k| {
                let l = lambda_max * k as f64 / n as f64;
                let e = self.evans_perturbed(C64::new(l, 0.0))?;
                if e.im.abs() > REAL_AXIS_TOL * e.norm().max(1.0) {
                    return Err(Error::NonRealOnRealAxis { lambda: l, im: e.im });
                }
                Ok((l, e.re))
            })
            .collect()
    }
}

/// Half-ring `r < |lambda| < R`, `Re lambda > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfRingContour {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    /// Initial samples on each arc.
    pub n_arc: usize,
    /// Initial samples on each imaginary-axis segment.
    pub n_seg: usize,
}

impl HalfRingContour {
    pub fn new(r: f64, big_r: f64, n_arc: usize, n_seg: usize) -> Result<Self> {
        let c = Self { r, big_r, n_arc, n_seg };
        c.validate()?;
        Ok(c)
    }

    /// `(r, R)` with 1000 samples per piece, 4000 in total.
    pub fn with_radii(r: f64, big_r: f64) -> Result<Self> {
        Self::new(r, big_r, 1000, 1000)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.big_r > self.r && self.big_r.is_finite()) {
            return Err(Error::Precondition(format!(
                "need 0 < r < R, got r = {}, R = {}",
                self.r, self.big_r
            )));
        }
        if self.n_arc < 2 || self.n_seg < 2 {
            return Err(Error::Precondition("need at least 2 samples per piece".into()));
        }
        Ok(())
    }

    /// Point at parameter `t` in `[0, 4]` along the counterclockwise boundary:
    /// outer arc `-iR -> R -> iR`, axis `iR -> ir`, inner arc `ir -> r -> -ir`,
    /// axis `-ir -> -iR`. Axis pieces are traversed geometrically in `|lambda|`.
    pub fn point(&self, t: f64) -> C64 {
        let (r, big) = (self.r, self.big_r);
        let piece = (t.floor() as i64).clamp(0, 3);
        let f = t - piece as f64;
        match piece {
            0 => C64::from_polar(big, -FRAC_PI_2 + PI * f),
            1 => C64::new(0.0, big * (r / big).powf(f)),
            2 => C64::from_polar(r, FRAC_PI_2 - PI * f),
            _ => C64::new(0.0, -r * (big / r).powf(f)),
        }
    }

    /// Initial parameter samples, closing back at `t = 4`.
    pub fn base_params(&self) -> Vec<f64> {
        let mut ts = Vec::with_capacity(2 * (self.n_arc + self.n_seg) + 1);
        for (piece, n) in [(0, self.n_arc), (1, self.n_seg), (2, self.n_arc), (3, self.n_seg)] {
            for i in 0..n {
                ts.push(piece as f64 + i as f64 / n as f64);
            }
        }
        ts.push(4.0);
        ts
    }

    pub fn total_samples(&self) -> usize {
        2 * (self.n_arc + self.n_seg)
    }
}

/// One sample of the Evans image of a contour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NyquistSample {
    pub t: f64,
    pub lambda: [f64; 2],
    pub e: [f64; 2],
}

/// Evans image of a closed contour, refined until consecutive argument
/// steps are below a bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourTrace {
    pub samples: Vec<NyquistSample>,
    pub total_arg: f64,
    pub min_abs_e: f64,
    pub max_step: f64,
    /// Samples where the root sign pattern failed.
    pub pattern_violations: usize,
    /// Midpoints inserted by adaptive bisection.
    pub inserted: usize,
}

const MAX_DEPTH: u32 = 40;

/// Evaluate `E` around `contour`, bisecting parameter intervals until the
/// argument change per step is below `max_step`.
pub fn trace_contour(ctx: &EvansContext, contour: &HalfRingContour, max_step: f64) -> Result<ContourTrace> {
    contour.validate()?;
    let ts = contour.base_params();
    let eval = |t: f64| -> Result<(f64, EvansParts)> {
        let l = contour.point(t);
        match ctx.parts(l) {
            Err(Error::CoalescentBeta(_)) => {
                let dt = 1e-7;
                let t2 = if t + dt <= 4.0 { t + dt } else { t - dt };
                Ok((t2, ctx.parts(contour.point(t2))?))
            }
            other => other.map(|p| (t, p)),
        }
    };
    let base: Vec<(f64, EvansParts)> = ts.par_iter().map(|&t| eval(t)).collect::<Result<_>>()?;

    let mut samples: Vec<(f64, EvansParts)> = Vec::with_capacity(base.len() * 2);
    let mut inserted = 0usize;
    samples.push(base[0]);
    for w in base.windows(2) {
        refine_segment(&eval, w[0], w[1], max_step, 0, &mut samples, &mut inserted)?;
    }
    let mut total = 0.0;
    let mut biggest: f64 = 0.0;
    for w in samples.windows(2) {
        let step = (w[1].1.value / w[0].1.value).arg();
        total += step;
        biggest = biggest.max(step.abs());
    }
    let min_abs = samples.iter().map(|s| s.1.value.norm()).fold(f64::INFINITY, f64::min);
    let violations = samples.iter().filter(|s| !s.1.pattern_ok).count();
    Ok(ContourTrace {
        samples: samples
            .iter()
            .map(|(t, p)| NyquistSample {
                t: *t,
                lambda: [p.lambda.re, p.lambda.im],
                e: [p.value.re, p.value.im],
            })
            .collect(),
        total_arg: total,
        min_abs_e: min_abs,
        max_step: biggest,
        pattern_violations: violations,
        inserted,
    })
}

fn refine_segment<F>(
    eval: &F,
    left: (f64, EvansParts),
    right: (f64, EvansParts),
    max_step: f64,
    depth: u32,
    out: &mut Vec<(f64, EvansParts)>,
    inserted: &mut usize,
) -> Result<()>
where
    F: Fn(f64) -> Result<(f64, EvansParts)>,
{
    let step = (right.1.value / left.1.value).arg().abs();
    let degenerate = !(step.is_finite());
    if (step <= max_step && !degenerate) || depth >= MAX_DEPTH {
        out.push(right);
        return Ok(());
    }
    let mid = eval(0.5 * (left.0 + right.0))?;
    *inserted += 1;
    refine_segment(eval, left, mid, max_step, depth + 1, out, inserted)?;
    refine_segment(eval, mid, right, max_step, depth + 1, out, inserted)
}

/// Zero count of `E` inside a half-ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub n_zeros: i64,
    #[serde(rename = "min_abs_E")]
    pub min_abs_e: f64,
    pub total_arg: f64,
    /// Whether adaptive bisection inserted points.
    pub refined: bool,
    pub samples: usize,
    pub pattern_violations: usize,
}

/// Winding number of `E` along the half-ring boundary (argument principle).
///
/// The argument is accumulated over samples refined until each step is below
/// `pi / 4`. If `E` nearly vanishes on the contour, the radii are nudged
/// (`r * 1.13`, `R * 1.011`) up to three times.
pub fn winding_number(ctx: &EvansContext, contour: &HalfRingContour) -> Result<WindingResult> {
    let mut c = *contour;
    let mut last_min = 0.0;
    for attempt in 0..4 {
        let trace = trace_contour(ctx, &c, FRAC_PI_4)?;
        if trace.min_abs_e >= ZERO_TOL {
            let turns = trace.total_arg / (2.0 * PI);
            let n = turns.round();
            if (turns - n).abs() > 0.05 {
                log::warn!("winding sum {turns} is not near an integer");
            }
            return Ok(WindingResult {
                r: c.r,
                big_r: c.big_r,
                n_zeros: n as i64,
                min_abs_e: trace.min_abs_e,
                total_arg: trace.total_arg,
                refined: trace.inserted > 0,
                samples: trace.samples.len(),
                pattern_violations: trace.pattern_violations,
            });
        }
        last_min = trace.min_abs_e;
        log::debug!("|E| = {last_min:e} on contour, perturbing (attempt {attempt})");
        c.r *= 1.13;
        c.big_r *= 1.011;
    }
    Err(Error::ZeroOnContour { min_abs: last_min })
}

/// Samples of `E` along the contour with argument steps below `pi / 8`.
pub fn nyquist_export(ctx: &EvansContext, contour: &HalfRingContour) -> Result<ContourTrace> {
    trace_contour(ctx, contour, FRAC_PI_8)
}

/// Spectral stability classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Unstable { n_zeros: i64 },
    Inconclusive { reason: String },
}

/// Contours used by [`stability_verdict`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourLadder {
    pub outer: Vec<f64>,
    pub inner: Vec<f64>,
    pub n_arc: usize,
    pub n_seg: usize,
}

impl Default for ContourLadder {
    fn default() -> Self {
        Self {
            outer: vec![20.0, 200.0, 1000.0],
            inner: vec![0.2, 0.1, 0.05],
            n_arc: 1000,
            n_seg: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub verdict: Verdict,
    pub windings: Vec<WindingResult>,
}

/// Winding numbers over every `(r, R)` of the ladder: stable if all are 0,
/// unstable if all agree on `N > 0`, inconclusive otherwise or when the root
/// sign pattern fails anywhere on a contour.
pub fn stability_verdict(ctx: &EvansContext, ladder: &ContourLadder) -> Result<StabilityReport> {
    let mut windings = Vec::new();
    for &big_r in &ladder.outer {
        for &r in &ladder.inner {
            let contour = HalfRingContour::new(r, big_r, ladder.n_arc, ladder.n_seg)?;
            match winding_number(ctx, &contour) {
                Ok(w) => windings.push(w),
                Err(Error::ZeroOnContour { min_abs }) => {
                    return Ok(StabilityReport {
                        verdict: Verdict::Inconclusive {
                            reason: format!("E vanishes on contour r = {r}, R = {big_r} ({min_abs:e})"),
                        },
                        windings,
                    })
                }
                Err(e) => return Err(e),
            }
        }
    }
    let verdict = if let Some(w) = windings.iter().find(|w| w.pattern_violations > 0) {
        Verdict::Inconclusive {
            reason: format!(
                "root sign pattern fails at {} samples on contour r = {}, R = {}",
                w.pattern_violations, w.r, w.big_r
            ),
        }
    } else if windings.iter().any(|w| w.n_zeros != windings[0].n_zeros) {
        Verdict::Inconclusive {
            reason: "winding numbers disagree across the contour ladder".into(),
        }
    } else if windings[0].n_zeros == 0 {
        Verdict::Stable
    } else {
        Verdict::Unstable {
            n_zeros: windings[0].n_zeros,
        }
    };
    Ok(StabilityReport { verdict, windings })
}

/// Spectral curves `lambda_j(k)`: solutions of `W_lambda(ik) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaCurves {
    pub k_grid: Vec<f64>,
    /// One path per root in `lambda` (three for `tau > 0`, two for `tau = 0`).
    pub branches: Vec<Vec<[f64; 2]>>,
}

impl LambdaCurves {
    /// Largest real part over all branches.
    pub fn max_real_part(&self) -> f64 {
        self.branches
            .iter()
            .flatten()
            .map(|z| z[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Coefficients of `W_lambda(beta)` as a polynomial in `lambda`, highest
/// degree first (`lambda^3, lambda^2, lambda, 1`).
pub fn lambda_poly(params: &ModelParams, beta: C64) -> [C64; 4] {
    let g = params.gamma();
    let (b, c, d, tau) = (params.b, params.c, params.d, params.tau);
    let b2 = beta * beta;
    [
        C64::new(-g * tau, 0.0),
        -3.0 * c * g * tau * beta - g * (tau * d + 1.0),
        (1.0 - 2.0 * c * c * g * tau) * b2 - c * g * (2.0 * d * tau + 2.0) * beta - g * (d + 1.0),
        c * b2 * beta + (d - c * c * g) * b2 - c * g * (1.0 + d) * beta - g * (d + b),
    ]
}

fn lambda_roots(params: &ModelParams, k: f64) -> Result<Vec<C64>> {
    let [l3, l2, l1, l0] = lambda_poly(params, C64::new(0.0, k));
    if params.tau > 0.0 {
        Ok(solve_cubic(&CubicCoeffs { c3: l3, c2: l2, c1: l1, c0: l0 })?.to_vec())
    } else {
        // quadratic l2 x^2 + l1 x + l0
        let disc = (l1 * l1 - 4.0 * l2 * l0).sqrt();
        let q = if (l1.conj() * disc).re >= 0.0 {
            -0.5 * (l1 + disc)
        } else {
            -0.5 * (l1 - disc)
        };
        Ok(vec![q / l2, l0 / q])
    }
}

/// Trace `lambda_j(k)` over `k_grid`, continuing branches by nearest-distance
/// assignment. A matched step larger than `10 |dk| (1 + max |lambda|)` is a
/// branch jump.
pub fn lambda_curves(params: &ModelParams, k_grid: &[f64]) -> Result<LambdaCurves> {
    params.validate()?;
    if k_grid.is_empty() {
        return Err(Error::Precondition("empty k grid".into()));
    }
    let kmax = k_grid.iter().fold(0.0f64, |m, k| m.max(k.abs()));
    let kmin = k_grid.iter().fold(f64::INFINITY, |m, &k| m.min(k));
    let kmaxv = k_grid.iter().fold(f64::NEG_INFINITY, |m, &k| m.max(k));
    if (kmin + kmaxv).abs() > 1e-12 * kmax.max(1.0) {
        return Err(Error::Precondition("k grid must be symmetric about 0".into()));
    }
    let mut prev = lambda_roots(params, k_grid[0])?;
    prev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let m = prev.len();
    let mut branches: Vec<Vec<[f64; 2]>> = vec![Vec::with_capacity(k_grid.len()); m];
    for j in 0..m {
        branches[j].push([prev[j].re, prev[j].im]);
    }
    for w in k_grid.windows(2) {
        let (k0, k) = (w[0], w[1]);
        let roots = lambda_roots(params, k)?;
        let assigned = best_assignment(&prev, &roots);
        let bound = 10.0 * (k - k0).abs() * (1.0 + prev.iter().map(|z| z.norm()).fold(0.0, f64::max));
        for j in 0..m {
            let jump = (assigned[j] - prev[j]).norm();
            if jump > bound {
                return Err(Error::BranchJump { k, jump });
            }
            branches[j].push([assigned[j].re, assigned[j].im]);
        }
        prev = assigned;
    }
    Ok(LambdaCurves {
        k_grid: k_grid.to_vec(),
        branches,
    })
}

fn best_assignment(prev: &[C64], roots: &[C64]) -> Vec<C64> {
    let perms: &[&[usize]] = if roots.len() == 3 {
        &[&[0, 1, 2], &[0, 2, 1], &[1, 0, 2], &[1, 2, 0], &[2, 0, 1], &[2, 1, 0]]
    } else {
        &[&[0, 1], &[1, 0]]
    };
    let cost = |p: &[usize]| -> f64 { p.iter().enumerate().map(|(j, &i)| (roots[i] - prev[j]).norm()).sum() };
    let best = perms
        .iter()
        .min_by(|a, b| cost(a).total_cmp(&cost(b)))
        .unwrap();
    best.iter().map(|&i| roots[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::alpha_roots;

    #[test]
    fn betas_at_zero_are_alphas() {
        let p = ModelParams::new(0.5, 0.65, 0.1, 0.1).unwrap();
        let a = alpha_roots(&p).unwrap();
        let b = beta_roots(C64::new(0.0, 0.0), &p).unwrap();
        assert_eq!(a.as_array(), b.as_array());
    }

    #[test]
    fn conjugate_lambda_conjugates_roots() {
        let p = ModelParams::new(0.5, 1.5, 0.1, 0.1).unwrap();
        let l = C64::new(0.8, 2.3);
        let x = beta_roots(l, &p).unwrap().as_array();
        let y = beta_roots(l.conj(), &p).unwrap().as_array();
        for bx in x {
            assert!(y.iter().any(|by| (by - bx.conj()).norm() < 1e-12));
        }
    }

    #[test]
    fn betas_grow_linearly() {
        let p = ModelParams::new(0.5, 1.5, 0.1, 0.1).unwrap();
        let l = C64::new(1000.0, 0.0);
        let r = beta_roots(l, &p).unwrap();
        for z in r.as_array() {
            assert!(z.norm() / l.norm() < 10.0 && z.norm() / l.norm() > 0.01);
        }
    }

    #[test]
    fn contour_pieces_join() {
        let c = HalfRingContour::with_radii(0.1, 20.0).unwrap();
        assert!((c.point(0.0) - C64::new(0.0, -20.0)).norm() < 1e-12);
        assert!((c.point(1.0) - C64::new(0.0, 20.0)).norm() < 1e-12);
        assert!((c.point(2.0) - C64::new(0.0, 0.1)).norm() < 1e-12);
        assert!((c.point(3.0) - C64::new(0.0, -0.1)).norm() < 1e-12);
        assert!((c.point(4.0) - C64::new(0.0, -20.0)).norm() < 1e-12);
        assert!((c.point(0.5) - 20.0).norm() < 1e-12);
        assert!((c.point(2.5) - 0.1).norm() < 1e-12);
        assert_eq!(c.total_samples(), 4000);
        assert!(HalfRingContour::new(1.0, 0.5, 10, 10).is_err());
    }

    #[test]
    fn evans_vanishes_at_zero() {
        let ctx = EvansContext::for_speed(0.5, 1.5, 0.1, 0.1).unwrap();
        assert!(ctx.evans(C64::new(0.0, 0.0)).unwrap().norm() < 1e-8);
    }

    #[test]
    fn zero_normalization_rejected() {
        let w = WaveProfile::for_speed(0.5, 1.5, 0.1, 0.1).unwrap();
        assert!(EvansContext::with_normalization(w, 0.0).is_err());
    }

    #[test]
    fn lambda_curves_at_k_zero() {
        let p = ModelParams::new(0.3, 0.6, 0.1, 0.1).unwrap();
        let curves = lambda_curves(&p, &[-1.0, 0.0, 1.0]).unwrap();
        let g = p.gamma();
        for br in &curves.branches {
            let l = C64::new(br[1][0], br[1][1]);
            let v = -g * (p.tau * l * l + l + 1.0) * (l + p.d) - p.b * g;
            assert!(v.norm() < 1e-12);
        }
        assert!(lambda_curves(&p, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn parabolic_limit_has_two_branches() {
        let p = ModelParams::new(0.5, 1.0, 0.1, 0.0).unwrap();
        let curves = lambda_curves(&p, &crate::numeric::linspace(-5.0, 5.0, 101)).unwrap();
        assert_eq!(curves.branches.len(), 2);
    }
}
