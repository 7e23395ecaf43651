//! Speed curves `a(c)` at fixed `(b, d, tau)`, their fold `(a*, c*)`, and the
//! inverse map from a threshold to the slow and fast speeds.
//!
//! The curve is parameterized by `c`: for each speed the construction gives a
//! single `s` and therefore a single threshold, so no two-branch equation has
//! to be solved directly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{golden_max, logspace, parabola_vertex, refine_root};
use crate::poly::ModelParams;
use crate::profile::WaveProfile;

/// Default number of speeds on a traced curve.
pub const DEFAULT_STEPS: usize = 400;
/// Lower end of the default speed grid.
pub const DEFAULT_C_MIN: f64 = 0.01;
/// Upper end of the default grid when `tau = 0` (no relativistic cutoff).
pub const DEFAULT_C_MAX_PARABOLIC: f64 = 10.0;
/// Two speeds within this distance of `a*` are reported as merged.
pub const FOLD_MERGE_TOL: f64 = 1e-10;
/// Fold location tolerance in `c`.
pub const FOLD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedPoint {
    pub c: f64,
    pub a: f64,
    pub s: f64,
    pub z1: f64,
    pub alpha3: f64,
}

impl SpeedPoint {
    fn from_profile(p: &WaveProfile) -> Self {
        Self {
            c: p.speed(),
            a: p.threshold(),
            s: p.s,
            z1: p.z1,
            alpha3: p.alphas.positive_root(),
        }
    }
}

/// Fold of the speed curve: the largest threshold admitting a wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fold {
    pub a_star: f64,
    pub c_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedCurve {
    pub b: f64,
    pub d: f64,
    pub tau: f64,
    /// Traced points in ascending `c`.
    pub points: Vec<SpeedPoint>,
    /// Grid speeds where no localized wave was found.
    pub gaps: Vec<f64>,
    /// Discrete local maxima of `a(c)`; a well-formed curve has exactly one.
    pub interior_maxima: usize,
    pub fold: Option<Fold>,
}

/// Speed grid: [`DEFAULT_STEPS`] log-spaced points on `(0.01, 0.999 / sqrt(tau))`.
pub fn default_c_grid(tau: f64) -> Vec<f64> {
    let hi = if tau > 0.0 {
        0.999 / tau.sqrt()
    } else {
        DEFAULT_C_MAX_PARABOLIC
    };
    logspace(DEFAULT_C_MIN, hi, DEFAULT_STEPS)
}

/// Threshold and wave data at one speed.
pub fn speed_point(b: f64, d: f64, tau: f64, c: f64) -> Result<SpeedPoint> {
    WaveProfile::for_speed(b, c, d, tau).map(|p| SpeedPoint::from_profile(&p))
}

/// Trace `a(c)` over `c_grid`.
pub fn trace_curve(b: f64, d: f64, tau: f64, c_grid: &[f64]) -> Result<SpeedCurve> {
    if c_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Precondition("speed grid must be strictly ascending".into()));
    }
    if c_grid.first().is_some_and(|&c| !(c > 0.0)) {
        return Err(Error::Precondition("speeds must be positive".into()));
    }
    let stop = ModelParams::critical_speed(tau) * (1.0 - 1e-6);
    let usable: Vec<f64> = c_grid.iter().copied().take_while(|&c| c < stop).collect();
    if usable.len() < c_grid.len() {
        log::debug!(
            "speed grid truncated at c = {stop} ({} points dropped)",
            c_grid.len() - usable.len()
        );
    }
    let results: Vec<(f64, Result<SpeedPoint>)> = usable
        .par_iter()
        .map(|&c| (c, speed_point(b, d, tau, c)))
        .collect();
    let mut points = Vec::new();
    let mut gaps = Vec::new();
    for (c, r) in results {
        match r {
            Ok(p) => points.push(p),
            Err(Error::InvalidParams(m)) => return Err(Error::InvalidParams(m)),
            Err(e) => {
                log::trace!("no wave at c = {c}: {e}");
                gaps.push(c);
            }
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyCurve);
    }
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.c, p.a)).collect();
    let interior_maxima = count_interior_maxima(&pairs);
    if interior_maxima != 1 {
        log::warn!("speed curve has {interior_maxima} interior maxima");
    }
    let fold = find_fold(&pairs).ok();
    Ok(SpeedCurve {
        b,
        d,
        tau,
        points,
        gaps,
        interior_maxima,
        fold,
    })
}

fn count_interior_maxima(pts: &[(f64, f64)]) -> usize {
    pts.windows(3).filter(|w| w[1].1 > w[0].1 && w[1].1 >= w[2].1).count()
}

/// Fold from sampled `(c, a)` pairs: discrete maximum refined by the
/// parabola through it and its two neighbours.
pub fn find_fold(points: &[(f64, f64)]) -> Result<Fold> {
    if points.len() < 3 {
        return Err(Error::Precondition("fold needs at least 3 points".into()));
    }
    let i = points
        .iter()
        .enumerate()
        .max_by(|x, y| x.1 .1.total_cmp(&y.1 .1))
        .map(|(i, _)| i)
        .unwrap();
    if i == 0 || i + 1 == points.len() {
        return Err(Error::MonotoneCurve);
    }
    let (x, y) = parabola_vertex(points[i - 1], points[i], points[i + 1])
        .filter(|(x, _)| *x >= points[i - 1].0 && *x <= points[i + 1].0)
        .unwrap_or(points[i]);
    Ok(Fold { a_star: y, c_star: x })
}

/// Outcome of inverting the speed curve at a given threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpeedSolution {
    /// `c_s < c* < c_f`.
    Pair { slow: f64, fast: f64 },
    /// `a` equals `a*` to within [`FOLD_MERGE_TOL`].
    Merged { c_star: f64 },
    /// Only the slow branch reaches `a` (the fast branch ends before it).
    SlowOnly { slow: f64 },
    FastOnly { fast: f64 },
    None,
}

impl SpeedCurve {
    pub fn params_at(&self, c: f64) -> Result<ModelParams> {
        ModelParams::new(self.b, c, self.d, self.tau)
    }

    /// Threshold at speed `c`, recomputed from scratch.
    pub fn threshold_at(&self, c: f64) -> Result<f64> {
        speed_point(self.b, self.d, self.tau, c).map(|p| p.a)
    }

    /// Fold refined by golden-section search on `a(c)` around the parabolic estimate.
    pub fn refined_fold(&self) -> Result<Fold> {
        let pairs: Vec<(f64, f64)> = self.points.iter().map(|p| (p.c, p.a)).collect();
        let coarse = find_fold(&pairs)?;
        let i = pairs
            .iter()
            .position(|p| p.0 >= coarse.c_star)
            .unwrap_or(pairs.len() - 1)
            .clamp(1, pairs.len() - 1);
        let lo = pairs[i - 1].0;
        let hi = pairs[(i + 1).min(pairs.len() - 1)].0;
        let (c, a) = golden_max(
            |c| self.threshold_at(c).unwrap_or(f64::NEG_INFINITY),
            lo,
            hi,
            FOLD_TOL,
        );
        if a.is_finite() {
            Ok(Fold { a_star: a, c_star: c })
        } else {
            Ok(coarse)
        }
    }

    /// Speeds with threshold `a`, one per branch of the curve.
    pub fn solve_for_threshold(&self, a: f64) -> Result<SpeedSolution> {
        if !(a > 0.0) {
            return Err(Error::Precondition(format!("threshold a = {a} must be positive")));
        }
        let fold = self.refined_fold()?;
        if (a - fold.a_star).abs() < FOLD_MERGE_TOL {
            return Ok(SpeedSolution::Merged { c_star: fold.c_star });
        }
        if a > fold.a_star {
            return Ok(SpeedSolution::None);
        }
        let slow = self.branch_root(a, fold, Branch::Slow);
        let fast = self.branch_root(a, fold, Branch::Fast);
        Ok(match (slow, fast) {
            (Some(slow), Some(fast)) => SpeedSolution::Pair { slow, fast },
            (Some(slow), None) => SpeedSolution::SlowOnly { slow },
            (None, Some(fast)) => SpeedSolution::FastOnly { fast },
            (None, None) => SpeedSolution::None,
        })
    }

    fn branch_root(&self, target: f64, fold: Fold, branch: Branch) -> Option<f64> {
        // speeds without a wave count as a = 0: the curve ends at a = 0 where
        // s -> 1, and any spurious bracket is rejected by the final residual check
        let f = |c: f64| self.threshold_at(c).unwrap_or(0.0) - target;
        let mut knots: Vec<f64> = self
            .points
            .iter()
            .map(|p| p.c)
            .chain(self.gaps.iter().copied())
            .filter(|&c| match branch {
                Branch::Slow => c < fold.c_star,
                Branch::Fast => c > fold.c_star,
            })
            .collect();
        knots.sort_by(f64::total_cmp);
        if branch == Branch::Slow {
            knots.reverse();
        }
        let mut prev = (fold.c_star, fold.a_star - target);
        for c in knots {
            let a_here = self
                .points
                .iter()
                .find(|p| p.c == c)
                .map(|p| p.a)
                .unwrap_or(0.0);
            let v = a_here - target;
            if v <= 0.0 && prev.1 > 0.0 {
                let (lo, hi) = if c < prev.0 { (c, prev.0) } else { (prev.0, c) };
                let root = refine_root(f, lo, hi, 1e-14 * hi, 0.0);
                let resid = self.threshold_at(root).map(|a| (a - target).abs());
                return match resid {
                    Ok(r) if r < 1e-8 => Some(root),
                    _ => None,
                };
            }
            prev = (c, v);
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Slow,
    Fast,
}

/// Trace the default grid and invert at `a`.
pub fn solve_c_for_a(a: f64, b: f64, d: f64, tau: f64) -> Result<SpeedSolution> {
    let curve = trace_curve(b, d, tau, &default_c_grid(tau))?;
    curve.solve_for_threshold(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_parabola_fold() {
        let pts: Vec<(f64, f64)> = crate::numeric::linspace(0.0, 2.0, 41)
            .into_iter()
            .map(|c| (c, 1.0 - (c - 1.0) * (c - 1.0)))
            .collect();
        let f = find_fold(&pts).unwrap();
        assert!((f.a_star - 1.0).abs() < 1e-6 && (f.c_star - 1.0).abs() < 1e-6);
        let skewed: Vec<(f64, f64)> = crate::numeric::linspace(0.013, 2.0, 37)
            .into_iter()
            .map(|c| (c, 1.0 - (c - 1.0) * (c - 1.0)))
            .collect();
        let f = find_fold(&skewed).unwrap();
        assert!((f.a_star - 1.0).abs() < 1e-12 && (f.c_star - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_curve_has_no_fold() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, i as f64)).collect();
        assert_eq!(find_fold(&pts), Err(Error::MonotoneCurve));
    }

    #[test]
    fn grid_stops_below_the_critical_speed() {
        let g = default_c_grid(0.1);
        assert!(*g.last().unwrap() < 1.0 / 0.1f64.sqrt());
        let grid = vec![0.5, 1.0, 3.16227, 3.2];
        let curve = trace_curve(0.5, 0.1, 0.1, &grid).unwrap();
        let stop = (1.0 - 1e-6) / 0.1f64.sqrt();
        let seen = curve.points.len() + curve.gaps.len();
        assert_eq!(seen, 3);
        assert!(curve.points.iter().all(|p| p.c < stop));
        assert!(curve.gaps.iter().all(|&c| c < stop));
    }

    #[test]
    fn descending_grid_rejected() {
        assert!(matches!(
            trace_curve(0.5, 0.1, 0.1, &[1.0, 0.5]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn empty_when_no_speed_admits_a_wave() {
        assert_eq!(trace_curve(0.5, 0.1, 0.1, &[0.05, 0.1, 0.2]), Err(Error::EmptyCurve));
    }
}
