//! Small scalar helpers: accurate complex `exp(z) - 1`, bracketed root
//! refinement, golden-section search and sample grids.

use num_complex::Complex64;

/// `exp(z) - 1` without cancellation for small `|z|`.
pub fn cexpm1(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let half = (0.5 * y).sin();
    let re = x.exp_m1() * y.cos() - 2.0 * half * half;
    let im = x.exp() * y.sin();
    Complex64::new(re, im)
}

/// Root of `f` in `[lo, hi]` given `f(lo)` and `f(hi)` of opposite sign.
///
/// Bisection with a secant (regula falsi, Illinois-modified) step whenever it
/// lands inside the bracket. Stops when the bracket is narrower than `xtol`
/// or `|f| <= ftol`.
pub fn refine_root<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
    ftol: f64,
) -> f64 {
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    debug_assert!(flo.signum() != fhi.signum(), "root not bracketed");
    let mut side = 0i8;
    for it in 0..200 {
        if (hi - lo).abs() <= xtol {
            break;
        }
        // alternate bisection and Illinois steps so the bracket always shrinks
        let x = if it % 2 == 0 {
            let t = hi - fhi * (hi - lo) / (fhi - flo);
            if t > lo.min(hi) && t < lo.max(hi) {
                t
            } else {
                0.5 * (lo + hi)
            }
        } else {
            0.5 * (lo + hi)
        };
        let fx = f(x);
        if fx.abs() <= ftol || fx == 0.0 {
            return x;
        }
        if fx.signum() == fhi.signum() {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        } else {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        }
    }
    if flo.abs() < fhi.abs() {
        lo
    } else {
        hi
    }
}

/// Maximizer of a unimodal `f` on `[lo, hi]` by golden-section search.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (hi - lo).abs() > xtol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Minimizer of a unimodal `f` on `[lo, hi]`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, xtol: f64) -> (f64, f64) {
    let (x, v) = golden_max(|x| -f(x), lo, hi, xtol);
    (x, -v)
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let h = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i + 1 == n { hi } else { lo + h * i as f64 })
                .collect()
        }
    }
}

/// `n` points log-spaced from `lo` to `hi` (both > 0).
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l0, l1) = (lo.ln(), hi.ln());
    linspace(l0, l1, n)
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            if i == 0 {
                lo
            } else if i + 1 == n {
                hi
            } else {
                v.exp()
            }
        })
        .collect()
}

/// Vertex of the parabola through three points: `(x, y)` of the extremum.
pub fn parabola_vertex(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> Option<(f64, f64)> {
    let (x0, y0) = p0;
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curv = (d12 - d01) / (x2 - x0);
    if curv == 0.0 || !curv.is_finite() {
        return None;
    }
    // Newton form: y = y0 + d01 (x - x0) + curv (x - x0)(x - x1)
    let xv = 0.5 * (x0 + x1) - 0.5 * d01 / curv;
    let yv = y0 + d01 * (xv - x0) + curv * (xv - x0) * (xv - x1);
    Some((xv, yv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm1_matches_exp_for_moderate_arguments() {
        let z = Complex64::new(0.7, -1.3);
        let d = cexpm1(z) - (z.exp() - 1.0);
        assert!(d.norm() < 1e-15);
        let tiny = Complex64::new(1e-12, 2e-12);
        let r = cexpm1(tiny);
        assert!((r - tiny).norm() < 1e-23);
    }

    #[test]
    fn root_and_golden() {
        let r = refine_root(|x| x * x - 2.0, 0.0, 2.0, 1e-15, 0.0);
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        let (x, y) = golden_max(|x| 1.0 - (x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8 && (y - 1.0).abs() < 1e-15);
    }

    #[test]
    fn vertex_of_exact_parabola() {
        let f = |x: f64| 1.0 - (x - 1.0) * (x - 1.0);
        let (x, y) = parabola_vertex((0.7, f(0.7)), (0.95, f(0.95)), (1.4, f(1.4))).unwrap();
        assert!((x - 1.0).abs() < 1e-12 && (y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grids_hit_endpoints() {
        let g = logspace(0.01, 3.0, 400);
        assert_eq!(g.len(), 400);
        assert_eq!(g[0], 0.01);
        assert_eq!(g[399], 3.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
