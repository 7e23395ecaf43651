//! Model parameters, the cubic characteristic polynomials of the traveling
//! wave and linearized systems, and their roots.
//!
//! Both first-order systems share the matrix
//!
//! ```text
//!        | gamma c (1 + 2 tau l)   gamma (tau l^2 + l + 1)   gamma       |
//! A(l) = | 1                       0                         0           |
//!        | 0                       b / c                     -(d + l)/c  |
//! ```
//!
//! with `gamma = 1 / (1 - c^2 tau)`. `A(0)` governs the wave profile and
//! `A(lambda)` the eigenvalue problem. The eigenvectors and left eigenvectors
//! are known in closed form, which makes the fundamental matrix
//! `M(z) = [e^{b_j z} Y_j]` invertible analytically (see [`ModalBasis`]).

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default relative tolerance for root residuals.
pub const ROOT_TOL: f64 = 1e-10;

/// Parameter tuple `(a, b, c, d, tau)` of the relaxing McKean system.
///
/// The threshold `a` is optional: on a speed curve it is an output of the
/// construction (determined by `c`), so most computations only need
/// `(b, c, d, tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub a: Option<f64>,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub tau: f64,
}

impl ModelParams {
    /// Validated parameters without a prescribed threshold.
    pub fn new(b: f64, c: f64, d: f64, tau: f64) -> Result<Self> {
        let p = Self { a: None, b, c, d, tau };
        p.validate()?;
        Ok(p)
    }

    pub fn with_threshold(mut self, a: f64) -> Result<Self> {
        self.a = Some(a);
        self.validate()?;
        Ok(self)
    }

    pub fn with_speed(mut self, c: f64) -> Result<Self> {
        self.c = c;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [("b", self.b), ("c", self.c), ("d", self.d), ("tau", self.tau)];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} = {v} is not finite")));
            }
        }
        if let Some(a) = self.a {
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::InvalidParams(format!("a = {a} must be positive")));
            }
        }
        if self.b <= 0.0 {
            return Err(Error::InvalidParams(format!("b = {} must be positive", self.b)));
        }
        if self.c <= 0.0 {
            return Err(Error::InvalidParams(format!("c = {} must be positive", self.c)));
        }
        if self.d < 0.0 {
            return Err(Error::InvalidParams(format!("d = {} must be nonnegative", self.d)));
        }
        if self.tau < 0.0 {
            return Err(Error::InvalidParams(format!("tau = {} must be nonnegative", self.tau)));
        }
        let ct = self.c * self.c * self.tau;
        if ct >= 1.0 {
            return Err(Error::InvalidParams(format!("c² τ = {ct} ≥ 1")));
        }
        Ok(())
    }

    /// `gamma = 1 / (1 - c^2 tau)`.
    pub fn gamma(&self) -> f64 {
        1.0 / (1.0 - self.c * self.c * self.tau)
    }

    /// Upper bound `1 / sqrt(tau)` on admissible speeds (infinite for `tau = 0`).
    pub fn critical_speed(tau: f64) -> f64 {
        if tau > 0.0 {
            1.0 / tau.sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// The system matrix `A(lambda)`.
    pub fn system_matrix(&self, lambda: C64) -> Matrix3<C64> {
        let g = self.gamma();
        let (b, c, d, tau) = (self.b, self.c, self.d, self.tau);
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Matrix3::new(
            g * c * (one + 2.0 * tau * lambda),
            g * (tau * lambda * lambda + lambda + one),
            C64::new(g, 0.0),
            one,
            zero,
            zero,
            zero,
            C64::new(b / c, 0.0),
            -(lambda + d) / c,
        )
    }
}

/// Cubic `c3 x^3 + c2 x^2 + c1 x + c0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicCoeffs<T> {
    pub c3: T,
    pub c2: T,
    pub c1: T,
    pub c0: T,
}

impl CubicCoeffs<f64> {
    pub fn to_complex(self) -> CubicCoeffs<C64> {
        CubicCoeffs {
            c3: self.c3.into(),
            c2: self.c2.into(),
            c1: self.c1.into(),
            c0: self.c0.into(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        ((self.c3 * x + self.c2) * x + self.c1) * x + self.c0
    }
}

impl CubicCoeffs<C64> {
    pub fn eval(&self, x: C64) -> C64 {
        ((self.c3 * x + self.c2) * x + self.c1) * x + self.c0
    }

    pub fn eval_deriv(&self, x: C64) -> C64 {
        (3.0 * self.c3 * x + 2.0 * self.c2) * x + self.c1
    }

    pub fn max_abs(&self) -> f64 {
        [self.c3, self.c2, self.c1, self.c0]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Scale for residual checks at `x`: sum of the term magnitudes.
    pub fn term_scale(&self, x: C64) -> f64 {
        let r = x.norm();
        self.c3.norm() * r * r * r + self.c2.norm() * r * r + self.c1.norm() * r + self.c0.norm()
    }
}

/// `W(alpha) = c a^3 + (d - c^2 g) a^2 - c g (1 + d) a - g (d + b)`.
pub fn char_poly_alpha(params: &ModelParams) -> Result<CubicCoeffs<f64>> {
    params.validate()?;
    let g = params.gamma();
    let (b, c, d) = (params.b, params.c, params.d);
    Ok(CubicCoeffs {
        c3: c,
        c2: d - c * c * g,
        c1: -c * g * (1.0 + d),
        c0: -g * (d + b),
    })
}

/// `W_lambda(beta)`, the characteristic polynomial of `A(lambda)` scaled by `c`.
pub fn char_poly_beta(params: &ModelParams, lambda: C64) -> Result<CubicCoeffs<C64>> {
    params.validate()?;
    Ok(char_poly_beta_unchecked(params, lambda))
}

pub(crate) fn char_poly_beta_unchecked(params: &ModelParams, lambda: C64) -> CubicCoeffs<C64> {
    let g = params.gamma();
    let (b, c, d, tau) = (params.b, params.c, params.d, params.tau);
    let l = lambda;
    CubicCoeffs {
        c3: C64::new(c, 0.0),
        c2: l + d - c * c * g * (1.0 + 2.0 * l * tau),
        c1: -c * g * (1.0 + d + 2.0 * d * tau * l + 3.0 * l * l * tau + 2.0 * l),
        c0: -g * (tau * l * l + l + 1.0) * (l + d) - b * g,
    }
}

/// Three roots of a cubic.
///
/// Eigenvalues of the companion matrix (complex Schur form), each polished by
/// one Newton step when that lowers the residual. Ordering: the real positive
/// root of largest modulus goes last when one exists; the remaining roots are
/// ordered by real part, then imaginary part.
pub fn solve_cubic(coeffs: &CubicCoeffs<C64>) -> Result<[C64; 3]> {
    let scale = coeffs.max_abs();
    if !(scale.is_finite()) || coeffs.c3.norm() <= f64::EPSILON * scale || coeffs.c3.norm() == 0.0 {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    let inv = 1.0 / coeffs.c3;
    let (p2, p1, p0) = (coeffs.c2 * inv, coeffs.c1 * inv, coeffs.c0 * inv);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let companion = Matrix3::new(-p2, -p1, -p0, one, zero, zero, zero, one, zero);
    let (_, t) = companion.schur().unpack();
    let mut roots = [t[(0, 0)], t[(1, 1)], t[(2, 2)]];
    for r in roots.iter_mut() {
        *r = newton_polish(coeffs, *r);
    }
    sort_roots(&mut roots);
    Ok(roots)
}

fn newton_polish(p: &CubicCoeffs<C64>, x: C64) -> C64 {
    let f = p.eval(x);
    let df = p.eval_deriv(x);
    if df.norm() == 0.0 || !df.is_finite() {
        return x;
    }
    let y = x - f / df;
    if y.is_finite() && p.eval(y).norm() < f.norm() {
        y
    } else {
        x
    }
}

fn is_real(z: C64) -> bool {
    z.im.abs() <= 1e-9 * z.norm().max(1e-300)
}

fn cmp_re_im(a: &C64, b: &C64) -> std::cmp::Ordering {
    let tol = 1e-12 * a.norm().max(b.norm()).max(1e-300);
    if (a.re - b.re).abs() <= tol {
        a.im.total_cmp(&b.im)
    } else {
        a.re.total_cmp(&b.re)
    }
}

fn sort_roots(roots: &mut [C64; 3]) {
    roots.sort_by(cmp_re_im);
    // largest real positive root goes last, rest keep their (Re, Im) order
    if let Some(i) = (0..3).rev().find(|&i| is_real(roots[i]) && roots[i].re > 0.0) {
        let r = roots[i];
        let mut rest: Vec<C64> = roots.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, z)| *z).collect();
        rest.sort_by(cmp_re_im);
        *roots = [rest[0], rest[1], r];
    }
}

/// Shape of the stable pair `(r1, r2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootPattern {
    /// Two real negative roots, `r1 <= r2`.
    RealPair,
    /// Complex conjugate pair with `Im(r1) < 0`.
    ConjugatePair,
    /// General complex roots (characteristic roots at non-real `lambda`).
    Complex,
}

/// Classified characteristic roots: `r3` is the unstable root
/// (`Re r3 > 0`), `r1` and `r2` the stable ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharRoots {
    pub r1: C64,
    pub r2: C64,
    pub r3: C64,
    pub pattern: RootPattern,
}

impl CharRoots {
    pub fn as_array(&self) -> [C64; 3] {
        [self.r1, self.r2, self.r3]
    }

    /// Real `alpha_3` (the classification guarantees it is real for `W(alpha)`).
    pub fn positive_root(&self) -> f64 {
        self.r3.re
    }

    /// Relative residuals of the three Viete relations of `W(alpha)`.
    pub fn viete_residuals(&self, params: &ModelParams) -> [f64; 3] {
        let g = params.gamma();
        let (b, c, d) = (params.b, params.c, params.d);
        let [a1, a2, a3] = self.as_array();
        let prod = a1 * a2 * a3;
        let pairs = a1 * a2 + a1 * a3 + a2 * a3;
        let sum = a1 + a2 + a3;
        let e_prod = g * (d + b) / c;
        let e_pairs = -g * (1.0 + d);
        let e_sum = (c * c * g - d) / c;
        let rel = |got: C64, want: f64, scale: f64| (got - want).norm() / scale.max(want.abs()).max(1e-300);
        let m = [a1.norm(), a2.norm(), a3.norm()];
        [
            rel(prod, e_prod, m[0] * m[1] * m[2]),
            rel(pairs, e_pairs, m[0] * m[1] + m[0] * m[2] + m[1] * m[2]),
            rel(sum, e_sum, m[0] + m[1] + m[2]),
        ]
    }
}

/// Identify the unique positive real root `alpha_3` of `W(alpha)` and check
/// that the remaining two have negative real parts.
pub fn classify_alpha_roots(roots: [C64; 3]) -> Result<CharRoots> {
    let positive: Vec<usize> = (0..3).filter(|&i| is_real(roots[i]) && roots[i].re > 0.0).collect();
    if positive.len() != 1 {
        return Err(Error::Classification(format!(
            "expected one positive real root, found {} in {:?}",
            positive.len(),
            roots
        )));
    }
    let i3 = positive[0];
    let mut rest: Vec<C64> = (0..3).filter(|&i| i != i3).map(|i| roots[i]).collect();
    if rest.iter().any(|z| z.re >= 0.0) {
        return Err(Error::Classification(format!(
            "stable roots must have negative real parts: {:?}",
            rest
        )));
    }
    let r3 = C64::new(roots[i3].re, 0.0);
    let pattern = if is_real(rest[0]) && is_real(rest[1]) {
        for z in rest.iter_mut() {
            z.im = 0.0;
        }
        rest.sort_by(|a, b| a.re.total_cmp(&b.re));
        RootPattern::RealPair
    } else {
        // exact conjugacy for real coefficients
        let re = 0.5 * (rest[0].re + rest[1].re);
        let im = 0.5 * (rest[0].im.abs() + rest[1].im.abs());
        rest = vec![C64::new(re, -im), C64::new(re, im)];
        RootPattern::ConjugatePair
    };
    Ok(CharRoots {
        r1: rest[0],
        r2: rest[1],
        r3,
        pattern,
    })
}

/// Roots of `W(alpha)` for `params`, classified.
pub fn alpha_roots(params: &ModelParams) -> Result<CharRoots> {
    let coeffs = char_poly_alpha(params)?;
    let roots = solve_cubic(&coeffs.to_complex())?;
    classify_alpha_roots(roots)
}

/// Eigen-decomposition of `A(lambda)` built from its characteristic roots.
///
/// Right eigenvectors `Y_j = (r_j, 1, b / (c r_j + d + lambda))`, left
/// eigenvectors `L_j = (1, r_j - g c (1 + 2 tau lambda), g c / (c r_j + d + lambda))`.
/// Since `L_j . Y_k = 0` for `j != k`, the coordinates of a vector `v` in the
/// eigenbasis are `(L_j . v) / (L_j . Y_j)`. `c r + d + lambda` never vanishes
/// at a root (it would force `W_lambda = -g b`), and `L_j . Y_j` vanishes only
/// for a repeated root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalBasis {
    pub roots: [C64; 3],
    pub right: [[C64; 3]; 3],
    pub left: [[C64; 3]; 3],
    pub norms: [C64; 3],
}

impl ModalBasis {
    pub fn new(params: &ModelParams, lambda: C64, roots: [C64; 3]) -> Result<Self> {
        let g = params.gamma();
        let (b, c, d, tau) = (params.b, params.c, params.d, params.tau);
        let mut right = [[C64::new(0.0, 0.0); 3]; 3];
        let mut left = right;
        let mut norms = [C64::new(0.0, 0.0); 3];
        let first = g * c * (1.0 + 2.0 * tau * lambda);
        for j in 0..3 {
            let r = roots[j];
            let den = c * r + d + lambda;
            right[j] = [r, C64::new(1.0, 0.0), b / den];
            left[j] = [C64::new(1.0, 0.0), r - first, g * c / den];
            norms[j] = dot(&left[j], &right[j]);
        }
        let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
        if norms.iter().any(|n| !(n.norm() > 1e-12 * scale) || !n.is_finite()) {
            return Err(Error::SingularFundamentalMatrix);
        }
        Ok(Self {
            roots,
            right,
            left,
            norms,
        })
    }

    /// Coordinates of `v` in the eigenbasis: `M(0)^{-1} v`.
    pub fn coords(&self, v: [C64; 3]) -> [C64; 3] {
        let mut out = [C64::new(0.0, 0.0); 3];
        for j in 0..3 {
            out[j] = dot(&self.left[j], &v) / self.norms[j];
        }
        out
    }

    /// `sum_j coef_j e^{r_j dz} Y_j`.
    pub fn combine(&self, coef: [C64; 3], dz: f64) -> [C64; 3] {
        let mut v = [C64::new(0.0, 0.0); 3];
        for j in 0..3 {
            let k = coef[j] * (self.roots[j] * dz).exp();
            for i in 0..3 {
                v[i] += k * self.right[j][i];
            }
        }
        v
    }
}

pub(crate) fn dot(a: &[C64; 3], b: &[C64; 3]) -> C64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
