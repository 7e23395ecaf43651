//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use relaxwave::evans::EvansContext;
use relaxwave::poly::{CubicCoeffs, ModelParams};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Admissible `(b, c, d, tau)` drawn from the ranges used across the tests.
pub fn random_params(rng: &mut StdRng) -> ModelParams {
    let b = rng.random_range(0.05..1.0);
    let d = rng.random_range(0.01..0.5);
    let tau: f64 = if rng.random_range(0.0..1.0) < 0.15 {
        0.0
    } else {
        rng.random_range(0.0..0.3)
    };
    let c_hi = if tau > 0.0 { (0.95 / tau.sqrt()).min(3.0) } else { 3.0 };
    let c = rng.random_range(0.05..c_hi);
    ModelParams::new(b, c, d, tau).unwrap()
}

/// Durand-Kerner (Weierstrass) iteration for the three roots of a cubic.
pub fn durand_kerner(p: &CubicCoeffs<C64>) -> [C64; 3] {
    let monic = |x: C64| ((x + p.c2 / p.c3) * x + p.c1 / p.c3) * x + p.c0 / p.c3;
    let seed = C64::new(0.4, 0.9);
    let scale = 1.0 + [p.c2, p.c1, p.c0].iter().map(|c| (c / p.c3).norm()).fold(0.0, f64::max);
    let mut z = [seed * scale, seed * seed * scale, seed * seed * seed * scale];
    for _ in 0..2000 {
        let prev = z;
        for i in 0..3 {
            let mut den = C64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            z[i] -= monic(z[i]) / den;
        }
        if (0..3).all(|i| (z[i] - prev[i]).norm() <= 1e-15 * z[i].norm().max(1e-300)) {
            break;
        }
    }
    z
}

/// `det(M)` by cofactor expansion.
pub fn det3(m: &Matrix3<C64>) -> C64 {
    m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
}

/// Build `A(lambda)` entry by entry from the linearized equations.
pub fn system_matrix(p: &ModelParams, lambda: C64) -> Matrix3<C64> {
    let g = 1.0 / (1.0 - p.c * p.c * p.tau);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    Matrix3::new(
        g * p.c * (one + 2.0 * p.tau * lambda),
        g * (p.tau * lambda * lambda + lambda + one),
        one * g,
        one,
        zero,
        zero,
        zero,
        one * (p.b / p.c),
        -(lambda + p.d) / p.c,
    )
}

/// `c det(beta I - A(lambda))`: the characteristic polynomial in `beta`.
pub fn char_poly_by_det(p: &ModelParams, lambda: C64, beta: C64) -> C64 {
    let m = Matrix3::from_diagonal_element(beta) - system_matrix(p, lambda);
    det3(&m) * p.c
}

/// Eigenvector of `A(lambda)` for eigenvalue `beta`, normalized to unit `U`.
pub fn eigvec(p: &ModelParams, lambda: C64, beta: C64) -> Vector3<C64> {
    Vector3::new(beta, C64::new(1.0, 0.0), p.b / (p.c * beta + p.d + lambda))
}

/// Perturbation data obtained by direct propagation with `exp(A z1)`.
pub struct Propagated {
    pub betas: [C64; 3],
    pub at_z1_minus: Vector3<C64>,
    pub at_z1_plus: Vector3<C64>,
    /// Coordinate of the growing mode behind the wave, times `e^{-b3 z1}`.
    pub evans: C64,
}

/// Start from `U(0) e^{b3 z} Y3` ahead of the wave, apply the `U'` jumps
/// `-g U / u'` at `0` and `g U / u'` at `z1`, propagating with the matrix
/// exponential in between, and decompose behind the wave.
pub fn propagate(ctx: &EvansContext, lambda: C64) -> Propagated {
    let p = &ctx.params;
    let g = 1.0 / (1.0 - p.c * p.c * p.tau);
    let a = system_matrix(p, lambda);
    let eig = a.eigenvalues().expect("3x3 complex eigenvalues");
    let mut betas = [eig[0], eig[1], eig[2]];
    betas.sort_by(|x, y| x.re.total_cmp(&y.re));
    let u0 = C64::new(ctx.u0, 0.0);
    let mut v = eigvec(p, lambda, betas[2]) * u0;
    v[0] += -g * u0 / ctx.du0;
    let expm = (a * C64::new(ctx.z1, 0.0)).exp();
    let minus = expm * v;
    let mut plus = minus;
    plus[0] += g * minus[1] / ctx.du1;
    let basis = Matrix3::from_columns(&betas.map(|b| eigvec(p, lambda, b)));
    let coords = basis.lu().solve(&plus).expect("eigenbasis is invertible");
    Propagated {
        betas,
        at_z1_minus: minus,
        at_z1_plus: plus,
        evans: coords[2] * (-betas[2] * ctx.z1).exp(),
    }
}

/// Determinant form: the decaying solution after `z1` against the two modes
/// decaying behind the wave. Real for real `lambda` (conjugate pair split into
/// real and imaginary parts).
pub fn determinant_form(ctx: &EvansContext, lambda: f64) -> f64 {
    let l = C64::new(lambda, 0.0);
    let prop = propagate(ctx, l);
    let p = &ctx.params;
    let y1 = eigvec(p, l, prop.betas[0]);
    let y2 = eigvec(p, l, prop.betas[1]);
    let (c1, c2) = if prop.betas[0].im.abs() > 1e-12 {
        ((y1 + y2) * C64::new(0.5, 0.0), (y1 - y2) * C64::new(0.0, -0.5))
    } else {
        (y1, y2)
    };
    let m = Matrix3::from_columns(&[prop.at_z1_plus, c1, c2]);
    det3(&m).re
}

/// `h(0+)` in closed form from the characteristic roots.
pub fn h_limit_closed_form(alphas: [C64; 3], p: &ModelParams) -> f64 {
    let [a1, a2, a3] = alphas;
    let v = p.d * (a3 * a3 - a3 * (a1 + a2) + a1 * a2) / (a1 * a2 * (p.d + p.c * a3)) - 2.0;
    v.re
}
