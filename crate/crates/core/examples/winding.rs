//! Count unstable eigenvalues of the fast and slow waves at b = 0.5, d = 0.1, tau = 0.1.

use std::time::Instant;

use relaxwave::evans::{winding_number, EvansContext, HalfRingContour};

fn main() -> relaxwave::Result<()> {
    for (c, r, big_r) in [(1.5, 0.1, 20.0), (1.5, 0.2, 1000.0), (0.65, 0.1, 20.0)] {
        let ctx = EvansContext::for_speed(0.5, c, 0.1, 0.1)?;
        let contour = HalfRingContour::with_radii(r, big_r)?;
        let start = Instant::now();
        let w = winding_number(&ctx, &contour)?;
        println!(
            "c = {c:<5} a = {:.6}  r = {r:<4} R = {big_r:<6} N = {}  min|E| = {:.3e}  samples = {}  ({:.2?})",
            ctx.profile.threshold(),
            w.n_zeros,
            w.min_abs_e,
            w.samples,
            start.elapsed()
        );
    }
    Ok(())
}
