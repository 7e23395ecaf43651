//! Trace a(c), locate the fold and invert it for a = 0.2.

use relaxwave::speed::{default_c_grid, solve_c_for_a, trace_curve};

fn main() -> relaxwave::Result<()> {
    let (b, d, tau) = (0.5, 0.1, 0.1);
    let curve = trace_curve(b, d, tau, &default_c_grid(tau))?;
    let fold = curve.refined_fold()?;
    println!("{} points, {} gaps", curve.points.len(), curve.gaps.len());
    println!("fold: a* = {:.6} at c* = {:.6}", fold.a_star, fold.c_star);
    for p in curve.points.iter().step_by(curve.points.len() / 12 + 1) {
        println!("c = {:.4}  a = {:.6}  z1 = {:.4}", p.c, p.a, p.z1);
    }
    println!("a = 0.2: {:?}", solve_c_for_a(0.2, b, d, tau)?);
    Ok(())
}
