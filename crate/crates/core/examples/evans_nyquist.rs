//! Nyquist trace of the slow wave: E along the half-ring contour.

use relaxwave::evans::{nyquist_export, EvansContext, HalfRingContour};

fn main() -> relaxwave::Result<()> {
    let ctx = EvansContext::for_speed(0.5, 0.65, 0.1, 0.1)?;
    let trace = nyquist_export(&ctx, &HalfRingContour::new(0.1, 20.0, 200, 200)?)?;
    println!(
        "{} samples ({} inserted), net argument {:.4} turns, min |E| = {:.3e}",
        trace.samples.len(),
        trace.inserted,
        trace.total_arg / std::f64::consts::TAU,
        trace.min_abs_e
    );
    for s in trace.samples.iter().step_by(trace.samples.len() / 16) {
        println!("lambda = {:>9.4} {:+9.4}i   E = {:>9.5} {:+9.5}i", s.lambda[0], s.lambda[1], s.e[0], s.e[1]);
    }
    // the real unstable eigenvalue shows up as a sign change on the axis
    let scan = ctx.real_axis_scan(3.0, 300)?;
    if let Some(w) = scan.windows(2).find(|w| w[0].1.signum() != w[1].1.signum()) {
        println!("real zero in [{:.4}, {:.4}]", w[0].0, w[1].0);
    }
    Ok(())
}
