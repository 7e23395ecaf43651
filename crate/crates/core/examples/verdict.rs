//! Stability verdicts over the default contour ladder for both branches.

use relaxwave::evans::{stability_verdict, ContourLadder, EvansContext};

fn main() -> relaxwave::Result<()> {
    for c in [0.65, 1.5] {
        let ctx = EvansContext::for_speed(0.5, c, 0.1, 0.1)?;
        let report = stability_verdict(&ctx, &ContourLadder::default())?;
        let counts: Vec<i64> = report.windings.iter().map(|w| w.n_zeros).collect();
        println!("c = {c}: {:?}  windings {counts:?}", report.verdict);
    }
    Ok(())
}
