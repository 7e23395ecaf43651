//! Launch the fast and slow waves in the full PDE and watch whether they keep their shape.

use std::time::Instant;

use relaxwave::pde::{SimConfig, Simulation};
use relaxwave::profile::WaveProfile;

fn main() -> relaxwave::Result<()> {
    for (c, eps) in [(1.5, 0.0), (0.65, 0.01), (0.65, -0.01)] {
        let wave = WaveProfile::for_speed(0.5, c, 0.1, 0.1)?;
        let mut config = SimConfig::for_profile(&wave, 8192);
        config.perturb_eps = eps;
        let start = Instant::now();
        let report = Simulation::new(&wave, config).run()?;
        println!(
            "c = {c:<5} eps = {eps:+.2}  L = {}  steps = {}  speed = {:?}  max shape err = {:.4?}  {}  ({:.2?})",
            report.config.half_length,
            report.steps,
            report.speed_est,
            report.max_shape_err,
            report.reason.as_deref().unwrap_or("stable"),
            start.elapsed()
        );
    }
    Ok(())
}
