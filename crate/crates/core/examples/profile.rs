//! Build the exact wave at c = 0.65 and print a coarse table of (z, u, w).

use relaxwave::numeric::linspace;
use relaxwave::profile::WaveProfile;

fn main() -> relaxwave::Result<()> {
    let w = WaveProfile::for_speed(0.5, 0.65, 0.1, 0.1)?;
    let (z_peak, u_peak) = w.peak();
    println!("a = {:.6}  s = {:.6}  z1 = {:.6}  peak u = {u_peak:.6} at z = {z_peak:.4}", w.threshold(), w.s, w.z1);
    let (lo, hi) = w.support(8.0);
    for p in w.sample(&linspace(lo, hi, 25)) {
        println!("{:>9.4} {:>10.6} {:>10.6}", p.z, p.u, p.w);
    }
    Ok(())
}
