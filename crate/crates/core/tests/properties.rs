use num_complex::Complex64 as C64;
use proptest::prelude::*;
use relaxwave::evans::EvansContext;
use relaxwave::poly::ModelParams;
use relaxwave::profile::WaveProfile;

fn params() -> impl Strategy<Value = ModelParams> {
    (0.05..1.0f64, 0.01..0.5f64, 0.0..0.3f64, 0.05..0.95f64).prop_map(|(b, d, tau, frac)| {
        let c_hi = if tau > 0.0 { (0.95 / tau.sqrt()).min(3.0) } else { 3.0 };
        ModelParams::new(b, frac * c_hi, d, tau).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn profile_crosses_the_threshold_at_both_switch_points(p in params()) {
        let Ok(w) = WaveProfile::build(&p) else { return Ok(()) };
        let a = w.threshold();
        prop_assert!(w.z1 > 0.0);
        prop_assert!((w.u(0.0) - a).abs() < 1e-8 * a.max(1.0));
        prop_assert!((w.u(w.z1) - a).abs() < 1e-8 * a.max(1.0));
        let (_, peak) = w.peak();
        prop_assert!(peak >= a);
        for z in [-3.0, 0.5 * w.z1, w.z1 + 3.0] {
            let r = w.ode_residual(z);
            prop_assert!(r[0].abs() + r[1].abs() < 1e-8, "residual {r:?} at {z}");
        }
    }

    #[test]
    fn evans_function_commutes_with_conjugation(p in params(), re in 0.01..5.0f64, im in 0.1..5.0f64) {
        let Ok(ctx) = EvansContext::for_speed(p.b, p.c, p.d, p.tau) else { return Ok(()) };
        let (Ok(up), Ok(down)) = (ctx.evans(C64::new(re, im)), ctx.evans(C64::new(re, -im))) else {
            return Ok(());
        };
        prop_assert!((up - down.conj()).norm() <= 1e-10 * up.norm().max(1.0));
    }
}
