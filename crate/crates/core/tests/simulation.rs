use relaxwave::numeric::linspace;
use relaxwave::pde::{init_from_profile, step, HeavisideMode, SimConfig, SimState, Simulation};
use relaxwave::poly::ModelParams;
use relaxwave::profile::WaveProfile;

const SMOOTH: HeavisideMode = HeavisideMode::Smoothed { width: 0.1 };

fn bump_state(nx: usize, dt: f64, params: &ModelParams) -> SimState {
    let x = linspace(-20.0, 20.0, nx);
    let u: Vec<f64> = x.iter().map(|x| 0.5 * (-x * x).exp()).collect();
    let zero = vec![0.0; nx];
    let mut st = SimState::from_fields(x, u, zero.clone(), zero, dt).unwrap();
    st.seed_second_order(params, 0.2, SMOOTH);
    st
}

fn run_to(st: &mut SimState, params: &ModelParams, t: f64, mode: HeavisideMode) {
    let n = (t / st.dt).round() as usize;
    for _ in 0..n {
        step(st, params, 0.2, mode);
    }
}

#[test]
fn second_order_convergence() {
    let p = ModelParams::new(0.5, 1.0, 0.1, 0.1).unwrap();
    let mut fields = Vec::new();
    for k in 0..3 {
        let nx = 1024 * (1 << k) + 1;
        let mut st = bump_state(nx, 1.0 / (128.0 * (1 << k) as f64), &p);
        run_to(&mut st, &p, 1.0, SMOOTH);
        fields.push(st.u);
    }
    let diff = |fine: &[f64], coarse: &[f64]| {
        coarse
            .iter()
            .enumerate()
            .map(|(i, c)| (fine[2 * i] - c).abs())
            .fold(0.0, f64::max)
    };
    let e1 = diff(&fields[1], &fields[0]);
    // compare the finer pair on the coarsest nodes too
    let mid: Vec<f64> = fields[1].iter().step_by(2).copied().collect();
    let fine: Vec<f64> = fields[2].iter().step_by(2).copied().collect();
    let e2 = diff(&fine, &mid);
    let ratio = e1 / e2;
    assert!((3.0..5.0).contains(&ratio), "ratio {ratio} ({e1:e} / {e2:e})");
}

#[test]
fn small_relaxation_matches_the_parabolic_stepper() {
    let hyper = ModelParams::new(0.5, 1.0, 0.1, 1e-6).unwrap();
    let para = ModelParams::new(0.5, 1.0, 0.1, 0.0).unwrap();
    let nx = 401;
    let dt = 4e-5;
    let x = linspace(-10.0, 10.0, nx);
    let u: Vec<f64> = x.iter().map(|x| 0.5 * (-x * x).exp()).collect();
    let zero = vec![0.0; nx];
    // start on the slow manifold: u_t = right-hand side
    let dx = x[1] - x[0];
    let mut ut = zero.clone();
    for i in 1..nx - 1 {
        ut[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) / (dx * dx) + SMOOTH.eval(u[i], 0.2) - u[i];
    }
    let mut a = SimState::from_fields(x.clone(), u.clone(), ut.clone(), zero.clone(), dt).unwrap();
    a.seed_second_order(&hyper, 0.2, SMOOTH);
    let mut b = SimState::from_fields(x, u, ut, zero, dt).unwrap();
    run_to(&mut a, &hyper, 1.0, SMOOTH);
    run_to(&mut b, &para, 1.0, SMOOTH);
    let scale = b.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let gap = a.u.iter().zip(&b.u).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(gap / scale < 1e-3, "relative gap {}", gap / scale);
}

#[test]
fn mirrored_wave_has_the_same_speed() {
    let w = WaveProfile::for_speed(0.5, 1.5, 0.1, 0.1).unwrap();
    let mut cfg = SimConfig::for_profile(&w, 4097);
    cfg.t_end = 5.0;
    cfg.half_length = SimConfig::required_half_length(&w, 5.0);
    let left = Simulation::new(&w, cfg.clone()).run().unwrap();
    let right = Simulation::new(&w, cfg).mirrored().run().unwrap();
    let (vl, vr) = (left.speed_est.unwrap(), right.speed_est.unwrap());
    assert!((vl - vr).abs() < 1e-9, "{vl} vs {vr}");
    assert!((vl - 1.5).abs() < 0.02 * 1.5);
}

#[test]
fn subthreshold_data_decays_to_rest() {
    let p = ModelParams::new(0.5, 1.0, 0.1, 0.1).unwrap();
    let x = linspace(-10.0, 10.0, 201);
    let n = x.len();
    let mut u = vec![0.05; n];
    u[0] = 0.0;
    u[n - 1] = 0.0;
    let zero = vec![0.0; n];
    let mut st = SimState::from_fields(x, u, zero.clone(), zero, 0.02).unwrap();
    let start = st.max_abs_u();
    run_to(&mut st, &p, 20.0, HeavisideMode::Sharp);
    assert!(st.max_abs_u() < 0.1 * start, "{}", st.max_abs_u());
}

#[test]
fn first_step_error_is_second_order_in_dx() {
    let w = WaveProfile::for_speed(0.5, 1.5, 0.1, 0.1).unwrap();
    let p = w.params;
    let a = w.threshold();
    let mut errs = Vec::new();
    for nx in [2049, 4097, 8193] {
        let cfg = SimConfig::for_profile(&w, nx);
        let mut st = init_from_profile(&w, &cfg).unwrap();
        let x0 = st.x0;
        let dx = st.dx();
        step(&mut st, &p, a, HeavisideMode::Sharp);
        let c = w.speed();
        let mut worst: f64 = 0.0;
        for (i, &x) in st.x.iter().enumerate() {
            let z = x - x0;
            // local truncation error is only smooth away from the switch points
            if z.abs() < 0.5 || (z - w.z1).abs() < 0.5 || z.abs() > 30.0 {
                continue;
            }
            let exact = w.u(z + c * st.dt);
            worst = worst.max((st.u[i] - exact).abs() / (st.dt * st.dt));
        }
        errs.push((dx, worst));
    }
    for pair in errs.windows(2) {
        let ratio = pair[0].1 / pair[1].1;
        assert!((3.0..5.0).contains(&ratio), "{errs:?}");
    }
}

#[test]
fn fast_wave_keeps_its_shape() {
    let w = WaveProfile::for_speed(0.5, 1.5, 0.1, 0.1).unwrap();
    let report = Simulation::new(&w, SimConfig::for_profile(&w, 8192)).run().unwrap();
    assert!(!report.unstable, "{:?}", report.reason);
    assert!(report.max_shape_err.unwrap() < 0.03);
    assert_eq!(report.series[0].shape_err.min(1e-6), report.series[0].shape_err);
    assert!((report.series[0].amplitude_ratio - 1.0).abs() < 1e-3);
}
