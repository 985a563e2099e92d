mod common;

use chainstab::lyapunov::{convergence_time_bound, estimate_constants, v1};
use chainstab::scalar::inf_norm;
use chainstab::simulation::{compute_metrics, make_disturbance, simulate};
use chainstab::{
    AdaptiveConfig, Controller, Disturbance, DisturbanceSpec, FeedbackLaw, GainVector, HongParams, SimConfig,
    UncertaintyBounds,
};
use rand::Rng;

#[test]
fn hong_small_k_decreases_and_meets_bound() {
    let hp = HongParams::new(2, -0.05, GainVector::repeated_root(2, -1.0).unwrap()).unwrap();
    let z0 = [1.0, 1.0];
    let cert = estimate_constants(&hp, 100_000, 3).unwrap();
    let bound = convergence_time_bound(v1(&z0, &hp).unwrap(), cert.c, cert.alpha).unwrap();
    let traj = simulate(
        &z0,
        &Controller::Pure { law: FeedbackLaw::Hong },
        &hp,
        &Disturbance::nominal(),
        &SimConfig::new(1e-4, 1.5 * bound),
    )
    .unwrap();
    let v = traj.v1();
    for n in 0..v.len() - 1 {
        assert!(v[n + 1] <= v[n] + 1e-9 * (1.0 + v[n]), "V1 rose at t = {}", traj.times()[n]);
    }
    assert!(inf_norm(traj.last_state().unwrap()) <= 1e-2, "bound {bound}");
}

fn robust_constant_band(dt: f64) -> f64 {
    let b = UncertaintyBounds::new(0.5, 0.5, 1.5).unwrap();
    let hp = HongParams::new(2, -0.25, GainVector::preset(2).unwrap()).unwrap();
    let d = make_disturbance(DisturbanceSpec::Constant { value: 0.5 }, DisturbanceSpec::Constant { value: 1.0 }, &b)
        .unwrap();
    let traj = simulate(
        &[1.0, 1.0],
        &Controller::Robust { law: FeedbackLaw::Hong, bounds: b },
        &hp,
        &d,
        &SimConfig::new(dt, 20.0),
    )
    .unwrap();
    compute_metrics(&traj, 0.0, 0.2, 1e-2).unwrap().tail_sup_norm
}

#[test]
fn robust_band_scales_with_step() {
    let coarse = robust_constant_band(1e-4);
    let fine = robust_constant_band(5e-5);
    assert!(coarse / fine >= 1.5, "band {coarse:e} -> {fine:e}");
}

#[test]
fn adaptive_stays_bounded_over_long_horizon() {
    let hp = HongParams::new(3, -0.5 / 3.0, GainVector::preset(3).unwrap()).unwrap();
    let truth = UncertaintyBounds::new(0.5, 0.8, 1.2).unwrap();
    let d = make_disturbance(
        DisturbanceSpec::Sinusoid { offset: 0.0, amplitude: 0.5, omega: 3.0, phase: 0.0 },
        DisturbanceSpec::PiecewiseRandom { low: 0.8, high: 1.2, dwell: 0.25, seed: 5 },
        &truth,
    )
    .unwrap();
    let cfg = AdaptiveConfig::new(1.0, 1.0, 0.5, 2.0, 0.1).unwrap();
    let traj = simulate(&[1.0; 3], &Controller::Adaptive { config: cfg }, &hp, &d, &SimConfig::new(1e-3, 100.0)).unwrap();
    let peak = traj.states().map(inf_norm).fold(0.0, f64::max);
    assert!(peak < 10.0, "peak {peak}");
    assert!(traj.phi_hat().iter().all(|&p| p >= 0.0));
    assert!(traj.gamma_hat().iter().all(|&g| g >= cfg.kappa));
}

#[test]
fn generators_stay_in_bounds() {
    let b = UncertaintyBounds::new(0.5, 0.5, 1.5).unwrap();
    let kinds = [
        (DisturbanceSpec::Constant { value: -0.5 }, DisturbanceSpec::Constant { value: 0.5 }),
        (
            DisturbanceSpec::Sinusoid { offset: 0.1, amplitude: 0.4, omega: 13.0, phase: 1.0 },
            DisturbanceSpec::Sinusoid { offset: 1.0, amplitude: 0.5, omega: 0.7, phase: 0.0 },
        ),
        (
            DisturbanceSpec::PiecewiseRandom { low: -0.5, high: 0.5, dwell: 0.01, seed: 1 },
            DisturbanceSpec::PiecewiseRandom { low: 0.5, high: 1.5, dwell: 0.01, seed: 2 },
        ),
    ];
    let mut rng = common::rng(9);
    for (phi, gamma) in kinds {
        let d = make_disturbance(phi, gamma, &b).unwrap();
        for _ in 0..1_000_000 {
            let t: f64 = rng.random_range(0.0..1e4);
            let (p, g) = (d.phi.value(t), d.gamma.value(t));
            assert!(p.abs() <= 0.5 && (0.5..=1.5).contains(&g), "t = {t}: ({p}, {g})");
        }
    }
}

#[test]
fn f32_closed_loop_converges() {
    let hp = HongParams::<f32>::new(2, -0.25, GainVector::preset(2).unwrap()).unwrap();
    let traj = simulate(
        &[1.0f32, 1.0],
        &Controller::Pure { law: FeedbackLaw::Hong },
        &hp,
        &Disturbance::nominal(),
        &SimConfig::new(1e-3f32, 15.0),
    )
    .unwrap();
    assert!(inf_norm(traj.last_state().unwrap()) <= 1e-2);
}
