use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fnls_lab::diagnostics::{mass_concentration, morawetz_time_average};
use fnls_lab::dynamics::{
    evolve, linear_propagate, nonlinear_phase_step, strang_step, wave_operator_residual,
    EvolveConfig, Monitors, RunStatus, SplitStepper,
};
use fnls_lab::ground_state::{
    default_initial_guess, petviashvili_solve, GroundStateReport, PetviashviliOptions,
};
use fnls_lab::norms::sobolev_seminorm;
use fnls_lab::{ComplexField, Grid, PhysParams, Sign};

fn bump(d: usize, n: usize, l: f64, seed: u64) -> ComplexField {
    let grid = Grid::new(d, n, l).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexField::random_bump(&grid, 1.0, 0.25 * l, 0.2 * grid.k_nyquist(), &mut rng)
}

fn soliton_1d() -> &'static GroundStateReport {
    static GS: OnceLock<GroundStateReport> = OnceLock::new();
    GS.get_or_init(|| {
        let grid = Grid::new(1, 1024, 10.0 * PI).unwrap();
        let params = PhysParams::focusing(0.75, 3.0).unwrap();
        petviashvili_solve(
            &params,
            &default_initial_guess(&grid),
            &PetviashviliOptions::default(),
        )
        .unwrap()
    })
}

/// `d = 1, s = 0.75, p = 7`: intercritical, so `c·Q` data sit on either side of the threshold.
fn septic_1d() -> &'static GroundStateReport {
    static GS: OnceLock<GroundStateReport> = OnceLock::new();
    GS.get_or_init(|| {
        let grid = Grid::new(1, 2048, 100.0).unwrap();
        let params = PhysParams::focusing(0.75, 7.0).unwrap();
        petviashvili_solve(
            &params,
            &default_initial_guess(&grid),
            &PetviashviliOptions::default(),
        )
        .unwrap()
    })
}

fn params_strategy() -> impl Strategy<Value = PhysParams> {
    (0.3f64..1.0, 1.5f64..5.0, any::<bool>()).prop_map(|(s, p, foc)| {
        PhysParams::new(
            s,
            p,
            if foc {
                Sign::Focusing
            } else {
                Sign::Defocusing
            },
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn time_reversal(seed in any::<u64>(), d in 1usize..=2, params in params_strategy()) {
        let u0 = bump(d, if d == 1 { 128 } else { 32 }, 10.0, seed);
        let dt = 1e-3;
        let fwd = SplitStepper::new(u0.grid(), &params, dt).advance(&u0, 200).unwrap();
        let back = SplitStepper::new(u0.grid(), &params, -dt).advance(&fwd, 200).unwrap();
        prop_assert!(back.rel_l2_diff(&u0) < 1e-8);
    }

    #[test]
    fn each_step_is_unitary(seed in any::<u64>(), params in params_strategy(), dt in 1e-4f64..1e-1) {
        let u0 = bump(2, 32, 8.0, seed);
        let u1 = strang_step(&u0, dt, &params).unwrap();
        prop_assert!(((u1.norm_sq() - u0.norm_sq()) / u0.norm_sq()).abs() < 1e-13);
    }

    #[test]
    fn linear_group_property(seed in any::<u64>(), t1 in -5.0f64..5.0, t2 in -5.0f64..5.0, params in params_strategy()) {
        let u = bump(1, 256, 20.0, seed);
        let a = linear_propagate(&linear_propagate(&u, t1, &params), t2, &params);
        let b = linear_propagate(&u, t1 + t2, &params);
        prop_assert!(a.rel_l2_diff(&b) < 1e-12);
    }

    #[test]
    fn nonlinear_phase_keeps_modulus_and_inverts(seed in any::<u64>(), dt in -1.0f64..1.0, params in params_strategy()) {
        let u = bump(2, 16, 4.0, seed);
        let v = nonlinear_phase_step(&u, dt, &params);
        for (a, b) in u.values().iter().zip(v.values()) {
            prop_assert!((a.norm() - b.norm()).abs() <= 1e-15 * a.norm().max(1e-300) + 1e-300);
        }
        let back = nonlinear_phase_step(&v, -dt, &params);
        prop_assert!(back.max_rel_diff(&u) < 1e-14);
    }

    #[test]
    fn free_flow_has_no_scattering_residual(seed in any::<u64>(), t1 in 0.0f64..3.0, gap in 0.1f64..3.0) {
        let params = PhysParams::focusing(0.8, 3.0).unwrap();
        let u0 = bump(1, 256, 20.0, seed);
        let a = linear_propagate(&u0, t1, &params);
        let b = linear_propagate(&u0, t1 + gap, &params);
        prop_assert!(wave_operator_residual(&a, &b, t1, t1 + gap, &params).unwrap() < 1e-12 * u0.norm_sq().sqrt().max(1.0));
    }
}

#[test]
fn mass_over_ten_thousand_steps() {
    let grid = Grid::new(1, 256, 10.0).unwrap();
    let params = PhysParams::focusing(0.75, 3.0).unwrap();
    let u0 = ComplexField::gaussian(&grid, 1.0, 1.0);
    let u = SplitStepper::new(&grid, &params, 1e-3)
        .advance(&u0, 10_000)
        .unwrap();
    let drift = ((u.norm_sq() - u0.norm_sq()) / u0.norm_sq()).abs();
    // transform round-off floor, see README
    assert!(drift < 3e-12, "{drift:e}");
}

#[test]
fn scaling_symmetry() {
    let params = PhysParams::focusing(0.75, 3.0).unwrap();
    let lam: f64 = 2.0;
    let (steps, dt) = (400, 2.5e-3);
    let grid = Grid::new(1, 512, 20.0).unwrap();
    let scaled_grid = Grid::new(1, 512, 20.0 / lam).unwrap();
    let amp = lam.powf(params.scaling_exponent());
    let profile = |x: f64| (-(x - 1.0).powi(2)).exp() * (1.0 + 0.3 * x.sin());
    let u0 = ComplexField::from_real_fn(&grid, |x| profile(x[0]));
    let v0 = ComplexField::from_real_fn(&scaled_grid, |x| amp * profile(lam * x[0]));
    let u = SplitStepper::new(&grid, &params, dt)
        .advance(&u0, steps)
        .unwrap();
    let v = SplitStepper::new(&scaled_grid, &params, dt * lam.powf(-2.0 * params.s))
        .advance(&v0, steps)
        .unwrap();
    let u_scaled = u.map(|z| z * amp);
    let diff: f64 = u_scaled
        .values()
        .iter()
        .zip(v.values())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>();
    let norm: f64 = v.values().iter().map(|b| b.norm_sqr()).sum();
    assert!((diff / norm).sqrt() < 1e-4);
}

#[test]
fn soliton_is_stationary() {
    let gs = soliton_1d();
    let params = gs.params;
    let radius = 10.0;
    let cfg = EvolveConfig {
        dt: 1e-3,
        t_end: 5.0,
        callback_stride: 100,
        ..Default::default()
    };
    let monitors = Monitors {
        concentration_radii: vec![radius],
        potential_radii: vec![radius],
        ..Default::default()
    };
    let mut states = Vec::new();
    let evo = fnls_lab::dynamics::evolve_with(&gs.q, &cfg, &params, &monitors, |t, u| {
        if [0.5, 1.0, 2.0, 4.0].iter().any(|&s| (t - s).abs() < 1e-9) {
            states.push((t, u.clone()));
        }
    })
    .unwrap();
    assert_eq!(evo.status, RunStatus::Completed);
    let hs0 = evo.series.hs_norm[0];
    let hs_dev = evo
        .series
        .hs_norm
        .iter()
        .map(|h| ((h - hs0) / hs0).abs())
        .fold(0.0, f64::max);
    assert!(hs_dev < 1e-3, "{hs_dev:e}");
    let conc = &evo.series.concentration[0];
    assert!((conc[0] - gs.mass).abs() / gs.mass < 1e-2);
    assert!(conc.iter().all(|c| (c - conc[0]).abs() / conc[0] < 1e-2));
    // non-scattering contrast: averages stay away from zero
    for t2 in [1.0, 2.5, 5.0] {
        assert!(morawetz_time_average(&evo.series, radius, 0.0, t2).unwrap() > 1.0);
    }
    // profile only rotates: the interaction-picture increments do not die out
    let q_hs = sobolev_seminorm(&gs.q, params.s).unwrap();
    for w in states.windows(2) {
        let inc = wave_operator_residual(&w[0].1, &w[1].1, w[0].0, w[1].0, &params).unwrap();
        assert!(inc > 0.1 * q_hs, "{inc}");
    }
    let rotated = gs.q.map(|z| z * Complex64::from_polar(1.0, 5.0));
    assert!(evo.final_state.rel_l2_diff(&rotated) < 1e-2);
}

#[test]
fn small_data_increments_decrease() {
    let gs = septic_1d();
    let u0 = gs.q.scaled(0.1);
    let times = vec![1.0, 2.0, 4.0, 8.0, 16.0];
    let cfg = EvolveConfig {
        dt: 1e-3,
        t_end: 16.0,
        callback_stride: 1000,
        ..Default::default()
    };
    let monitors = Monitors {
        snapshot_times: times,
        ..Default::default()
    };
    let evo = evolve(&u0, &cfg, &gs.params, &monitors).unwrap();
    assert!(evo.t_final < evo.t_wrap);
    let inc: Vec<f64> = evo
        .snapshots
        .windows(2)
        .map(|w| wave_operator_residual(&w[0].1, &w[1].1, w[0].0, w[1].0, &gs.params).unwrap())
        .collect();
    assert_eq!(inc.len(), 4);
    assert!(inc.windows(2).all(|w| w[1] < w[0]), "{inc:?}");
}

#[test]
fn above_threshold_data_trip_the_sentinel() {
    let gs = septic_1d();
    let cfg = EvolveConfig {
        dt: 1e-3,
        t_end: 5.0,
        callback_stride: 50,
        ..Default::default()
    };
    let evo = evolve(&gs.q.scaled(1.2), &cfg, &gs.params, &Monitors::default()).unwrap();
    assert!(evo.status.is_blowup());
    assert!(evo.t_final < cfg.t_end);
}

#[test]
fn defocusing_bump_disperses_with_small_energy_drift() {
    let grid = Grid::new(1, 1024, 100.0).unwrap();
    let params = PhysParams::defocusing(0.75, 3.0).unwrap();
    let u0 = ComplexField::gaussian(&grid, 1.0, 2.0);
    let cfg = EvolveConfig {
        dt: 1e-3,
        t_end: 20.0,
        callback_stride: 500,
        ..Default::default()
    };
    let monitors = Monitors {
        concentration_radii: vec![5.0],
        ..Default::default()
    };
    let evo = evolve(&u0, &cfg, &params, &monitors).unwrap();
    assert_eq!(evo.status, RunStatus::Completed);
    let e = &evo.series.energy;
    let drift = e
        .iter()
        .map(|x| ((x - e[0]) / e[0]).abs())
        .fold(0.0, f64::max);
    assert!(drift <= 1e-6, "{drift:e}");
    let c = &evo.series.concentration[0];
    assert!(*c.last().unwrap() <= 0.5 * c[0]);
    assert!((mass_concentration(&evo.final_state, 5.0) - c.last().unwrap()).abs() < 1e-12);
}

#[test]
fn series_columns_follow_contract() {
    let grid = Grid::new(1, 128, 10.0).unwrap();
    let params = PhysParams::focusing(0.75, 3.0).unwrap();
    let cfg = EvolveConfig {
        dt: 1e-3,
        t_end: 0.05,
        callback_stride: 10,
        ..Default::default()
    };
    let monitors = Monitors {
        concentration_radii: vec![1.0, 2.0],
        ..Default::default()
    };
    let evo = evolve(
        &ComplexField::gaussian(&grid, 1.0, 1.0),
        &cfg,
        &params,
        &monitors,
    )
    .unwrap();
    let s = &evo.series;
    assert_eq!(s.len(), 6);
    assert!(s.t.windows(2).all(|w| w[1] > w[0]));
    let names: Vec<String> = s
        .columns()
        .into_iter()
        .map(|(n, v)| {
            assert_eq!(v.len(), s.len());
            n
        })
        .collect();
    assert_eq!(
        names,
        [
            "t",
            "mass",
            "energy",
            "hs_norm",
            "conc_R1",
            "conc_R2",
            "m_phi",
            "virial_rhs",
            "y",
            "scatter_residual"
        ]
    );
    let csv = s.to_csv();
    assert_eq!(csv.lines().next().unwrap(), names.join(","));
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn zero_field_stays_zero() {
    let grid = Grid::new(2, 16, 3.0).unwrap();
    let params = PhysParams::focusing(0.5, 3.0).unwrap();
    let z = ComplexField::zeros(&grid);
    let out = strang_step(&z, 0.1, &params).unwrap();
    assert!(out.values().iter().all(|v| *v == Complex64::new(0.0, 0.0)));
}
