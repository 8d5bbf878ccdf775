use std::f64::consts::PI;
use std::sync::OnceLock;

use proptest::prelude::*;

use fnls_lab::diagnostics::coercivity_functional;
use fnls_lab::ground_state::{
    build_report, default_initial_guess, gn_quotient, petviashvili_solve, pohozaev_soliton_check,
    GroundStateReport, PetviashviliOptions,
};
use fnls_lab::threshold::{classify_initial_data, Classification};
use fnls_lab::{ComplexField, Grid, PhysParams};

/// `Q'' + (2/r) Q' - Q + Q³ = 0`, `Q'(0) = 0`: RK4 from the regular series,
/// returns `(Q(0), 4π ∫ Q² r² dr)`.
fn shooting_oracle() -> (f64, f64) {
    let h = 1e-3;
    let rhs = |r: f64, q: f64, dq: f64| (dq, -2.0 * dq / r + q - q * q * q);
    // +1 overshoot (Q crosses zero), -1 undershoot (Q turns back up)
    let run = |a: f64, r_max: f64, mass: &mut f64| -> i32 {
        let r0 = 1e-4;
        let mut r = r0;
        let mut q = a + (a - a * a * a) * r0 * r0 / 6.0;
        let mut dq = (a - a * a * a) * r0 / 3.0;
        *mass = 0.0;
        while r < r_max {
            let (k1q, k1d) = rhs(r, q, dq);
            let (k2q, k2d) = rhs(r + h / 2.0, q + h / 2.0 * k1q, dq + h / 2.0 * k1d);
            let (k3q, k3d) = rhs(r + h / 2.0, q + h / 2.0 * k2q, dq + h / 2.0 * k2d);
            let (k4q, k4d) = rhs(r + h, q + h * k3q, dq + h * k3d);
            let q_new = q + h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
            let dq_new = dq + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
            *mass += 0.5 * h * (q * q * r * r + q_new * q_new * (r + h) * (r + h));
            q = q_new;
            dq = dq_new;
            r += h;
            if q < 0.0 {
                return 1;
            }
            if dq > 0.0 {
                return -1;
            }
        }
        0
    };
    let (mut lo, mut hi) = (4.0, 4.6);
    let mut scratch = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if run(mid, 20.0, &mut scratch) > 0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    let mut mass = 0.0;
    run(a, 9.0, &mut mass);
    (a, 4.0 * PI * mass)
}

fn opts() -> PetviashviliOptions {
    PetviashviliOptions::default()
}

/// `d = 1, s = 0.75, p = 7` has `s_c = 1/4`, inside `(0, s)`.
fn intercritical_1d() -> &'static GroundStateReport {
    static GS: OnceLock<GroundStateReport> = OnceLock::new();
    GS.get_or_init(|| {
        let grid = Grid::new(1, 2048, 100.0).unwrap();
        let params = PhysParams::focusing(0.75, 7.0).unwrap();
        petviashvili_solve(&params, &default_initial_guess(&grid), &opts()).unwrap()
    })
}

#[test]
fn cubic_3d_mass_matches_shooting() {
    let (q0, oracle) = shooting_oracle();
    assert!((q0 - 4.3373877).abs() < 1e-6, "Q(0) = {q0}");
    let grid = Grid::new(3, 64, 6.0).unwrap();
    let params = PhysParams::focusing(1.0, 3.0).unwrap();
    let gs = petviashvili_solve(&params, &default_initial_guess(&grid), &opts()).unwrap();
    assert!(gs.residual <= opts().tol);
    let rel = (gs.mass - oracle).abs() / oracle;
    assert!(
        rel <= 1e-3,
        "mass {} vs shooting {oracle}: {rel:e}",
        gs.mass
    );
    let peak = gs.q.values().iter().map(|v| v.re).fold(f64::MIN, f64::max);
    assert!((peak - q0).abs() / q0 < 1e-3, "peak {peak}");
}

#[test]
fn report_invariants_and_json_keys() {
    let gs = intercritical_1d();
    let p = gs.params.p;
    let lhs = gs.hs * gs.hs + gs.mass;
    let rhs = gs.lp1.powf(p + 1.0);
    assert!(((lhs - rhs) / rhs).abs() < 1e-4);
    let grid = gs.q.grid();
    let radii = grid.radii();
    for (v, r) in gs.q.values().iter().zip(&radii) {
        if *r < 0.5 * grid.half_len() {
            assert!(v.re > 0.0);
        }
        assert!(v.re > -1e-10 && v.im.abs() < 1e-12);
    }
    let json = serde_json::to_value(gs.summary()).unwrap();
    let keys: Vec<&str> = json
        .as_object()
        .unwrap()
        .keys()
        .map(|k| k.as_str())
        .collect();
    for k in [
        "d",
        "n",
        "l",
        "s",
        "p",
        "mass",
        "hs",
        "lp1",
        "energy",
        "gn_const",
        "residual",
        "iterations",
        "tail_mass",
    ] {
        assert!(keys.contains(&k), "missing {k}");
    }
    assert_eq!(keys.len(), 13);
}

#[test]
fn soliton_identity_grows_with_perturbation() {
    let gs = intercritical_1d();
    let params = gs.params;
    let base = pohozaev_soliton_check(gs, &params).unwrap();
    assert!(base < 1e-3, "{base}");
    let bump = ComplexField::gaussian(gs.q.grid(), 1.0, 3.0);
    let mut last = base;
    for eps in [1e-3, 1e-2, 3e-2, 1e-1] {
        let q = gs.q.add_scaled(&bump, eps.into()).unwrap();
        let perturbed = build_report(q, &params, f64::NAN, 0);
        let gap = pohozaev_soliton_check(&perturbed, &params).unwrap();
        assert!(gap > last, "eps {eps}: {gap} <= {last}");
        last = gap;
    }
}

#[test]
fn soliton_identity_needs_intercritical_regime() {
    let grid = Grid::new(1, 512, 10.0 * PI).unwrap();
    let params = PhysParams::focusing(0.75, 3.0).unwrap();
    let gs = petviashvili_solve(&params, &default_initial_guess(&grid), &opts()).unwrap();
    assert!(params.critical_index(1) < 0.0);
    assert!(pohozaev_soliton_check(&gs, &params).is_err());
    assert!(coercivity_functional(&gs.q, &gs, &params).is_err());
}

#[test]
fn threshold_boundary_and_scaled_states() {
    let gs = intercritical_1d();
    let params = gs.params;
    let at_q = classify_initial_data(&gs.q, gs, &params).unwrap();
    assert!((at_q.energy_ratio - 1.0).abs() < 1e-12 && (at_q.kinetic_ratio - 1.0).abs() < 1e-12);
    assert_eq!(at_q.classification, Classification::AboveThreshold);
    let below = classify_initial_data(&gs.q.scaled(0.8), gs, &params).unwrap();
    assert_eq!(below.classification, Classification::ScatterCandidate);
    assert!(below.energy_ratio < 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn gn_inequality_on_random_radial_fields(
        amps in prop::collection::vec(-1.0f64..2.0, 3),
        widths in prop::collection::vec(0.3f64..6.0, 3),
    ) {
        let gs = intercritical_1d();
        let v = ComplexField::radial(gs.q.grid(), |r| {
            amps.iter().zip(&widths).map(|(a, w)| a * (-(r / w).powi(2)).exp()).sum()
        });
        prop_assume!(v.norm_sq() > 1e-6);
        let quotient = gn_quotient(&v, &gs.params).unwrap();
        prop_assert!(quotient <= gs.gn_const * (1.0 + 1e-9), "{} > {}", quotient, gs.gn_const);
    }

    #[test]
    fn gn_quotient_is_amplitude_invariant(c in 0.05f64..20.0) {
        let gs = intercritical_1d();
        let q = gn_quotient(&gs.q.scaled(c), &gs.params).unwrap();
        prop_assert!(((q - gs.gn_const) / gs.gn_const).abs() < 1e-12);
    }

    #[test]
    fn kinetic_ratio_is_power_of_scale(c in 0.01f64..5.0) {
        let gs = intercritical_1d();
        let report = classify_initial_data(&gs.q.scaled(c), gs, &gs.params).unwrap();
        prop_assert!((report.kinetic_ratio - c.powf(gs.params.s)).abs() < 1e-12 * c.powf(gs.params.s).max(1.0));
    }

    #[test]
    fn coercivity_is_homogeneous(c in 0.05f64..3.0) {
        let gs = intercritical_1d();
        let params = gs.params;
        let y = coercivity_functional(&gs.q.scaled(c), gs, &params).unwrap();
        let expected = c.powf(params.s / params.critical_index(1));
        prop_assert!(((y - expected) / expected).abs() < 1e-12);
    }
}

#[test]
fn tail_mass_is_small() {
    let gs = intercritical_1d();
    assert!(gs.tail_mass < 1e-2 * gs.mass, "{}", gs.tail_mass);
}
