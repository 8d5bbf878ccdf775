//! Strang splitting: conservation, second-order convergence and plane-wave exactness.

use num_complex::Complex64;

use fnls_lab::dynamics::{evolve, EvolveConfig, Monitors, SplitStepper};
use fnls_lab::{ComplexField, Grid, PhysParams};

fn drifts(
    u0: &ComplexField,
    params: &PhysParams,
    dt: f64,
    steps: usize,
) -> fnls_lab::Result<(f64, f64)> {
    let cfg = EvolveConfig {
        dt,
        t_end: dt * steps as f64,
        callback_stride: steps / 100,
        ..Default::default()
    };
    let s = evolve(u0, &cfg, params, &Monitors::default())?.series;
    let rel = |xs: &[f64]| {
        xs.iter()
            .map(|x| ((x - xs[0]) / xs[0]).abs())
            .fold(0.0, f64::max)
    };
    Ok((rel(&s.mass), rel(&s.energy)))
}

fn main() -> fnls_lab::Result<()> {
    let grid = Grid::new(1, 256, 10.0)?;
    let params = PhysParams::focusing(0.75, 3.0)?;
    let u0 = ComplexField::gaussian(&grid, 1.0, 1.0);
    let (m1, e1) = drifts(&u0, &params, 1e-3, 10_000)?;
    let (m2, e2) = drifts(&u0, &params, 5e-4, 20_000)?;
    println!("dt = 1e-3: mass drift {m1:.2e}, energy drift {e1:.2e}");
    println!(
        "dt = 5e-4: mass drift {m2:.2e}, energy drift {e2:.2e}  (ratio {:.2})",
        e1 / e2
    );

    // plane wave A e^{i(kx + (A^{p-1} - |k|^{2s}) t)}
    let (amp, mode) = (0.7, 3isize);
    let k = mode as f64 * grid.dk();
    let wave = ComplexField::plane_wave(&grid, amp, &[mode])?;
    let t = 1.0f64;
    for dt in [0.1, 0.05, 0.025] {
        let steps = (t / dt).round() as usize;
        let u = SplitStepper::new(&grid, &params, dt).advance(&wave, steps)?;
        let omega = amp * amp - k.abs().powf(2.0 * params.s);
        let exact = wave.map(|v| v * Complex64::from_polar(1.0, omega * t));
        println!(
            "plane wave dt = {dt:<5} max error {:.2e}",
            u.max_rel_diff(&exact)
        );
    }
    Ok(())
}
