//! Morawetz weight convexity and windowed local-potential averages.

use fnls_lab::diagnostics::{build_morawetz_weight, morawetz_time_average};
use fnls_lab::dynamics::{evolve, EvolveConfig, Monitors};
use fnls_lab::{ComplexField, Grid, PhysParams};

fn main() -> fnls_lab::Result<()> {
    let grid = Grid::new(2, 128, 16.0)?;
    let params = PhysParams::defocusing(0.75, 3.0)?;
    for radius in [2.0, 4.0, 6.0] {
        let w = build_morawetz_weight(&grid, radius, 0.3)?;
        println!(
            "R = {radius}: min Hessian eigenvalue {:+.3e}, |∇φ|_W2∞ {:.3}",
            w.min_hessian_eigenvalue(),
            w.w2inf_norm()
        );
    }

    let radius = 4.0;
    let cfg = EvolveConfig {
        dt: 2e-3,
        t_end: 4.0,
        callback_stride: 10,
        ..Default::default()
    };
    let monitors = Monitors {
        potential_radii: vec![radius],
        ..Default::default()
    };
    let evo = evolve(
        &ComplexField::gaussian(&grid, 1.0, 1.5),
        &cfg,
        &params,
        &monitors,
    )?;
    let end = evo.t_final.min(evo.t_wrap);
    for k in (0..4).rev() {
        let t = end / 2f64.powi(k);
        println!(
            "T = {t:.3}: (1/T)∫∫_(|x|<=R/2) |u|^(p+1) = {:.5e}",
            morawetz_time_average(&evo.series, radius, 0.0, t)?
        );
    }
    Ok(())
}
