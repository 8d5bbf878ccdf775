//! `L^r` decay of the free fractional propagator, fitted before the wrap-around time.

use fnls_lab::diagnostics::dispersive_decay_fit;
use fnls_lab::dynamics::wrap_horizon;
use fnls_lab::{ComplexField, Grid, PhysParams};

fn main() -> fnls_lab::Result<()> {
    let grid = Grid::new(1, 1024, 200.0)?;
    let u0 = ComplexField::gaussian(&grid, 1.0, 1.0);
    for s in [0.6, 0.75, 1.0] {
        let params = PhysParams::focusing(s, 3.0)?;
        let t_wrap = wrap_horizon(&grid, &params);
        let times: Vec<f64> = (0..12)
            .map(|i| 5.0 * (t_wrap / 5.0).powf(i as f64 / 12.0))
            .collect();
        for r in [4.0, f64::INFINITY] {
            let fit = dispersive_decay_fit(&u0, &params, r, &times)?;
            println!(
                "s = {s:<4} r = {r:<3}: exponent {:.4} (expected {:.4}), t_wrap {:.1}",
                fit.exponent,
                0.5 - 1.0 / r,
                fit.t_wrap
            );
        }
    }
    Ok(())
}
