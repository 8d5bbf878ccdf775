//! λ-quadrature for the resolvent representation of `(-Δ)^s` and the identities it feeds.

use std::f64::consts::PI;

use fnls_lab::diagnostics::{
    balakrishnan_apply_check, beta_test_integral, plancherel_identity_check, LambdaQuadrature,
};
use fnls_lab::{ComplexField, Grid, PhysParams};

fn main() -> fnls_lab::Result<()> {
    for s in [0.25, 0.5, 0.75, 0.95] {
        let quad = LambdaQuadrature::build(s, 200, 1.0)?;
        let worst = [1e-4, 1e-2, 1.0, 1e2, 1e4]
            .iter()
            .map(|&a| {
                let exact = beta_test_integral(s, a);
                ((quad.integrate(|l| (a + l).powi(-2)) - exact) / exact).abs()
            })
            .fold(0.0, f64::max);
        println!(
            "s = {s:<5} nodes {:>3}  worst closed-form error {worst:.2e}",
            quad.count
        );
    }

    let grid = Grid::new(1, 1024, 10.0 * PI)?;
    let u = ComplexField::gaussian(&grid, 1.0, 2.0);
    for s in [0.6, 0.75, 0.9] {
        let params = PhysParams::focusing(s, 3.0)?;
        let quad = LambdaQuadrature::for_grid(&grid, s, 200)?;
        println!(
            "s = {s}: apply {:.2e}  plancherel {:.2e}",
            balakrishnan_apply_check(&u, &params, &quad)?,
            plancherel_identity_check(&u, &params, &quad)?
        );
    }
    Ok(())
}
