//! Virial identity: finite-difference rate of `M_φ` against the resolvent-quadrature
//! right-hand side, both signs.

use fnls_lab::diagnostics::{
    build_morawetz_weight, virial_bracket, virial_consistency, LambdaQuadrature,
};
use fnls_lab::dynamics::EvolveConfig;
use fnls_lab::{ComplexField, Grid, PhysParams, Sign};

fn main() -> fnls_lab::Result<()> {
    let grid = Grid::new(2, 64, 8.0)?;
    let params = PhysParams::focusing(0.8, 3.0)?;
    let weight = build_morawetz_weight(&grid, 3.0, 0.3)?;
    let quad = LambdaQuadrature::for_grid(&grid, params.s, 96)?;
    let u0 = ComplexField::gaussian(&grid, 1.2, 1.0);
    println!("M_phi(0) = {:.6e}", virial_bracket(&u0, &weight));
    let cfg = EvolveConfig {
        dt: 1e-3,
        t_end: 0.5,
        callback_stride: 10,
        ..Default::default()
    };
    for sign in [Sign::Focusing, Sign::Defocusing] {
        let vc = virial_consistency(&u0, &params.with_sign(sign), &cfg, &weight, Some(&quad), 10)?;
        println!(
            "{sign:?}: rel err {:.2e} over {} samples (direct rate {:.2e})",
            vc.rel_err,
            vc.t.len(),
            vc.rel_err_direct
        );
        for i in (0..vc.t.len()).step_by(2) {
            println!(
                "  t = {:.2}  fd {:+.6e}  rhs {:+.6e}",
                vc.t[i], vc.finite_difference[i], vc.rhs[i]
            );
        }
    }
    Ok(())
}
