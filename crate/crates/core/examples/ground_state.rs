//! Petviashvili solve of the cubic 1-D ground state and comparison with `√2 sech x`.

use std::f64::consts::PI;

use fnls_lab::ground_state::{
    default_initial_guess, gn_constant, petviashvili_solve, PetviashviliOptions,
};
use fnls_lab::{ComplexField, Grid, PhysParams};

fn main() -> fnls_lab::Result<()> {
    let grid = Grid::new(1, 1024, 10.0 * PI)?;
    let params = PhysParams::focusing(1.0, 3.0)?;
    let gs = petviashvili_solve(
        &params,
        &default_initial_guess(&grid),
        &PetviashviliOptions::default(),
    )?;
    let exact = ComplexField::radial(&grid, |r| 2f64.sqrt() / r.cosh());
    let err =
        gs.q.values()
            .iter()
            .zip(exact.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
    println!("iterations    {}", gs.iterations);
    println!("residual      {:.3e}", gs.residual);
    println!("mass          {:.10} (exact 4)", gs.mass);
    println!("|Q|^2_H1      {:.10} (exact 4/3)", gs.hs * gs.hs);
    println!("max |Q - sech| {err:.3e}");
    println!(
        "GN constant   {:.10} (exact 1/sqrt 3 = {:.10})",
        gn_constant(&gs)?,
        1.0 / 3f64.sqrt()
    );

    // fractional orders
    for s in [0.6, 0.75, 0.9] {
        let p = PhysParams::focusing(s, 3.0)?;
        let q = petviashvili_solve(
            &p,
            &default_initial_guess(&grid),
            &PetviashviliOptions::default(),
        )?;
        println!(
            "s = {s}: mass {:.6}  Q(0) {:.6}  iterations {}",
            q.mass,
            q.q.values()[512].re,
            q.iterations
        );
    }
    Ok(())
}
