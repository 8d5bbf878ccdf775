//! Spectral fractional powers `(-Δ)^{σ/2}` on a periodic box.

use fnls_lab::norms::{mass_energy, sobolev_seminorm_sq};
use fnls_lab::spectral::{fractional_power_apply, neg_laplacian};
use fnls_lab::{ComplexField, Grid, PhysParams};

fn main() -> fnls_lab::Result<()> {
    let grid = Grid::new(1, 256, std::f64::consts::PI * 8.0)?;

    // -Δ sin(x) = sin(x)
    let sine = ComplexField::from_real_fn(&grid, |x| x[0].sin());
    println!(
        "|(-Δ) sin - sin|      = {:.2e}",
        fractional_power_apply(&sine, 2.0)?.max_rel_diff(&sine)
    );

    // Gaussian: -Δ e^{-x²} = (2 - 4x²) e^{-x²}
    let g = ComplexField::gaussian(&grid, 1.0, 1.0);
    let exact = ComplexField::radial(&grid, |r| (2.0 - 4.0 * r * r) * (-r * r).exp());
    println!(
        "Laplacian of Gaussian  max rel err {:.2e}",
        neg_laplacian(&g).max_rel_diff(&exact)
    );

    // composition: D^a D^b = D^{a+b}
    let a = fractional_power_apply(&fractional_power_apply(&g, 0.7)?, 0.8)?;
    let b = fractional_power_apply(&g, 1.5)?;
    println!("D^0.7 D^0.8 vs D^1.5   rel L2 {:.2e}", a.rel_l2_diff(&b));

    for s in [0.5, 0.75, 1.0] {
        let p = PhysParams::focusing(s, 3.0)?;
        let (m, e) = mass_energy(&g, &p);
        println!(
            "s = {s:<4}  |u|²_Hs = {:.6}  M = {m:.6}  E = {e:.6}",
            sobolev_seminorm_sq(&g, s)
        );
    }
    Ok(())
}
