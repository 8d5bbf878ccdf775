//! Decay in `R` of the localized resolvent quantity behind the commutator estimate.

use fnls_lab::diagnostics::{commutator_decay_scan, LambdaQuadrature};
use fnls_lab::{ComplexField, Grid, PhysParams};

fn main() -> fnls_lab::Result<()> {
    let grid = Grid::new(1, 1024, 64.0)?;
    let u = ComplexField::gaussian(&grid, 1.0, 1.0);
    for s in [0.5, 0.75, 0.9] {
        let params = PhysParams::focusing(s, 3.0)?;
        let quad = LambdaQuadrature::for_grid(&grid, s, 200)?;
        let scan = commutator_decay_scan(&u, &params, &quad, &[2.0, 4.0, 8.0, 16.0])?;
        println!(
            "s = {s}: slope {:.3} (bound {:.2})",
            scan.slope,
            -2.0 * s + 0.3
        );
        print!("{}", scan.to_csv());
    }
    Ok(())
}
