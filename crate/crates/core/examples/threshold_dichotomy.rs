//! Below/above-threshold runs from scaled ground states `c·Q`.
//!
//! Uses `d = 1, s = 0.75, p = 7` (so `0 < s_c < s`) to stay fast; the 3-D
//! experiment lives in `fixtures/dichotomy_3d.json`.

use fnls_lab::diagnostics::mass_concentration;
use fnls_lab::dynamics::{evolve, EvolveConfig, Monitors};
use fnls_lab::ground_state::{default_initial_guess, petviashvili_solve, PetviashviliOptions};
use fnls_lab::threshold::classify_initial_data;
use fnls_lab::{Grid, PhysParams};

fn main() -> fnls_lab::Result<()> {
    let grid = Grid::new(1, 2048, 100.0)?;
    let params = PhysParams::focusing(0.75, 7.0)?;
    let gs = petviashvili_solve(
        &params,
        &default_initial_guess(&grid),
        &PetviashviliOptions::default(),
    )?;
    println!(
        "Q: mass {:.6}  energy {:.6}  s_c = {}",
        gs.mass,
        gs.energy,
        params.critical_index(1)
    );
    let radius = 5.0;
    for c in [0.8, 1.2] {
        let u0 = gs.q.scaled(c);
        let th = classify_initial_data(&u0, &gs, &params)?;
        let cfg = EvolveConfig {
            dt: 1e-3,
            t_end: 10.0,
            callback_stride: 500,
            ..Default::default()
        };
        let monitors = Monitors {
            concentration_radii: vec![radius],
            ground_state: Some(&gs),
            ..Default::default()
        };
        let evo = evolve(&u0, &cfg, &params, &monitors)?;
        let conc = &evo.series.concentration[0];
        println!(
            "c = {c}: {:?} (energy ratio {:.3}, kinetic ratio {:.3}) -> {:?}, t_wrap {:.1}",
            th.classification, th.energy_ratio, th.kinetic_ratio, evo.status, evo.t_wrap
        );
        println!(
            "        mass in |x| <= {radius}: {:.4} -> {:.4} at t = {:.2} (direct {:.4})",
            conc[0],
            conc[conc.len() - 1],
            evo.t_final,
            mass_concentration(&evo.final_state, radius)
        );
    }
    Ok(())
}
