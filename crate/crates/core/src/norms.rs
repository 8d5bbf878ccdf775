//! Lebesgue and Sobolev norms, conserved quantities, and the radial Strauss ratio.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::params::PhysParams;
use crate::reduce::DetSum;
use crate::spectral::power_symbol;

/// Discrete `L^r` norm with weight `dx^d`; `r = ∞` is the grid maximum of `|u|`.
pub fn lebesgue_norm(u: &ComplexField, r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::param("r", format!("{r} not in [1, ∞]")));
    }
    let phys = u.to_physical();
    if r.is_infinite() {
        return Ok(phys
            .values()
            .par_iter()
            .map(|v| v.norm())
            .reduce(|| 0.0, f64::max));
    }
    let sum: f64 = phys.values().par_iter().map(|v| v.norm().powf(r)).det_sum();
    Ok((sum * u.grid().cell_volume()).powf(1.0 / r))
}

/// `∫ |u|^q dx` (no root taken).
pub fn power_integral(u: &ComplexField, q: f64) -> f64 {
    let phys = u.to_physical();
    let sum: f64 = phys.values().par_iter().map(|v| v.norm().powf(q)).det_sum();
    sum * u.grid().cell_volume()
}

/// Squared homogeneous Sobolev seminorm `‖D^σ u‖²_{L²}`, evaluated spectrally.
pub fn sobolev_seminorm_sq(u: &ComplexField, sigma: f64) -> f64 {
    let hat = u.to_spectral();
    let grid = u.grid();
    let sum: f64 = hat
        .values()
        .par_iter()
        .zip(grid.k_sq().par_iter())
        .map(|(v, &k2)| power_symbol(k2, 2.0 * sigma) * v.norm_sqr())
        .det_sum();
    sum * grid.cell_volume() / grid.len() as f64
}

/// `‖u‖_{Ḣ^σ} = ‖D^σ u‖_{L²}`.
pub fn sobolev_seminorm(u: &ComplexField, sigma: f64) -> Result<f64> {
    if !(sigma >= 0.0) {
        return Err(Error::param("sigma", format!("{sigma} must be >= 0")));
    }
    Ok(sobolev_seminorm_sq(u, sigma).sqrt())
}

/// Inhomogeneous norm `‖(1 + |k|²)^{σ/2} û‖`.
pub fn sobolev_norm(u: &ComplexField, sigma: f64) -> f64 {
    let hat = u.to_spectral();
    let grid = u.grid();
    let sum: f64 = hat
        .values()
        .par_iter()
        .zip(grid.k_sq().par_iter())
        .map(|(v, &k2)| (1.0 + k2).powf(sigma) * v.norm_sqr())
        .det_sum();
    (sum * grid.cell_volume() / grid.len() as f64).sqrt()
}

/// Mass `M[u] = ∫|u|²` and energy
/// `E[u] = ½‖u‖²_{Ḣ^s} ∓ (p+1)^{-1} ‖u‖^{p+1}_{L^{p+1}}` (minus when focusing).
pub fn mass_energy(u: &ComplexField, params: &PhysParams) -> (f64, f64) {
    let mass = u.norm_sq();
    let kinetic = sobolev_seminorm_sq(u, params.s);
    let potential = power_integral(u, params.p + 1.0);
    let energy = 0.5 * kinetic - params.sign.mu() * potential / (params.p + 1.0);
    (mass, energy)
}

/// `max_x |x|^{(d-2s)/2} |u(x)| / ‖u‖_{Ḣ^s}` for radial `u`.
pub fn strauss_ratio(u: &ComplexField, params: &PhysParams) -> Result<f64> {
    let hs = sobolev_seminorm_sq(u, params.s).sqrt();
    if hs == 0.0 {
        return Err(Error::Degenerate("Strauss ratio of a zero field".into()));
    }
    let grid = u.grid();
    let expo = 0.5 * (grid.dim() as f64 - 2.0 * params.s);
    let phys = u.to_physical();
    let radii = grid.radii();
    let peak = phys
        .values()
        .par_iter()
        .zip(radii.par_iter())
        .map(|(v, &r)| r.powf(expo) * v.norm())
        .reduce(|| 0.0, f64::max);
    Ok(peak / hs)
}
