//! Spectral checks of the resolvent representation of `(-Δ)^s`.

use rayon::prelude::*;

use super::quadrature::LambdaQuadrature;
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::params::PhysParams;
use crate::reduce::DetSum;
use crate::spectral::power_symbol;

fn check_exponent(params: &PhysParams, quad: &LambdaQuadrature) -> Result<()> {
    if (params.s - quad.s).abs() > 1e-14 {
        return Err(Error::param(
            "quad",
            format!("built for s={} but params have s={}", quad.s, params.s),
        ));
    }
    Ok(())
}

/// Relative gap between `s‖(-Δ)^{s/2}u‖²` and `Σ_i w_i λ_i^s ‖∇u_{λ_i}‖²`.
/// Returns 0 when both sides vanish.
pub fn plancherel_identity_check(
    u: &ComplexField,
    params: &PhysParams,
    quad: &LambdaQuadrature,
) -> Result<f64> {
    check_exponent(params, quad)?;
    let grid = u.grid();
    let hat = u.to_spectral();
    let spec_w = grid.cell_volume() / grid.len() as f64;
    let s = params.s;
    let c_s = params.c_s();
    let scaled = quad.scaled_weights();

    let lhs: f64 = hat
        .values()
        .par_iter()
        .zip(grid.k_sq().par_iter())
        .map(|(v, &k2)| power_symbol(k2, 2.0 * s) * v.norm_sqr())
        .det_sum()
        * s
        * spec_w;
    // ‖∇u_λ‖² = c_s Σ_k |k|² |û|² / (|k|² + λ)²
    let rhs: f64 = quad
        .nodes
        .par_iter()
        .zip(scaled.par_iter())
        .map(|(&lam, &w)| {
            let grad_sq: f64 = hat
                .values()
                .iter()
                .zip(grid.k_sq())
                .map(|(v, &k2)| c_s * k2 * v.norm_sqr() / (k2 + lam).powi(2))
                .sum();
            w * grad_sq * spec_w
        })
        .det_sum();
    Ok(relative_gap(rhs, lhs))
}

/// Relative `L²` error between `c_s Σ_i w_i λ_i^{s-1} (-Δ)(λ_i - Δ)^{-1} u` and
/// the direct multiplier `|k|^{2s} û`.
pub fn balakrishnan_apply_check(
    u: &ComplexField,
    params: &PhysParams,
    quad: &LambdaQuadrature,
) -> Result<f64> {
    check_exponent(params, quad)?;
    let grid = u.grid();
    let hat = u.to_spectral();
    let s = params.s;
    let c_s = params.c_s();
    let (num, den) = hat
        .values()
        .par_iter()
        .zip(grid.k_sq().par_iter())
        .map(|(v, &k2)| {
            let assembled = c_s * quad.integrate(|lam| k2 / (lam * (k2 + lam)));
            let exact = power_symbol(k2, 2.0 * s);
            let a = v.norm_sqr();
            ((assembled - exact).powi(2) * a, exact * exact * a)
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    })
}

/// Per-mode form of the Plancherel identity:
/// `c_s ∫ λ^s |k|²(|k|²+λ)^{-2} dλ` versus `s|k|^{2s}`.
pub fn plancherel_mode_check(
    k_sq: f64,
    params: &PhysParams,
    quad: &LambdaQuadrature,
) -> Result<f64> {
    check_exponent(params, quad)?;
    let val = params.c_s() * quad.integrate(|lam| k_sq / (k_sq + lam).powi(2));
    Ok(relative_gap(val, params.s * k_sq.powf(params.s)))
}

fn relative_gap(value: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        value.abs()
    } else {
        ((value - reference) / reference).abs()
    }
}
