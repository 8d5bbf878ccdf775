//! Weighted momentum `M_φ = 2 Im ∫ ū ∇u·∇φ` and its time derivative.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::quadrature::LambdaQuadrature;
use super::weights::VirialWeight;
use crate::dynamics::{evolve_with, EvolveConfig, Monitors, VirialProbe};
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::params::PhysParams;
use crate::reduce::DetSum;
use crate::spectral::{gradient_from_spectral, power_symbol};

/// `2 Im ∫ ū ∇u·∇φ dx`.
pub fn virial_bracket(u: &ComplexField, weight: &VirialWeight) -> f64 {
    let grid = u.grid();
    let phys = u.to_physical();
    let hat = u.to_spectral();
    let grads = gradient_from_spectral(grid, hat.values());
    let sum: f64 = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let ub = phys.values()[idx].conj();
            let dot: Complex64 = (0..grid.dim())
                .map(|j| grads[j][idx] * weight.grad[j][idx])
                .sum();
            (ub * dot).im
        })
        .det_sum();
    2.0 * sum * grid.cell_volume()
}

/// `d/dt M_φ` through the resolvent representation of `(-Δ)^s`:
///
/// ```text
/// Σ_i w_i λ_i^s ∫ (4 Hess φ : ∇ū_λ ⊗ ∇u_λ - Δ²φ |u_λ|²) dx - μ·2(p-1)/(p+1) ∫ Δφ |u|^{p+1} dx
/// ```
///
/// with `u_λ = √c_s (λ - Δ)^{-1} u`. At `s = 1` the classical local formula is
/// used and `quad` is ignored.
pub fn virial_rhs(
    u: &ComplexField,
    weight: &VirialWeight,
    params: &PhysParams,
    quad: &LambdaQuadrature,
) -> f64 {
    let nonlinear = nonlinear_virial_term(u, weight, params);
    if params.s >= 1.0 {
        return classical_linear_term(u, weight) + nonlinear;
    }
    let grid = u.grid();
    let hat = u.to_spectral();
    let amp = params.c_s().sqrt();
    let scaled = quad.scaled_weights();
    let linear: f64 = quad
        .nodes
        .par_iter()
        .zip(scaled.par_iter())
        .map(|(&lam, &w)| {
            let smoothed: Vec<Complex64> = hat
                .values()
                .iter()
                .zip(grid.k_sq())
                .map(|(v, &k2)| v * (amp / (k2 + lam)))
                .collect();
            w * local_quadratic_form(grid, &smoothed, weight, true)
        })
        .det_sum();
    linear + nonlinear
}

/// `4∫ Hess φ : ∇ū ⊗ ∇u - ∫ Δ²φ |u|²`, the linear part at `s = 1`.
pub fn classical_linear_term(u: &ComplexField, weight: &VirialWeight) -> f64 {
    let hat = u.to_spectral();
    local_quadratic_form(u.grid(), hat.values(), weight, false)
}

/// `-μ · 2(p-1)/(p+1) ∫ Δφ |u|^{p+1}`.
pub fn nonlinear_virial_term(u: &ComplexField, weight: &VirialWeight, params: &PhysParams) -> f64 {
    let phys = u.to_physical();
    let q = params.p + 1.0;
    let sum: f64 = phys
        .values()
        .par_iter()
        .zip(weight.lap.par_iter())
        .map(|(v, lap)| lap * v.norm().powf(q))
        .det_sum();
    -params.sign.mu() * 2.0 * (params.p - 1.0) / (params.p + 1.0) * sum * u.grid().cell_volume()
}

/// `∫ (4 Hess φ : ∇v̄ ⊗ ∇v - Δ²φ |v|²)` for `v` given by spectral coefficients.
/// With `drop_mean`, the constant-mode self term `|v̂(0)/N|²` is removed from
/// `|v|²`; on the torus it carries no momentum and would otherwise make the
/// `λ`-integral diverge at the origin.
fn local_quadratic_form(
    grid: &Arc<Grid>,
    hat: &[Complex64],
    weight: &VirialWeight,
    drop_mean: bool,
) -> f64 {
    let d = grid.dim();
    let grads = gradient_from_spectral(grid, hat);
    let mut v = hat.to_vec();
    grid.inverse(&mut v);
    let mean_sq = if drop_mean {
        (hat[0] / grid.len() as f64).norm_sqr()
    } else {
        0.0
    };
    let sum: f64 = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let mut hterm = 0.0;
            for j in 0..d {
                let gj = grads[j][idx].conj();
                for k in 0..d {
                    hterm += weight.hess[j * d + k][idx] * (gj * grads[k][idx]).re;
                }
            }
            4.0 * hterm - weight.bilap[idx] * (v[idx].norm_sqr() - mean_sq)
        })
        .det_sum();
    sum * grid.cell_volume()
}

/// `d/dt M_φ` evaluated directly from the equation:
/// with `B = (-Δ)^s u - μ|u|^{p-1}u` and `u_t = -iB`,
/// `d/dt M_φ = 2 Re ∫ (B̄ ∇u - ū ∇B)·∇φ`.
pub fn virial_rate_direct(u: &ComplexField, weight: &VirialWeight, params: &PhysParams) -> f64 {
    let grid = u.grid();
    let d = grid.dim();
    let phys = u.to_physical();
    let hat = u.to_spectral();
    let two_s = 2.0 * params.s;
    let mu = params.sign.mu();
    let pm1 = params.p - 1.0;

    let mut b_hat: Vec<Complex64> = phys
        .values()
        .par_iter()
        .map(|v| -mu * v * v.norm().powf(pm1))
        .collect();
    grid.forward(&mut b_hat);
    b_hat
        .par_iter_mut()
        .zip(hat.values().par_iter())
        .zip(grid.k_sq().par_iter())
        .for_each(|((b, v), &k2)| *b += v * power_symbol(k2, two_s));
    let grad_b = gradient_from_spectral(grid, &b_hat);
    let grad_u = gradient_from_spectral(grid, hat.values());
    let mut b = b_hat;
    grid.inverse(&mut b);

    let sum: f64 = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let bb = b[idx].conj();
            let ub = phys.values()[idx].conj();
            (0..d)
                .map(|j| ((bb * grad_u[j][idx] - ub * grad_b[j][idx]) * weight.grad[j][idx]).re)
                .sum::<f64>()
        })
        .det_sum();
    2.0 * sum * grid.cell_volume()
}

#[derive(Debug, Clone, Serialize)]
pub struct VirialConsistency {
    pub t: Vec<f64>,
    /// Centered difference of the recorded `M_φ`.
    pub finite_difference: Vec<f64>,
    pub rhs: Vec<f64>,
    pub direct: Vec<f64>,
    /// `max |FD - rhs| / max |rhs|` over the sampled times.
    pub rel_err: f64,
    /// Same with the directly evaluated derivative in place of `rhs`.
    pub rel_err_direct: f64,
}

/// Evolve `u0`, difference `M_φ` across neighbouring records and compare with
/// [`virial_rhs`] (and [`virial_rate_direct`]) on every `rhs_every`-th interior record.
pub fn virial_consistency(
    u0: &ComplexField,
    params: &PhysParams,
    cfg: &EvolveConfig,
    weight: &VirialWeight,
    quad: Option<&LambdaQuadrature>,
    rhs_every: usize,
) -> Result<VirialConsistency> {
    match quad {
        None if params.s < 1.0 => return Err(Error::param("quad", "required for s < 1")),
        Some(q) if params.s < 1.0 && (q.s - params.s).abs() > 1e-14 => {
            return Err(Error::param(
                "quad",
                format!("built for s={} but params have s={}", q.s, params.s),
            ))
        }
        _ => {}
    }
    let h = cfg.dt * cfg.callback_stride as f64;
    if h > 1e-2 + 1e-15 {
        return Err(Error::param(
            "callback_stride",
            format!("record spacing {h} exceeds 1e-2"),
        ));
    }
    if rhs_every == 0 {
        return Err(Error::param("rhs_every", "must be at least 1"));
    }
    let mut kept: Vec<(usize, ComplexField)> = Vec::new();
    let mut record = 0usize;
    let monitors = Monitors {
        virial: Some(VirialProbe {
            weight,
            quadrature: None,
        }),
        ..Default::default()
    };
    let evo = evolve_with(u0, cfg, params, &monitors, |_, state| {
        if record > 0 && record.is_multiple_of(rhs_every) {
            kept.push((record, state.clone()));
        }
        record += 1;
    })?;
    let m = &evo.series.m_phi;
    let times = &evo.series.t;
    kept.retain(|(r, _)| r + 1 < m.len());
    if kept.is_empty() {
        return Err(Error::TooFewSamples {
            needed: 3,
            have: m.len(),
        });
    }

    let evaluated: Vec<(f64, f64, f64, f64)> = kept
        .par_iter()
        .map(|(r, state)| {
            let fd = (m[r + 1] - m[r - 1]) / (times[r + 1] - times[r - 1]);
            let rhs = match quad {
                Some(q) => virial_rhs(state, weight, params, q),
                None => {
                    classical_linear_term(state, weight)
                        + nonlinear_virial_term(state, weight, params)
                }
            };
            (
                times[*r],
                fd,
                rhs,
                virial_rate_direct(state, weight, params),
            )
        })
        .collect();
    let t: Vec<f64> = evaluated.iter().map(|e| e.0).collect();
    let fd: Vec<f64> = evaluated.iter().map(|e| e.1).collect();
    let rhs: Vec<f64> = evaluated.iter().map(|e| e.2).collect();
    let direct: Vec<f64> = evaluated.iter().map(|e| e.3).collect();
    Ok(VirialConsistency {
        rel_err: max_rel_gap(&fd, &rhs),
        rel_err_direct: max_rel_gap(&fd, &direct),
        t,
        finite_difference: fd,
        rhs,
        direct,
    })
}

fn max_rel_gap(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let gap = a
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if scale == 0.0 {
        gap
    } else {
        gap / scale
    }
}
