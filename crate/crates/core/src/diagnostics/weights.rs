//! Radial virial weights sampled on the grid together with their derivatives.

use std::sync::Arc;

use nalgebra::{Matrix3, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightKind {
    /// `φ = R²ψ(|x|/R)`, quadratic inside `(1-δ)R`, linear outside `(1+δ)R`.
    Morawetz { radius: f64, blend: f64 },
    /// `φ = √(|x|² + ε²)`.
    RegularizedDistance { eps: f64 },
}

/// A radial weight `φ` with `∇φ`, `Hess φ`, `Δφ` and `Δ²φ` on every grid point.
#[derive(Debug, Clone)]
pub struct VirialWeight {
    pub kind: WeightKind,
    pub grid: Arc<Grid>,
    pub phi: Vec<f64>,
    /// `grad[j][idx] = ∂_j φ`.
    pub grad: Vec<Vec<f64>>,
    /// `hess[j*d + k][idx] = ∂_j∂_k φ`.
    pub hess: Vec<Vec<f64>>,
    pub lap: Vec<f64>,
    pub bilap: Vec<f64>,
}

pub type MorawetzWeight = VirialWeight;

/// Radial profile values `[F, F', F'', F''', F'''']` at `r`.
type Profile = [f64; 5];

impl VirialWeight {
    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// `R` for a Morawetz weight.
    pub fn radius(&self) -> Option<f64> {
        match self.kind {
            WeightKind::Morawetz { radius, .. } => Some(radius),
            WeightKind::RegularizedDistance { .. } => None,
        }
    }

    pub fn hess_at(&self, idx: usize) -> Matrix3<f64> {
        let d = self.dim();
        let mut m = Matrix3::zeros();
        for j in 0..d {
            for k in 0..d {
                m[(j, k)] = self.hess[j * d + k][idx];
            }
        }
        m
    }

    /// Smallest Hessian eigenvalue over the grid.
    pub fn min_hessian_eigenvalue(&self) -> f64 {
        let d = self.dim();
        (0..self.grid.len())
            .into_par_iter()
            .map(|idx| {
                let m = self.hess_at(idx);
                if d == 3 {
                    SymmetricEigen::new(m).eigenvalues.min()
                } else {
                    eigen_min_block(&m, d)
                }
            })
            .reduce(|| f64::INFINITY, f64::min)
    }

    /// `max` over the grid of `|∇φ|`, `|∂²φ|`, `|∂³φ|` bounds (a proxy for
    /// `‖∇φ‖_{W^{2,∞}}` using the radial derivatives).
    pub fn w2inf_norm(&self) -> f64 {
        let g = self
            .grad
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let h = self
            .hess
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let l = self.lap.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        g.max(h).max(l)
    }
}

fn eigen_min_block(m: &Matrix3<f64>, d: usize) -> f64 {
    match d {
        1 => m[(0, 0)],
        2 => {
            let (a, b, c) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
            let mid = 0.5 * (a + c);
            let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
            mid - rad
        }
        _ => f64::INFINITY,
    }
}

/// Septic smoothstep `S(τ) = 35τ⁴ - 84τ⁵ + 70τ⁶ - 20τ⁷` and its first two
/// derivatives, clamped to `[0, 1]`.
pub(crate) fn smoothstep(tau: f64) -> [f64; 3] {
    if tau <= 0.0 {
        return [0.0; 3];
    }
    if tau >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let t = tau;
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let s = t4 * (35.0 - 84.0 * t + 70.0 * t2 - 20.0 * t3);
    let ds = 140.0 * t3 * (1.0 - t).powi(3);
    let dds = 420.0 * t2 * (1.0 - t).powi(2) * (1.0 - 2.0 * t);
    [s, ds, dds]
}

/// `∫₀^τ S` and `∫₀^τ∫₀^σ S`.
fn smoothstep_integrals(t: f64) -> (f64, f64) {
    let i1 = 7.0 * t.powi(5) - 14.0 * t.powi(6) + 10.0 * t.powi(7) - 2.5 * t.powi(8);
    let i2 = 7.0 / 6.0 * t.powi(6) - 2.0 * t.powi(7) + 1.25 * t.powi(8) - 2.5 / 9.0 * t.powi(9);
    (i1, i2)
}

/// `[ψ, ψ', ψ'', ψ''', ψ'''']` of the normalized Morawetz profile at `ρ`.
pub(crate) fn morawetz_profile(rho: f64, delta: f64) -> Profile {
    let a = 1.0 - delta;
    let b = 1.0 + delta;
    if rho <= a {
        return [0.5 * rho * rho, rho, 1.0, 0.0, 0.0];
    }
    let blend_val = |tau: f64| {
        let (i1, i2) = smoothstep_integrals(tau);
        let psi =
            0.5 * a * a + a * (2.0 * delta * tau) + 4.0 * delta * delta * (0.5 * tau * tau - i2);
        let dpsi = a + 2.0 * delta * (tau - i1);
        (psi, dpsi)
    };
    if rho >= b {
        let (psi_b, _) = blend_val(1.0);
        return [psi_b + (rho - b), 1.0, 0.0, 0.0, 0.0];
    }
    let tau = (rho - a) / (2.0 * delta);
    let [s, ds, dds] = smoothstep(tau);
    let (psi, dpsi) = blend_val(tau);
    [
        psi,
        dpsi,
        1.0 - s,
        -ds / (2.0 * delta),
        -dds / (4.0 * delta * delta),
    ]
}

/// Morawetz weight `φ_R = R²ψ(|x|/R)` with a C³ blend of half width `δ`
/// (in units of `R`) around `|x| = R`.
pub fn build_morawetz_weight(grid: &Arc<Grid>, radius: f64, blend: f64) -> Result<VirialWeight> {
    let l = grid.half_len();
    if !(radius > 0.0 && radius < 0.5 * l) {
        return Err(Error::param(
            "R",
            format!("{radius} must lie in (0, l/2) = (0, {})", 0.5 * l),
        ));
    }
    if !(blend > 0.0 && blend <= 0.5) {
        return Err(Error::param(
            "delta_blend",
            format!("{blend} not in (0, 1/2]"),
        ));
    }
    let r2 = radius * radius;
    Ok(sample_radial(
        grid,
        WeightKind::Morawetz { radius, blend },
        |r| {
            let [p0, p1, p2, p3, p4] = morawetz_profile(r / radius, blend);
            [r2 * p0, radius * p1, p2, p3 / radius, p4 / r2]
        },
    ))
}

/// `φ_ε = √(|x|² + ε²)`.
pub fn regularized_distance_weight(grid: &Arc<Grid>, eps: f64) -> Result<VirialWeight> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::param("eps", "must be positive"));
    }
    let e2 = eps * eps;
    Ok(sample_radial(
        grid,
        WeightKind::RegularizedDistance { eps },
        |r| {
            let rho2 = r * r + e2;
            let rho = rho2.sqrt();
            let rho3 = rho2 * rho;
            let rho5 = rho3 * rho2;
            let rho7 = rho5 * rho2;
            [
                rho,
                r / rho,
                e2 / rho3,
                -3.0 * e2 * r / rho5,
                -3.0 * e2 / rho5 + 15.0 * e2 * r * r / rho7,
            ]
        },
    ))
}

/// `(φ, ∇φ, ∇²φ, Δφ, Δ²φ)` at one grid point.
type Sample = (f64, [f64; 3], [f64; 9], f64, f64);

fn sample_radial<F>(grid: &Arc<Grid>, kind: WeightKind, profile: F) -> VirialWeight
where
    F: Fn(f64) -> Profile + Sync,
{
    let d = grid.dim();
    let df = d as f64;
    let n = grid.len();
    let samples: Vec<Sample> = (0..n)
        .into_par_iter()
        .map(|idx| {
            let x = grid.position(idx);
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            let [f0, f1, f2, f3, f4] = profile(r);
            let mut g = [0.0; 3];
            let mut h = [0.0; 9];
            if r == 0.0 {
                // smooth radial functions: F'/r → F''(0), Δ²φ(0) = F''''(0)·d(d+2)/3
                for j in 0..d {
                    h[j * d + j] = f2;
                }
                return (f0, g, h, df * f2, f4 * df * (df + 2.0) / 3.0);
            }
            let a = f1 / r;
            for j in 0..d {
                let xj = x[j] / r;
                g[j] = f1 * xj;
                for k in 0..d {
                    let xk = x[k] / r;
                    let delta = if j == k { 1.0 } else { 0.0 };
                    h[j * d + k] = a * (delta - xj * xk) + f2 * xj * xk;
                }
            }
            let lap = f2 + (df - 1.0) * a;
            let bilap = f4
                + 2.0 * (df - 1.0) * f3 / r
                + (df - 1.0) * (df - 3.0) * (f2 / (r * r) - f1 / (r * r * r));
            (f0, g, h, lap, bilap)
        })
        .collect();

    let mut phi = Vec::with_capacity(n);
    let mut grad = vec![Vec::with_capacity(n); d];
    let mut hess = vec![Vec::with_capacity(n); d * d];
    let mut lap = Vec::with_capacity(n);
    let mut bilap = Vec::with_capacity(n);
    for (f0, g, h, lp, bl) in samples {
        phi.push(f0);
        for j in 0..d {
            grad[j].push(g[j]);
        }
        for jk in 0..d * d {
            hess[jk].push(h[jk]);
        }
        lap.push(lp);
        bilap.push(bl);
    }
    VirialWeight {
        kind,
        grid: Arc::clone(grid),
        phi,
        grad,
        hess,
        lap,
        bilap,
    }
}

/// `[χ, χ', χ'']` of the radial cutoff equal to 1 on `r ≤ R/2` and 0 for `r ≥ R`.
pub(crate) fn cutoff_profile(r: f64, radius: f64) -> [f64; 3] {
    let half = 0.5 * radius;
    let [s, ds, dds] = smoothstep((r - half) / half);
    [1.0 - s, -ds / half, -dds / (half * half)]
}

/// `χ_R Δχ_R` on every grid point.
pub(crate) fn cutoff_chi_lap_chi(grid: &Grid, radius: f64) -> Vec<f64> {
    let dm1 = grid.dim() as f64 - 1.0;
    (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let x = grid.position(idx);
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            if r == 0.0 {
                return 0.0;
            }
            let [c, c1, c2] = cutoff_profile(r, radius);
            c * (c2 + dm1 * c1 / r)
        })
        .collect()
}
