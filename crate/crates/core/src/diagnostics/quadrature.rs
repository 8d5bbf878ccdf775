//! Quadrature for `∫₀^∞ λ^s g(λ) dλ` with `g` smooth on `(0, ∞)`, `g(λ) = O(λ^{-1})`
//! at the origin and `O(λ^{-2})` at infinity.
//!
//! The half line is split at `λ₀e^{∓A}`. The two end pieces are mapped to
//! `(0, 1]` and handled by Gauss-Jacobi rules that absorb the algebraic
//! endpoint behaviour; the middle is covered by Gauss-Legendre panels in
//! `log λ`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Half width of the middle region in `log λ`.
const LOG_SPAN: f64 = 18.0;
/// Number of Gauss-Legendre panels across the middle region.
const PANELS: usize = 18;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaQuadrature {
    pub s: f64,
    pub lambda0: f64,
    /// Actual node count; can exceed the requested count for small requests.
    pub count: usize,
    pub nodes: Vec<f64>,
    /// `∫₀^∞ λ^s g dλ ≈ Σ weights[i] · nodes[i]^s · g(nodes[i])`.
    pub weights: Vec<f64>,
}

impl LambdaQuadrature {
    /// Build a rule with roughly `count` nodes centred on the scale `lambda0`.
    pub fn build(s: f64, count: usize, lambda0: f64) -> Result<Self> {
        Self::build_with_span(s, count, lambda0, LOG_SPAN)
    }

    /// Rule centred on the median of the grid's nonzero `|k|²`, with the
    /// log span widened if the grid's wave numbers reach past the default.
    pub fn for_grid(grid: &Grid, s: f64, count: usize) -> Result<Self> {
        let mut k2: Vec<f64> = grid.k_sq().iter().copied().filter(|&k| k > 0.0).collect();
        k2.sort_by(|a, b| a.total_cmp(b));
        let lambda0 = k2[k2.len() / 2];
        let reach = (lambda0 / k2[0])
            .ln()
            .max((k2[k2.len() - 1] / lambda0).ln());
        Self::build_with_span(s, count, lambda0, LOG_SPAN.max(reach + 12.0))
    }

    fn build_with_span(s: f64, count: usize, lambda0: f64, span: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::param("s", format!("{s} not in (0, 1)")));
        }
        if count < 8 {
            return Err(Error::param("count", format!("{count} < 8")));
        }
        if !(lambda0 > 0.0 && lambda0.is_finite()) {
            return Err(Error::param("lambda0", "must be positive"));
        }
        let per_panel = ((count.saturating_sub(2 * (count / 8).max(2))) / PANELS).max(1);
        let end = (count / 8)
            .max(2)
            .max((count.saturating_sub(PANELS * per_panel)) / 2);

        let lo = lambda0 * (-span).exp();
        let hi = lambda0 * span.exp();
        let mut nodes = Vec::with_capacity(2 * end + PANELS * per_panel);
        let mut weights = Vec::with_capacity(nodes.capacity());

        // [0, lo]: λ = lo·τ, weight τ^{s-1}
        let (tau, w) = gauss_jacobi_unit(end, s - 1.0);
        for (t, wi) in tau.iter().zip(&w) {
            nodes.push(lo * t);
            weights.push(wi * lo * t.powf(1.0 - s));
        }

        // log-spaced middle panels
        let h = 2.0 * span / PANELS as f64;
        let (x, wl) = gauss_jacobi_unit(per_panel, 0.0);
        for panel in 0..PANELS {
            let y0 = lo.ln() + panel as f64 * h;
            for (xi, wi) in x.iter().zip(&wl) {
                let lam = (y0 + h * xi).exp();
                nodes.push(lam);
                weights.push(wi * h * lam);
            }
        }

        // [hi, ∞): λ = hi/τ, weight τ^{-s}
        let (tau, w) = gauss_jacobi_unit(end, -s);
        for (t, wi) in tau.iter().zip(&w).rev() {
            nodes.push(hi / t);
            weights.push(wi * hi * t.powf(s - 2.0));
        }

        Ok(LambdaQuadrature {
            s,
            lambda0,
            count: nodes.len(),
            nodes,
            weights,
        })
    }

    /// `Σ w_i λ_i^s g(λ_i)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&lam, &w)| w * lam.powf(self.s) * g(lam))
            .sum()
    }

    /// `w_i λ_i^s` for every node.
    pub fn scaled_weights(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&lam, &w)| w * lam.powf(self.s))
            .collect()
    }
}

/// `∫₀^∞ λ^s (a+λ)^{-2} dλ = a^{s-1} sπ / sin(πs)`.
pub fn beta_test_integral(s: f64, a: f64) -> f64 {
    use std::f64::consts::PI;
    a.powf(s - 1.0) * s * PI / (PI * s).sin()
}

/// Gauss-Jacobi rule for `∫₀¹ τ^β f(τ) dτ` (Golub-Welsch on the three-term
/// recurrence with `α = 0`). Nodes ascending.
fn gauss_jacobi_unit(n: usize, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let alpha = 0.0;
    let ab = alpha + beta;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let k = i as f64;
        let diag = if i == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0))
        };
        jac[(i, i)] = diag;
        if i + 1 < n {
            let m = k + 1.0;
            let num = 4.0 * m * (m + alpha) * (m + beta) * (m + ab);
            let den = (2.0 * m + ab).powi(2) * (2.0 * m + ab + 1.0) * (2.0 * m + ab - 1.0);
            let off = (num / den).sqrt();
            jac[(i, i + 1)] = off;
            jac[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(jac);
    // ∫₋₁¹ (1+x)^β dx = 2^{β+1}/(β+1); mapping to [0,1] divides by 2^{β+1}.
    let mu0 = 1.0 / (beta + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            (0.5 * (1.0 + x), mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}
