//! Concentration, coercivity, Morawetz averages and decay-rate fits.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::quadrature::LambdaQuadrature;
use super::weights::cutoff_chi_lap_chi;
use crate::dynamics::{linear_propagate, wrap_horizon, TimeSeries};
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::ground_state::GroundStateReport;
use crate::norms::{lebesgue_norm, sobolev_seminorm_sq};
use crate::params::PhysParams;
use crate::reduce::DetSum;

/// `∫_{|x| ≤ R} |u|² dx` with a sharp indicator.
pub fn mass_concentration(u: &ComplexField, radius: f64) -> f64 {
    let grid = u.grid();
    let phys = u.to_physical();
    let sum: f64 = phys
        .values()
        .par_iter()
        .enumerate()
        .filter(|(idx, _)| {
            let x = grid.position(*idx);
            x[0] * x[0] + x[1] * x[1] + x[2] * x[2] <= radius * radius
        })
        .map(|(_, v)| v.norm_sqr())
        .det_sum();
    sum * grid.cell_volume()
}

/// `y = ‖u‖_{Ḣ^s} ‖u‖_{L²}^{(s-s_c)/s_c} / (‖Q‖_{Ḣ^s} ‖Q‖_{L²}^{(s-s_c)/s_c})`.
pub fn coercivity_functional(
    u: &ComplexField,
    report: &GroundStateReport,
    params: &PhysParams,
) -> Result<f64> {
    let sc = params.critical_index(u.grid().dim());
    if sc <= 0.0 {
        return Err(Error::OutOfRegime(format!(
            "coercivity needs s_c > 0, got {sc}"
        )));
    }
    let expo = (params.s - sc) / sc;
    let hs = sobolev_seminorm_sq(u, params.s).sqrt();
    let l2 = u.norm_sq().sqrt();
    Ok(hs * l2.powf(expo) / (report.hs * report.l2().powf(expo)))
}

/// `(t₂-t₁)^{-1} ∫_{t₁}^{t₂} ∫_{|x| ≤ R/2} |u|^{p+1} dx dt`, trapezoidal in the
/// recorded samples with linear interpolation at the window ends.
pub fn morawetz_time_average(series: &TimeSeries, radius: f64, t1: f64, t2: f64) -> Result<f64> {
    let col = series.potential_index(radius).ok_or_else(|| {
        Error::param(
            "R",
            format!("no localized potential recorded at R={radius}"),
        )
    })?;
    let t = &series.t;
    if t.is_empty() || !(t2 > t1) || t1 < t[0] - 1e-12 || t2 > t[t.len() - 1] + 1e-12 {
        return Err(Error::WindowOutOfRange { t1, t2 });
    }
    let f = &series.local_potential[col];
    let interp = |tq: f64| -> f64 {
        let i = t.partition_point(|&x| x <= tq).clamp(1, t.len() - 1);
        let (ta, tb) = (t[i - 1], t[i]);
        let w = if tb > ta {
            ((tq - ta) / (tb - ta)).clamp(0.0, 1.0)
        } else {
            0.0
        };
        f[i - 1] * (1.0 - w) + f[i] * w
    };
    let mut pts: Vec<(f64, f64)> = vec![(t1, interp(t1))];
    pts.extend(
        t.iter()
            .zip(f)
            .filter(|(&ti, _)| ti > t1 && ti < t2)
            .map(|(&ti, &fi)| (ti, fi)),
    );
    pts.push((t2, interp(t2)));
    let integral: f64 = pts
        .windows(2)
        .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
        .sum();
    Ok(integral / (t2 - t1))
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            have: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all abscissae coincide".into()));
    }
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorScan {
    pub radii: Vec<f64>,
    /// `Σ_i w_i λ_i^s ∫ χ_R Δχ_R |u_{λ_i}|² dx` at each radius.
    pub values: Vec<f64>,
    /// Fitted exponent of `|value| ∝ R^slope`.
    pub slope: f64,
}

impl CommutatorScan {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("R,value\n");
        for (r, v) in self.radii.iter().zip(&self.values) {
            out.push_str(&format!("{r:e},{v:e}\n"));
        }
        out
    }
}

/// Evaluate the localized resolvent quantity `∫λ^s ∫χ_RΔχ_R |u_λ|²` at each radius
/// and fit its decay in `R`. The constant-mode self term is dropped as in
/// [`virial_rhs`](super::virial_rhs).
pub fn commutator_decay_scan(
    u: &ComplexField,
    params: &PhysParams,
    quad: &LambdaQuadrature,
    radii: &[f64],
) -> Result<CommutatorScan> {
    if radii.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            have: radii.len(),
        });
    }
    let grid = u.grid();
    let reach = grid.half_len();
    if let Some(&bad) = radii.iter().find(|&&r| !(r > 0.0 && r <= reach)) {
        return Err(Error::param("radii", format!("{bad} outside (0, l]")));
    }
    if (params.s - quad.s).abs() > 1e-14 {
        return Err(Error::param("quad", "exponent differs from params.s"));
    }
    let weights: Vec<Vec<f64>> = radii.iter().map(|&r| cutoff_chi_lap_chi(grid, r)).collect();
    let hat = u.to_spectral();
    let amp = params.c_s().sqrt();
    let dxd = grid.cell_volume();
    let scaled = quad.scaled_weights();
    let mean_norm = grid.len() as f64;

    let per_node: Vec<Vec<f64>> = quad
        .nodes
        .par_iter()
        .zip(scaled.par_iter())
        .map(|(&lam, &w)| {
            let mut v: Vec<Complex64> = hat
                .values()
                .iter()
                .zip(grid.k_sq())
                .map(|(c, &k2)| c * (amp / (k2 + lam)))
                .collect();
            let mean_sq = (v[0] / mean_norm).norm_sqr();
            grid.inverse(&mut v);
            weights
                .iter()
                .map(|chi| {
                    w * dxd
                        * v.iter()
                            .zip(chi)
                            .map(|(z, c)| c * (z.norm_sqr() - mean_sq))
                            .sum::<f64>()
                })
                .collect()
        })
        .collect();
    let values: Vec<f64> = (0..radii.len())
        .map(|i| per_node.iter().map(|row| row[i]).sum())
        .collect();
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    let slope = log_log_slope(radii, &abs)?;
    Ok(CommutatorScan {
        radii: radii.to_vec(),
        values,
        slope,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    /// Times actually used (those before the wrap horizon).
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    /// `α` in `‖e^{-it(-Δ)^s}u₀‖_{L^r} ∝ t^{-α}`.
    pub exponent: f64,
    pub t_wrap: f64,
}

impl DecayFit {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,norm\n");
        for (t, v) in self.times.iter().zip(&self.norms) {
            out.push_str(&format!("{t:e},{v:e}\n"));
        }
        out
    }
}

/// Fit the `L^r` decay rate of the free evolution of `u0` over `times`
/// (restricted to `t < t_wrap`).
pub fn dispersive_decay_fit(
    u0: &ComplexField,
    params: &PhysParams,
    r: f64,
    times: &[f64],
) -> Result<DecayFit> {
    if !(r > 2.0 || (r - 2.0).abs() < 1e-15) {
        return Err(Error::param("r", format!("{r} must be >= 2")));
    }
    if times.iter().any(|&t| !(t > 0.0)) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param(
            "times",
            "must be positive and strictly increasing",
        ));
    }
    let t_wrap = wrap_horizon(u0.grid(), params);
    let used: Vec<f64> = times.iter().copied().filter(|&t| t < t_wrap).collect();
    if used.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            have: used.len(),
        });
    }
    let norms = used
        .par_iter()
        .map(|&t| lebesgue_norm(&linear_propagate(u0, t, params), r))
        .collect::<Result<Vec<f64>>>()?;
    let slope = log_log_slope(&used, &norms)?;
    Ok(DecayFit {
        times: used,
        norms,
        exponent: -slope,
        t_wrap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn whole_box_concentration_is_mass() {
        let grid = Grid::new(2, 32, 5.0).unwrap();
        let u = ComplexField::gaussian(&grid, 1.0, 2.0);
        let m = mass_concentration(&u, 5.0 * 2f64.sqrt() + 1e-9);
        assert!((m - u.norm_sq()).abs() < 1e-12 * m);
        assert!(mass_concentration(&u, 1.0) < m);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        assert!((log_log_slope(&xs, &ys).unwrap() + 1.5).abs() < 1e-12);
        assert!(log_log_slope(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn time_average_of_linear_signal() {
        let series = TimeSeries {
            t: vec![0.0, 1.0, 2.0, 3.0],
            potential_radii: vec![2.0],
            local_potential: vec![vec![0.0, 1.0, 2.0, 3.0]],
            ..Default::default()
        };
        let avg = morawetz_time_average(&series, 2.0, 0.5, 2.5).unwrap();
        assert!((avg - 1.5).abs() < 1e-14);
        assert!(morawetz_time_average(&series, 2.0, 0.0, 4.0).is_err());
        assert!(morawetz_time_average(&series, 3.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn zero_series_averages_to_zero() {
        let series = TimeSeries {
            t: vec![0.0, 0.5, 1.0],
            potential_radii: vec![1.0],
            local_potential: vec![vec![0.0; 3]],
            ..Default::default()
        };
        assert_eq!(morawetz_time_average(&series, 1.0, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn unitary_decay_is_flat() {
        let grid = Grid::new(1, 512, 100.0).unwrap();
        let prm = PhysParams::focusing(0.75, 3.0).unwrap();
        let u = ComplexField::gaussian(&grid, 1.0, 1.0);
        let fit = dispersive_decay_fit(&u, &prm, 2.0, &[1.0, 2.0, 4.0, 8.0]).unwrap();
        assert!(fit.exponent.abs() < 1e-10);
    }

    #[test]
    fn scan_needs_three_radii() {
        let grid = Grid::new(1, 64, 16.0).unwrap();
        let prm = PhysParams::focusing(0.75, 3.0).unwrap();
        let quad = LambdaQuadrature::for_grid(&grid, 0.75, 64).unwrap();
        let u = ComplexField::gaussian(&grid, 1.0, 1.0);
        assert!(commutator_decay_scan(&u, &prm, &quad, &[2.0, 4.0]).is_err());
        assert!(commutator_decay_scan(&u, &prm, &quad, &[2.0, 4.0, 40.0]).is_err());
    }
}
