//! Radial ground states of `(-Δ)^s Q + Q - Q^p = 0` and their variational constants.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexField, Space};
use crate::grid::Grid;
use crate::norms::{lebesgue_norm, mass_energy, power_integral, sobolev_seminorm_sq};
use crate::params::{PhysParams, Sign};
use crate::reduce::DetSum;
use crate::spectral::power_symbol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PetviashviliOptions {
    /// Stop once the L² residual of the elliptic equation is at most this.
    pub tol: f64,
    pub max_iter: usize,
    /// Average over the grid's axis reflections and permutations after each
    /// iteration. `None` means on for `d ≥ 2`.
    pub symmetrize: Option<bool>,
}

impl Default for PetviashviliOptions {
    fn default() -> Self {
        PetviashviliOptions {
            tol: 1e-10,
            max_iter: 2000,
            symmetrize: None,
        }
    }
}

/// A converged ground state together with the scalars derived from it.
#[derive(Debug, Clone)]
pub struct GroundStateReport {
    pub q: ComplexField,
    pub params: PhysParams,
    /// `M[Q] = ‖Q‖²_{L²}`.
    pub mass: f64,
    /// `‖Q‖_{Ḣ^s}`.
    pub hs: f64,
    /// `‖Q‖_{L^{p+1}}`.
    pub lp1: f64,
    pub energy: f64,
    /// Sharp Gagliardo–Nirenberg constant `C(d, p, s)` evaluated at `Q`.
    pub gn_const: f64,
    pub residual: f64,
    pub iterations: usize,
    /// `∫_{|x| > l/2} |Q|²`, a box-truncation quality metric.
    pub tail_mass: f64,
    /// Whether `(d, s, p)` lies in the below-threshold scattering window.
    pub in_regime: bool,
}

/// Flat JSON form of a [`GroundStateReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateSummary {
    pub d: usize,
    pub n: usize,
    pub l: f64,
    pub s: f64,
    pub p: f64,
    pub mass: f64,
    pub hs: f64,
    pub lp1: f64,
    pub energy: f64,
    pub gn_const: f64,
    pub residual: f64,
    pub iterations: usize,
    pub tail_mass: f64,
}

impl GroundStateReport {
    pub fn summary(&self) -> GroundStateSummary {
        let grid = self.q.grid();
        GroundStateSummary {
            d: grid.dim(),
            n: grid.n(),
            l: grid.half_len(),
            s: self.params.s,
            p: self.params.p,
            mass: self.mass,
            hs: self.hs,
            lp1: self.lp1,
            energy: self.energy,
            gn_const: self.gn_const,
            residual: self.residual,
            iterations: self.iterations,
            tail_mass: self.tail_mass,
        }
    }

    pub fn dim(&self) -> usize {
        self.q.grid().dim()
    }

    /// `‖Q‖_{L²}`.
    pub fn l2(&self) -> f64 {
        self.mass.sqrt()
    }
}

/// Exponents `(a, b)` of `‖u‖_{Ḣ^s}^a ‖u‖_{L²}^b` in the Gagliardo–Nirenberg
/// inequality: `a = d(p-1)/(2s)`, `b = p + 1 - a`.
pub fn gn_exponents(d: usize, params: &PhysParams) -> (f64, f64) {
    let a = d as f64 * (params.p - 1.0) / (2.0 * params.s);
    (a, params.p + 1.0 - a)
}

/// Gagliardo–Nirenberg quotient `‖v‖^{p+1}_{L^{p+1}} / (‖v‖_{Ḣ^s}^a ‖v‖_{L²}^b)`.
///
/// The ground state maximises it; its value there is `C(d, p, s)`.
pub fn gn_quotient(v: &ComplexField, params: &PhysParams) -> Result<f64> {
    let hs = sobolev_seminorm_sq(v, params.s).sqrt();
    let l2 = v.norm_sq().sqrt();
    let pot = power_integral(v, params.p + 1.0);
    gn_from_norms(v.grid().dim(), params, pot, hs, l2)
}

fn gn_from_norms(d: usize, params: &PhysParams, pot: f64, hs: f64, l2: f64) -> Result<f64> {
    if !(hs > 0.0 && l2 > 0.0) {
        return Err(Error::Degenerate(
            "Gagliardo–Nirenberg quotient of a zero field".into(),
        ));
    }
    let (a, b) = gn_exponents(d, params);
    Ok(pot / (hs.powf(a) * l2.powf(b)))
}

/// `C(d, p, s)` from a converged report.
pub fn gn_constant(report: &GroundStateReport) -> Result<f64> {
    let pot = report.lp1.powf(report.params.p + 1.0);
    gn_from_norms(report.dim(), &report.params, pot, report.hs, report.l2())
}

/// `‖(-Δ)^s q + q - |q|^{p-1} q‖_{L²}`.
pub fn elliptic_residual(q: &ComplexField, params: &PhysParams) -> f64 {
    let grid = q.grid();
    let phys = q.to_physical();
    let mut nonlin: Vec<Complex64> = phys
        .values()
        .par_iter()
        .map(|v| v * v.norm().powf(params.p - 1.0))
        .collect();
    grid.forward(&mut nonlin);
    let qhat = q.to_spectral();
    let sum: f64 = qhat
        .values()
        .par_iter()
        .zip(nonlin.par_iter())
        .zip(grid.k_sq().par_iter())
        .map(|((qh, nh), &k2)| (qh * (power_symbol(k2, 2.0 * params.s) + 1.0) - nh).norm_sqr())
        .det_sum();
    (sum * grid.cell_volume() / grid.len() as f64).sqrt()
}

/// Default initial guess `2 e^{-|x|²}`.
pub fn default_initial_guess(grid: &Arc<Grid>) -> ComplexField {
    ComplexField::gaussian(grid, 2.0, 1.0)
}

/// Petviashvili iteration
/// `Q_{n+1} = S_n^γ ((-Δ)^s + 1)^{-1} (Q_n^p)`, `S_n = ⟨((-Δ)^s+1)Q_n, Q_n⟩ / ⟨Q_n^p, Q_n⟩`,
/// `γ = p/(p-1)`.
pub fn petviashvili_solve(
    params: &PhysParams,
    init: &ComplexField,
    opts: &PetviashviliOptions,
) -> Result<GroundStateReport> {
    if params.sign != Sign::Focusing {
        return Err(Error::param(
            "sign",
            "ground states exist only in the focusing case",
        ));
    }
    init.ensure_finite()?;
    let grid = Arc::clone(init.grid());
    let symmetrize = opts.symmetrize.unwrap_or(grid.dim() >= 2);
    let gamma = params.p / (params.p - 1.0);
    let two_s = 2.0 * params.s;
    let dxd = grid.cell_volume();
    let spec_w = dxd / grid.len() as f64;
    let symbol: Vec<f64> = grid
        .k_sq()
        .iter()
        .map(|&k2| power_symbol(k2, two_s) + 1.0)
        .collect();
    let orbit = if symmetrize {
        Some(SymmetryOrbits::new(&grid))
    } else {
        None
    };

    let mut q: Vec<f64> = init.real_part();
    if q.iter().all(|v| v.abs() < 1e-12) {
        return Err(Error::Collapse { iteration: 0 });
    }
    let mut residual = f64::INFINITY;
    for iteration in 0..=opts.max_iter {
        let nonlin_real: Vec<f64> = q
            .par_iter()
            .map(|&v| v * v.abs().powf(params.p - 1.0))
            .collect();
        let mut qhat: Vec<Complex64> = q.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut nhat: Vec<Complex64> = nonlin_real
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        grid.forward(&mut qhat);
        grid.forward(&mut nhat);

        let res_sq: f64 = qhat
            .par_iter()
            .zip(nhat.par_iter())
            .zip(symbol.par_iter())
            .map(|((qh, nh), l)| (qh * l - nh).norm_sqr())
            .det_sum();
        residual = (res_sq * spec_w).sqrt();
        if !residual.is_finite() {
            return Err(Error::NonFinite);
        }
        if residual <= opts.tol {
            let q_field = ComplexField::from_values(
                &grid,
                q.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
                Space::Physical,
            )?;
            return Ok(build_report(q_field, params, residual, iteration));
        }
        if iteration == opts.max_iter {
            break;
        }

        let num: f64 = qhat
            .par_iter()
            .zip(symbol.par_iter())
            .map(|(qh, l)| l * qh.norm_sqr())
            .det_sum()
            * spec_w;
        let den: f64 = nonlin_real
            .par_iter()
            .zip(q.par_iter())
            .map(|(a, b)| a * b)
            .det_sum()
            * dxd;
        let stab = num / den;
        if !(stab.is_finite() && stab > 0.0) {
            return Err(Error::Collapse { iteration });
        }
        let factor = stab.powf(gamma);
        for (nh, l) in nhat.iter_mut().zip(&symbol) {
            *nh *= factor / l;
        }
        grid.inverse(&mut nhat);
        q = nhat.iter().map(|v| v.re).collect();
        if let Some(orbit) = &orbit {
            orbit.average(&mut q);
        }
        let peak = q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if peak < 1e-12 {
            return Err(Error::Collapse { iteration });
        }
    }
    Err(Error::NotConverged {
        iterations: opts.max_iter,
        residual,
    })
}

/// Populate a report from a profile `q` (used by the solver; also handy for
/// exact profiles in tests).
pub fn build_report(
    q: ComplexField,
    params: &PhysParams,
    residual: f64,
    iterations: usize,
) -> GroundStateReport {
    let grid = Arc::clone(q.grid());
    let (mass, energy) = mass_energy(&q, params);
    let hs = sobolev_seminorm_sq(&q, params.s).sqrt();
    let lp1 = lebesgue_norm(&q, params.p + 1.0).unwrap_or(f64::NAN);
    let pot = lp1.powf(params.p + 1.0);
    let gn_const = gn_from_norms(grid.dim(), params, pot, hs, mass.sqrt()).unwrap_or(f64::NAN);
    let half = 0.5 * grid.half_len();
    let radii = grid.radii();
    let phys = q.to_physical();
    let tail_mass: f64 = phys
        .values()
        .iter()
        .zip(&radii)
        .filter(|(_, &r)| r > half)
        .map(|(v, _)| v.norm_sqr())
        .sum::<f64>()
        * grid.cell_volume();
    GroundStateReport {
        in_regime: params.in_scattering_regime(grid.dim()),
        q,
        params: *params,
        mass,
        hs,
        lp1,
        energy,
        gn_const,
        residual,
        iterations,
        tail_mass,
    }
}

/// Relative discrepancy between `‖Q‖_{Ḣ^s}^{s_c} ‖Q‖_{L²}^{s-s_c}` and the
/// closed form `((2d + 4(s - s_c)) / (2d C(d,p,s)))^{(d - 2 s_c)/4}`.
pub fn pohozaev_soliton_check(report: &GroundStateReport, params: &PhysParams) -> Result<f64> {
    let d = report.dim();
    let sc = params.critical_index(d);
    let s = params.s;
    if !(sc > 0.0 && sc < s) {
        return Err(Error::OutOfRegime(format!(
            "soliton identity needs 0 < s_c < s, got s_c = {sc}"
        )));
    }
    let c = gn_constant(report)?;
    let df = d as f64;
    let lhs = report.hs.powf(sc) * report.l2().powf(s - sc);
    let rhs = ((2.0 * df + 4.0 * (s - sc)) / (2.0 * df * c)).powf((df - 2.0 * sc) / 4.0);
    Ok((lhs - rhs).abs() / rhs)
}

/// Orbits of the grid's hyperoctahedral symmetry group (axis reflections
/// `j ↦ -j mod n` about the origin index and axis permutations).
pub(crate) struct SymmetryOrbits {
    /// Orbit id per point.
    id: Vec<usize>,
    size: Vec<usize>,
}

impl SymmetryOrbits {
    pub(crate) fn new(grid: &Grid) -> Self {
        let n = grid.n();
        let d = grid.dim();
        let half = n / 2;
        let mut key_to_id = std::collections::HashMap::new();
        let mut id = Vec::with_capacity(grid.len());
        let mut size = Vec::new();
        for idx in 0..grid.len() {
            let ij = grid.unravel(idx);
            // distance from the origin index on the periodic lattice
            let mut key = [0usize; 3];
            for axis in 0..d {
                let off = (ij[axis] + n - half) % n;
                key[axis] = off.min(n - off);
            }
            key[..d].sort_unstable();
            let next = size.len();
            let orbit = *key_to_id.entry(key).or_insert(next);
            if orbit == next {
                size.push(0);
            }
            size[orbit] += 1;
            id.push(orbit);
        }
        SymmetryOrbits { id, size }
    }

    pub(crate) fn average(&self, values: &mut [f64]) {
        let mut acc = vec![0.0; self.size.len()];
        for (v, &o) in values.iter().zip(&self.id) {
            acc[o] += v;
        }
        for (a, &s) in acc.iter_mut().zip(&self.size) {
            *a /= s as f64;
        }
        for (v, &o) in values.iter_mut().zip(&self.id) {
            *v = acc[o];
        }
    }
}
