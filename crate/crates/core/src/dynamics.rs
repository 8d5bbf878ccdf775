//! Strang-split time integration with the exact linear propagator, plus the
//! conservation, blow-up and scattering monitors recorded along a run.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, LambdaQuadrature, VirialWeight};
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::ground_state::GroundStateReport;
use crate::norms::{power_integral, sobolev_norm};
use crate::params::{PhysParams, NONLINEAR_PHASE_SIGN};
use crate::reduce::DetSum;
use crate::spectral::power_symbol;

/// `e^{-it(-Δ)^s} u`.
pub fn linear_propagate(u: &ComplexField, t: f64, params: &PhysParams) -> ComplexField {
    let two_s = 2.0 * params.s;
    u.apply_symbol(|k2| Complex64::from_polar(1.0, -t * power_symbol(k2, two_s)))
}

/// Exact flow of `i u_t = -μ|u|^{p-1} u` over `dt`.
pub fn nonlinear_phase_step(u: &ComplexField, dt: f64, params: &PhysParams) -> ComplexField {
    let rate = NONLINEAR_PHASE_SIGN * params.sign.mu() * dt;
    let pm1 = params.p - 1.0;
    u.map(|v| v * Complex64::from_polar(1.0, rate * v.norm().powf(pm1)))
}

/// One Strang step: half nonlinear phase, full linear flow, half nonlinear phase.
pub fn strang_step(u: &ComplexField, dt: f64, params: &PhysParams) -> Result<ComplexField> {
    let half = nonlinear_phase_step(u, 0.5 * dt, params);
    let lin = linear_propagate(&half, dt, params);
    let out = nonlinear_phase_step(&lin, 0.5 * dt, params);
    out.ensure_finite()?;
    Ok(out)
}

/// Strang integrator with the linear multiplier cached for a fixed `dt`.
pub struct SplitStepper {
    grid: Arc<Grid>,
    params: PhysParams,
    dt: f64,
    linear: Vec<Complex64>,
}

impl SplitStepper {
    pub fn new(grid: &Arc<Grid>, params: &PhysParams, dt: f64) -> Self {
        let two_s = 2.0 * params.s;
        let linear = grid
            .k_sq()
            .par_iter()
            .map(|&k2| Complex64::from_polar(1.0, -dt * power_symbol(k2, two_s)))
            .collect();
        SplitStepper {
            grid: Arc::clone(grid),
            params: *params,
            dt,
            linear,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn half_phase(&self, values: &mut [Complex64]) {
        let rate = NONLINEAR_PHASE_SIGN * self.params.sign.mu() * 0.5 * self.dt;
        let half_pm1 = 0.5 * (self.params.p - 1.0);
        let cubic = half_pm1 == 1.0;
        values.par_iter_mut().for_each(|v| {
            let a2 = v.norm_sqr();
            let (sin, cos) = (rate * if cubic { a2 } else { a2.powf(half_pm1) }).sin_cos();
            *v *= Complex64::new(cos, sin);
        });
    }

    /// Advance physical-space values by one step in place.
    pub fn step_values(&self, values: &mut [Complex64]) {
        self.half_phase(values);
        self.grid.forward(values);
        values
            .par_iter_mut()
            .zip(self.linear.par_iter())
            .for_each(|(v, m)| *v *= m);
        self.grid.inverse(values);
        self.half_phase(values);
    }

    pub fn step(&self, u: &ComplexField) -> Result<ComplexField> {
        let mut out = u.to_physical();
        self.step_values(out.values_mut());
        out.ensure_finite()?;
        Ok(out)
    }

    /// Advance `steps` steps.
    pub fn advance(&self, u: &ComplexField, steps: usize) -> Result<ComplexField> {
        let mut out = u.to_physical();
        for _ in 0..steps {
            self.step_values(out.values_mut());
        }
        out.ensure_finite()?;
        Ok(out)
    }
}

/// `‖e^{+it₂(-Δ)^s} u(t₂) - e^{+it₁(-Δ)^s} u(t₁)‖_{H^s}`, the Cauchy increment
/// of the interaction-picture profile.
pub fn wave_operator_residual(
    u_t1: &ComplexField,
    u_t2: &ComplexField,
    t1: f64,
    t2: f64,
    params: &PhysParams,
) -> Result<f64> {
    if !(t2 > t1 && t1 >= 0.0) {
        return Err(Error::param(
            "t2",
            format!("need t2 > t1 >= 0, got t1={t1}, t2={t2}"),
        ));
    }
    if !u_t1.same_grid(u_t2) {
        return Err(Error::GridMismatch);
    }
    let a = linear_propagate(u_t2, -t2, params);
    let b = linear_propagate(u_t1, -t1, params);
    Ok(sobolev_norm(
        &a.add_scaled(&b, Complex64::new(-1.0, 0.0))?,
        params.s,
    ))
}

/// Time until the fastest resolved wave crosses the box:
/// `2l / max_k (2s |k|^{2s-1})` over the resolved band `[π/l, k_Nyquist]`.
pub fn wrap_horizon(grid: &Grid, params: &PhysParams) -> f64 {
    let speed = |k: f64| 2.0 * params.s * k.powf(2.0 * params.s - 1.0);
    let vmax = speed(grid.k_nyquist()).max(speed(grid.dk()));
    2.0 * grid.half_len() / vmax
}

/// Fraction of `Σ|û|²` carried by modes with some `|k_j|` above two thirds of Nyquist.
pub fn spectral_tail_fraction(u: &ComplexField) -> f64 {
    let hat = u.to_spectral();
    tail_fraction_of(hat.values(), u.grid())
}

fn tail_fraction_of(hat: &[Complex64], grid: &Grid) -> f64 {
    let cut = 2.0 / 3.0 * grid.k_nyquist();
    let (tail, total) = hat
        .par_iter()
        .enumerate()
        .map(|(idx, v)| {
            let k = grid.wavevector(idx);
            let kmax = k.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            let w = v.norm_sqr();
            if kmax > cut {
                (w, w)
            } else {
                (0.0, w)
            }
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Steps between diagnostic records.
    pub callback_stride: usize,
    /// Abort once `‖u‖_{Ḣ^s}` exceeds this multiple of its initial value.
    pub blowup_hs_factor: f64,
    /// Abort once the spectral tail fraction exceeds this.
    pub tail_fraction_max: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            dt: 1e-3,
            t_end: 1.0,
            callback_stride: 10,
            blowup_hs_factor: 10.0,
            tail_fraction_max: 0.01,
        }
    }
}

impl EvolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::param("dt", "must be positive"));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::param("t_end", "must be positive"));
        }
        if self.callback_stride == 0 {
            return Err(Error::param("callback_stride", "must be at least 1"));
        }
        if !(self.blowup_hs_factor > 1.0) {
            return Err(Error::param("blowup_hs_factor", "must exceed 1"));
        }
        if !(self.tail_fraction_max > 0.0 && self.tail_fraction_max < 1.0) {
            return Err(Error::param("tail_fraction_max", "must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum BlowupReason {
    HsGrowth { ratio: f64 },
    SpectralTail { fraction: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    BlowupDetected { t: f64, cause: BlowupReason },
}

impl RunStatus {
    pub fn is_blowup(&self) -> bool {
        matches!(self, RunStatus::BlowupDetected { .. })
    }
}

/// Per-record diagnostics. Every column has one entry per record; columns
/// that were not requested hold `NaN`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub t: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    pub hs_norm: Vec<f64>,
    pub concentration_radii: Vec<f64>,
    /// `concentration[i][r]` is `∫_{|x| ≤ R_i} |u|²` at record `r`.
    pub concentration: Vec<Vec<f64>>,
    pub m_phi: Vec<f64>,
    pub virial_rhs: Vec<f64>,
    pub y_coercivity: Vec<f64>,
    pub scatter_residual: Vec<f64>,
    /// Radii `R` at which `∫_{|x| ≤ R/2} |u|^{p+1}` was recorded.
    pub potential_radii: Vec<f64>,
    pub local_potential: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Columns in CSV order, named as in the header.
    pub fn columns(&self) -> Vec<(String, Vec<f64>)> {
        let mut cols = vec![
            ("t".to_string(), self.t.clone()),
            ("mass".into(), self.mass.clone()),
            ("energy".into(), self.energy.clone()),
            ("hs_norm".into(), self.hs_norm.clone()),
        ];
        for (i, c) in self.concentration.iter().enumerate() {
            cols.push((format!("conc_R{}", i + 1), c.clone()));
        }
        cols.push(("m_phi".into(), self.m_phi.clone()));
        cols.push(("virial_rhs".into(), self.virial_rhs.clone()));
        cols.push(("y".into(), self.y_coercivity.clone()));
        cols.push(("scatter_residual".into(), self.scatter_residual.clone()));
        cols
    }

    pub fn csv_header(&self) -> String {
        let names: Vec<String> = self.columns().into_iter().map(|(n, _)| n).collect();
        names.join(",")
    }

    pub fn to_csv(&self) -> String {
        let cols = self.columns();
        let mut out = self.csv_header();
        out.push('\n');
        for r in 0..self.len() {
            let line: Vec<String> = cols.iter().map(|(_, v)| format!("{:e}", v[r])).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    /// Index of the recorded potential radius closest to `r`.
    pub fn potential_index(&self, r: f64) -> Option<usize> {
        self.potential_radii
            .iter()
            .position(|&x| (x - r).abs() <= 1e-12 * r.abs().max(1.0))
    }
}

/// Virial monitor: records `M_φ` and, when a quadrature is supplied, the
/// resolvent-representation right-hand side of its time derivative.
#[derive(Clone, Copy)]
pub struct VirialProbe<'a> {
    pub weight: &'a VirialWeight,
    pub quadrature: Option<&'a LambdaQuadrature>,
}

/// What to record along a run.
#[derive(Clone, Default)]
pub struct Monitors<'a> {
    pub concentration_radii: Vec<f64>,
    pub potential_radii: Vec<f64>,
    pub virial: Option<VirialProbe<'a>>,
    /// Enables the coercivity column `y(t)`.
    pub ground_state: Option<&'a GroundStateReport>,
    /// Times at which to keep a copy of the state (matched to the nearest step).
    pub snapshot_times: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub series: TimeSeries,
    pub status: RunStatus,
    pub snapshots: Vec<(f64, ComplexField)>,
    pub final_state: ComplexField,
    pub t_final: f64,
    /// Wrap-around horizon of the box; scattering diagnostics are trusted only before it.
    pub t_wrap: f64,
}

pub fn evolve(
    u0: &ComplexField,
    cfg: &EvolveConfig,
    params: &PhysParams,
    monitors: &Monitors<'_>,
) -> Result<Evolution> {
    evolve_with(u0, cfg, params, monitors, |_, _| {})
}

/// [`evolve`] with a hook receiving `(t, state)` at every record.
pub fn evolve_with<F>(
    u0: &ComplexField,
    cfg: &EvolveConfig,
    params: &PhysParams,
    monitors: &Monitors<'_>,
    mut hook: F,
) -> Result<Evolution>
where
    F: FnMut(f64, &ComplexField),
{
    cfg.validate()?;
    u0.ensure_finite()?;
    let grid = Arc::clone(u0.grid());
    let stepper = SplitStepper::new(&grid, params, cfg.dt);
    let steps = cfg.steps();
    let mut recorder = Recorder::new(&grid, params, monitors);

    let mut state = u0.to_physical();
    let mut snapshots = Vec::new();
    let mut pending: Vec<(usize, f64)> = monitors
        .snapshot_times
        .iter()
        .map(|&ts| ((ts / cfg.dt).round() as usize, ts))
        .collect();
    pending.sort_by_key(|p| std::cmp::Reverse(p.0));

    let mut status = RunStatus::Completed;
    let mut k = 0usize;
    loop {
        let t = k as f64 * cfg.dt;
        while pending.last().is_some_and(|&(ks, _)| ks == k) {
            pending.pop();
            snapshots.push((t, state.clone()));
        }
        if k.is_multiple_of(cfg.callback_stride) || k == steps {
            if !state.is_finite() {
                return Err(Error::NonFinite);
            }
            let check = recorder.record(t, &state);
            hook(t, &state);
            if let Some(cause) = check.blowup(cfg) {
                status = RunStatus::BlowupDetected { t, cause };
                break;
            }
        }
        if k == steps {
            break;
        }
        stepper.step_values(state.values_mut());
        k += 1;
    }

    Ok(Evolution {
        series: recorder.series,
        status,
        snapshots,
        t_final: k as f64 * cfg.dt,
        final_state: state,
        t_wrap: wrap_horizon(&grid, params),
    })
}

struct RecordCheck {
    hs_ratio: f64,
    tail: f64,
}

impl RecordCheck {
    fn blowup(&self, cfg: &EvolveConfig) -> Option<BlowupReason> {
        if self.hs_ratio > cfg.blowup_hs_factor {
            Some(BlowupReason::HsGrowth {
                ratio: self.hs_ratio,
            })
        } else if self.tail > cfg.tail_fraction_max {
            Some(BlowupReason::SpectralTail {
                fraction: self.tail,
            })
        } else {
            None
        }
    }
}

struct Recorder<'a> {
    grid: Arc<Grid>,
    params: PhysParams,
    monitors: &'a Monitors<'a>,
    radii: Vec<f64>,
    series: TimeSeries,
    hs0: Option<f64>,
    prev_profile: Option<Vec<Complex64>>,
}

impl<'a> Recorder<'a> {
    fn new(grid: &Arc<Grid>, params: &PhysParams, monitors: &'a Monitors<'a>) -> Self {
        let series = TimeSeries {
            concentration_radii: monitors.concentration_radii.clone(),
            concentration: vec![Vec::new(); monitors.concentration_radii.len()],
            potential_radii: monitors.potential_radii.clone(),
            local_potential: vec![Vec::new(); monitors.potential_radii.len()],
            ..Default::default()
        };
        Recorder {
            grid: Arc::clone(grid),
            params: *params,
            monitors,
            radii: grid.radii(),
            series,
            hs0: None,
            prev_profile: None,
        }
    }

    fn record(&mut self, t: f64, state: &ComplexField) -> RecordCheck {
        let grid = &self.grid;
        let params = &self.params;
        let dxd = grid.cell_volume();
        let spec_w = dxd / grid.len() as f64;
        let hat = state.to_spectral();
        let two_s = 2.0 * params.s;

        let mass: f64 = state.values().par_iter().map(|v| v.norm_sqr()).det_sum() * dxd;
        let hs_sq: f64 = hat
            .values()
            .par_iter()
            .zip(grid.k_sq().par_iter())
            .map(|(v, &k2)| power_symbol(k2, two_s) * v.norm_sqr())
            .det_sum()
            * spec_w;
        let hs = hs_sq.sqrt();
        let potential = power_integral(state, params.p + 1.0);
        let energy = 0.5 * hs_sq - params.sign.mu() * potential / (params.p + 1.0);
        let tail = tail_fraction_of(hat.values(), grid);

        self.series.t.push(t);
        self.series.mass.push(mass);
        self.series.energy.push(energy);
        self.series.hs_norm.push(hs);

        for (i, &r) in self.monitors.concentration_radii.iter().enumerate() {
            self.series.concentration[i]
                .push(local_sum(state.values(), &self.radii, r, |v| v.norm_sqr()) * dxd);
        }
        let q = params.p + 1.0;
        for (i, &r) in self.monitors.potential_radii.iter().enumerate() {
            self.series.local_potential[i]
                .push(local_sum(state.values(), &self.radii, 0.5 * r, |v| v.norm().powf(q)) * dxd);
        }

        let (m_phi, rhs) = match &self.monitors.virial {
            Some(probe) => {
                let m = diagnostics::virial_bracket(state, probe.weight);
                let rhs = probe
                    .quadrature
                    .map(|quad| diagnostics::virial_rhs(state, probe.weight, params, quad))
                    .unwrap_or(f64::NAN);
                (m, rhs)
            }
            None => (f64::NAN, f64::NAN),
        };
        self.series.m_phi.push(m_phi);
        self.series.virial_rhs.push(rhs);

        let y = match self.monitors.ground_state {
            Some(gs) => {
                let sc = params.critical_index(grid.dim());
                if sc > 0.0 {
                    let expo = (params.s - sc) / sc;
                    hs * mass.sqrt().powf(expo) / (gs.hs * gs.l2().powf(expo))
                } else {
                    f64::NAN
                }
            }
            None => f64::NAN,
        };
        self.series.y_coercivity.push(y);

        // interaction-picture profile e^{+it(-Δ)^s} û
        let profile: Vec<Complex64> = hat
            .values()
            .par_iter()
            .zip(grid.k_sq().par_iter())
            .map(|(v, &k2)| v * Complex64::from_polar(1.0, t * power_symbol(k2, two_s)))
            .collect();
        let incr = match &self.prev_profile {
            Some(prev) => {
                let sum: f64 = profile
                    .par_iter()
                    .zip(prev.par_iter())
                    .zip(grid.k_sq().par_iter())
                    .map(|((a, b), &k2)| (1.0 + k2).powf(params.s) * (a - b).norm_sqr())
                    .det_sum();
                (sum * spec_w).sqrt()
            }
            None => 0.0,
        };
        self.series.scatter_residual.push(incr);
        self.prev_profile = Some(profile);

        let hs0 = *self.hs0.get_or_insert(hs);
        RecordCheck {
            hs_ratio: if hs0 > 0.0 { hs / hs0 } else { 1.0 },
            tail,
        }
    }
}

fn local_sum<F>(values: &[Complex64], radii: &[f64], r: f64, f: F) -> f64
where
    F: Fn(&Complex64) -> f64 + Sync,
{
    values
        .par_iter()
        .zip(radii.par_iter())
        .filter(|(_, &rad)| rad <= r)
        .map(|(v, _)| f(v))
        .det_sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::mass_energy;
    use crate::params::Sign;
    use std::f64::consts::PI;

    fn params(s: f64, sign: Sign) -> PhysParams {
        PhysParams::new(s, 3.0, sign).unwrap()
    }

    #[test]
    fn propagate_identity_and_plane_wave_phase() {
        let grid = Grid::new(2, 16, PI).unwrap();
        let prm = params(0.7, Sign::Focusing);
        let u = ComplexField::plane_wave(&grid, 1.0, &[1, 2]).unwrap();
        assert!(linear_propagate(&u, 0.0, &prm).max_rel_diff(&u) < 1e-15);
        let t = 0.37;
        let v = linear_propagate(&u, t, &prm);
        let phase = Complex64::from_polar(1.0, -5f64.powf(0.7) * t);
        let expected = u.map(|z| z * phase);
        assert!(v.max_rel_diff(&expected) < 1e-13);
    }

    #[test]
    fn propagate_group_property() {
        let grid = Grid::new(1, 128, 10.0).unwrap();
        let prm = params(0.6, Sign::Focusing);
        let u = ComplexField::gaussian(&grid, 1.0, 1.5);
        let a = linear_propagate(&linear_propagate(&u, 0.3, &prm), 0.45, &prm);
        let b = linear_propagate(&u, 0.75, &prm);
        assert!(a.max_rel_diff(&b) < 1e-12);
    }

    #[test]
    fn nonlinear_phase_is_unitary_and_reversible() {
        let grid = Grid::new(1, 64, 5.0).unwrap();
        let prm = params(0.8, Sign::Focusing);
        let u = ComplexField::from_fn(&grid, |x| {
            Complex64::new((-x[0] * x[0]).exp() * 1.7, 0.4 * x[0].sin())
        });
        let v = nonlinear_phase_step(&u, 0.21, &prm);
        for (a, b) in u.values().iter().zip(v.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-14);
        }
        let back = nonlinear_phase_step(&v, -0.21, &prm);
        assert!(back.max_rel_diff(&u) < 1e-14);
    }

    #[test]
    fn constant_field_picks_up_global_phase() {
        let grid = Grid::new(1, 16, 1.0).unwrap();
        let a = 1.3;
        let dt = 0.1;
        for sign in [Sign::Focusing, Sign::Defocusing] {
            let prm = params(0.5, sign);
            let u = ComplexField::from_real_fn(&grid, |_| a);
            let v = nonlinear_phase_step(&u, dt, &prm);
            let expected = Complex64::from_polar(a, sign.mu() * dt * a * a);
            assert!((v.values()[5] - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn strang_keeps_zero_and_mass() {
        let grid = Grid::new(2, 32, 6.0).unwrap();
        let prm = params(0.75, Sign::Focusing);
        let zero = ComplexField::zeros(&grid);
        let z = strang_step(&zero, 0.01, &prm).unwrap();
        assert!(z.values().iter().all(|v| v.norm() == 0.0));

        let u = ComplexField::gaussian(&grid, 1.5, 1.0);
        let m0 = u.norm_sq();
        let v = strang_step(&u, 0.01, &prm).unwrap();
        assert!(((v.norm_sq() - m0) / m0).abs() < 1e-14);
    }

    #[test]
    fn stepper_matches_free_functions() {
        let grid = Grid::new(1, 128, 8.0).unwrap();
        let prm = params(0.65, Sign::Defocusing);
        let u = ComplexField::gaussian(&grid, 1.2, 1.0);
        let a = strang_step(&u, 0.02, &prm).unwrap();
        let b = SplitStepper::new(&grid, &prm, 0.02).step(&u).unwrap();
        assert!(a.max_rel_diff(&b) < 1e-13);
    }

    #[test]
    fn plane_wave_dispersion_relation() {
        let grid = Grid::new(1, 32, PI).unwrap();
        let (amp, k, t_end) = (0.9f64, 3isize, 1.0);
        for sign in [Sign::Focusing, Sign::Defocusing] {
            let prm = params(0.6, sign);
            let u0 = ComplexField::plane_wave(&grid, amp, &[k]).unwrap();
            let omega = sign.mu() * amp.powi(2) - (k as f64).powf(1.2);
            let exact = u0.map(|z| z * Complex64::from_polar(1.0, omega * t_end));
            for dt in [0.1, 0.05, 0.025] {
                let steps = (t_end / dt).round() as usize;
                let u = SplitStepper::new(&grid, &prm, dt)
                    .advance(&u0, steps)
                    .unwrap();
                assert!(u.max_rel_diff(&exact) <= 1e-12, "dt={dt}");
            }
        }
    }

    #[test]
    fn time_reversal() {
        let grid = Grid::new(1, 256, 15.0).unwrap();
        let prm = params(0.8, Sign::Focusing);
        let u0 = ComplexField::gaussian(&grid, 1.5, 1.0);
        let fwd = SplitStepper::new(&grid, &prm, 0.01)
            .advance(&u0, 200)
            .unwrap();
        let back = SplitStepper::new(&grid, &prm, -0.01)
            .advance(&fwd, 200)
            .unwrap();
        assert!(back.rel_l2_diff(&u0) < 1e-8);
    }

    #[test]
    fn linear_profile_has_zero_wave_operator_residual() {
        let grid = Grid::new(1, 128, 10.0).unwrap();
        let prm = params(0.7, Sign::Focusing);
        let u0 = ComplexField::gaussian(&grid, 1.0, 1.0);
        let u1 = linear_propagate(&u0, 0.5, &prm);
        let u2 = linear_propagate(&u0, 1.7, &prm);
        let r = wave_operator_residual(&u1, &u2, 0.5, 1.7, &prm).unwrap();
        assert!(r < 1e-12);
        assert!(wave_operator_residual(&u1, &u2, 1.7, 0.5, &prm).is_err());
    }

    #[test]
    fn evolve_records_consistent_series() {
        let grid = Grid::new(1, 256, 20.0).unwrap();
        let prm = params(0.75, Sign::Defocusing);
        let u0 = ComplexField::gaussian(&grid, 1.0, 1.5);
        let cfg = EvolveConfig {
            dt: 0.01,
            t_end: 1.0,
            callback_stride: 7,
            ..Default::default()
        };
        let monitors = Monitors {
            concentration_radii: vec![2.0, 100.0],
            snapshot_times: vec![0.5],
            ..Default::default()
        };
        let evo = evolve(&u0, &cfg, &prm, &monitors).unwrap();
        let s = &evo.series;
        assert_eq!(evo.status, RunStatus::Completed);
        assert!((evo.t_final - 1.0).abs() < 1e-12);
        assert!(s.t.windows(2).all(|w| w[1] > w[0]));
        for col in [
            &s.mass,
            &s.energy,
            &s.hs_norm,
            &s.m_phi,
            &s.y_coercivity,
            &s.scatter_residual,
        ] {
            assert_eq!(col.len(), s.len());
        }
        assert_eq!(*s.t.last().unwrap(), 1.0);
        // whole-box radius reproduces the mass
        for (c, m) in s.concentration[1].iter().zip(&s.mass) {
            assert!((c - m).abs() < 1e-12 * m);
        }
        assert_eq!(evo.snapshots.len(), 1);
        let (m, e) = mass_energy(&evo.final_state, &prm);
        assert!((m - s.mass.last().unwrap()).abs() < 1e-12);
        assert!((e - s.energy.last().unwrap()).abs() < 1e-12);
        assert!(
            s.csv_header()
                == "t,mass,energy,hs_norm,conc_R1,conc_R2,m_phi,virial_rhs,y,scatter_residual"
        );
    }

    #[test]
    fn config_validation() {
        let bad = EvolveConfig {
            dt: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = EvolveConfig {
            tail_fraction_max: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = EvolveConfig {
            blowup_hs_factor: 0.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
