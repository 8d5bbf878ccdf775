//! Classification of initial data against the ground-state thresholds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::ground_state::GroundStateReport;
use crate::norms::{mass_energy, sobolev_seminorm_sq};
use crate::params::{PhysParams, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// `E ≥ 0`, energy ratio < 1 and kinetic ratio < 1.
    ScatterCandidate,
    /// Energy ratio < 1 and kinetic ratio > 1.
    BlowupCandidate,
    /// Neither ratio condition holds (includes the boundary case `u₀ = Q`).
    AboveThreshold,
    NegativeEnergyBlowup,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    /// `E[u₀]^{s_c} M[u₀]^{s-s_c} / (E[Q]^{s_c} M[Q]^{s-s_c})`; carries the sign of `E[u₀]`.
    pub energy_ratio: f64,
    /// `‖u₀‖_{Ḣ^s}^{s_c} ‖u₀‖_{L²}^{s-s_c} / (‖Q‖_{Ḣ^s}^{s_c} ‖Q‖_{L²}^{s-s_c})`.
    pub kinetic_ratio: f64,
    pub energy: f64,
    pub classification: Classification,
}

/// Compare `u0` with the ground state. Energies use the focusing sign
/// regardless of `params.sign`.
pub fn classify_initial_data(
    u0: &ComplexField,
    report: &GroundStateReport,
    params: &PhysParams,
) -> Result<ThresholdReport> {
    let d = u0.grid().dim();
    let sc = params.critical_index(d);
    let s = params.s;
    if sc <= 0.0 {
        return Err(Error::OutOfRegime(format!(
            "threshold needs s_c > 0, got {sc}"
        )));
    }
    let focusing = params.with_sign(Sign::Focusing);
    let (mass, energy) = mass_energy(u0, &focusing);
    let hs = sobolev_seminorm_sq(u0, s).sqrt();

    let q_energy_term = report.energy.powf(sc) * report.mass.powf(s - sc);
    let energy_ratio = energy.signum() * energy.abs().powf(sc) * mass.powf(s - sc) / q_energy_term;
    let kinetic_ratio =
        hs.powf(sc) * mass.sqrt().powf(s - sc) / (report.hs.powf(sc) * report.l2().powf(s - sc));

    let classification = if energy < 0.0 {
        Classification::NegativeEnergyBlowup
    } else if energy_ratio < 1.0 && kinetic_ratio < 1.0 {
        Classification::ScatterCandidate
    } else if energy_ratio < 1.0 && kinetic_ratio > 1.0 {
        Classification::BlowupCandidate
    } else {
        Classification::AboveThreshold
    };
    Ok(ThresholdReport {
        energy_ratio,
        kinetic_ratio,
        energy,
        classification,
    })
}
