//! Physical parameters of the fractional NLS `i u_t - (-Δ)^s u = -μ |u|^{p-1} u`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign convention of the nonlinear phase.
///
/// The nonlinear sub-flow is `u ← u · exp(i · NONLINEAR_PHASE_SIGN · μ · dt · |u|^{p-1})`
/// with `μ = +1` focusing and `μ = -1` defocusing. Flipping this constant flips
/// the Duhamel convention everywhere at once.
pub const NONLINEAR_PHASE_SIGN: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Focusing,
    Defocusing,
}

impl Sign {
    /// `μ`: +1 for focusing, -1 for defocusing.
    pub fn mu(self) -> f64 {
        match self {
            Sign::Focusing => 1.0,
            Sign::Defocusing => -1.0,
        }
    }

    pub fn as_byte(self) -> u8 {
        match self {
            Sign::Focusing => 0,
            Sign::Defocusing => 1,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(Sign::Focusing),
            1 => Some(Sign::Defocusing),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    /// Fractional order, `0 < s ≤ 1`.
    pub s: f64,
    /// Nonlinearity power, `p > 1`.
    pub p: f64,
    pub sign: Sign,
}

impl PhysParams {
    pub fn new(s: f64, p: f64, sign: Sign) -> Result<Self> {
        let params = PhysParams { s, p, sign };
        params.validate()?;
        Ok(params)
    }

    pub fn focusing(s: f64, p: f64) -> Result<Self> {
        Self::new(s, p, Sign::Focusing)
    }

    pub fn defocusing(s: f64, p: f64) -> Result<Self> {
        Self::new(s, p, Sign::Defocusing)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s <= 1.0) {
            return Err(Error::param("s", format!("{} not in (0, 1]", self.s)));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::param("p", format!("{} must exceed 1", self.p)));
        }
        Ok(())
    }

    pub fn with_sign(self, sign: Sign) -> Self {
        PhysParams { sign, ..self }
    }

    /// Scaling-critical Sobolev index `s_c = d/2 - 2s/(p-1)`.
    pub fn critical_index(&self, d: usize) -> f64 {
        d as f64 / 2.0 - 2.0 * self.s / (self.p - 1.0)
    }

    /// `c_s = sin(πs)/π`, the normalisation of the resolvent representation.
    pub fn c_s(&self) -> f64 {
        (PI * self.s).sin() / PI
    }

    /// Exponent making `λ^{2s/(p-1)} u(λ^{2s} t, λ x)` a symmetry.
    pub fn scaling_exponent(&self) -> f64 {
        2.0 * self.s / (self.p - 1.0)
    }

    /// Whether `(d, s, p)` lies in the window where the below-threshold
    /// scattering theorem applies: `d ≥ 3`, `s ∈ (d/(d+1), 1)`, and
    /// `8s/3 < p < 1 + 4s/(3 - 2s)` for `d = 3`, `2 ≤ p < 1 + 4s/(d - 2s)` for `d ≥ 4`.
    pub fn in_scattering_regime(&self, d: usize) -> bool {
        if d < 3 {
            return false;
        }
        let df = d as f64;
        let (s, p) = (self.s, self.p);
        if !(s > df / (df + 1.0) && s < 1.0) {
            return false;
        }
        let p_ok = if d == 3 {
            p > 8.0 * s / 3.0 && p < 1.0 + 4.0 * s / (3.0 - 2.0 * s)
        } else {
            p >= 2.0 && p < 1.0 + 4.0 * s / (df - 2.0 * s)
        };
        p_ok && self.is_intercritical(d)
    }

    /// `0 < s_c < s`.
    pub fn is_intercritical(&self, d: usize) -> bool {
        let sc = self.critical_index(d);
        sc > 0.0 && sc < self.s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_index_cubic_3d() {
        let p = PhysParams::focusing(1.0, 3.0).unwrap();
        assert!((p.critical_index(3) - 0.5).abs() < 1e-15);
        let p = PhysParams::focusing(0.9, 3.0).unwrap();
        assert!((p.critical_index(3) - 0.6).abs() < 1e-14);
    }

    #[test]
    fn regime_flag() {
        assert!(PhysParams::focusing(0.9, 3.0)
            .unwrap()
            .in_scattering_regime(3));
        // s = 1 is excluded from the open interval
        assert!(!PhysParams::focusing(1.0, 3.0)
            .unwrap()
            .in_scattering_regime(3));
        assert!(!PhysParams::focusing(0.9, 3.0)
            .unwrap()
            .in_scattering_regime(1));
        // s too small for d = 3
        assert!(!PhysParams::focusing(0.7, 3.0)
            .unwrap()
            .in_scattering_regime(3));
        // p below 8s/3
        assert!(!PhysParams::focusing(0.9, 2.3)
            .unwrap()
            .in_scattering_regime(3));
    }

    #[test]
    fn regime_implies_intercritical() {
        for i in 0..50 {
            for j in 0..50 {
                let s = 0.75 + 0.25 * i as f64 / 50.0;
                let p = 2.0 + 2.5 * j as f64 / 50.0;
                let prm = PhysParams::focusing(s, p).unwrap();
                for d in 3..6 {
                    if prm.in_scattering_regime(d) {
                        let sc = prm.critical_index(d);
                        assert!(sc > 0.0 && sc < s);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_values() {
        assert!(PhysParams::focusing(0.0, 3.0).is_err());
        assert!(PhysParams::focusing(1.2, 3.0).is_err());
        assert!(PhysParams::focusing(0.5, 1.0).is_err());
    }
}
