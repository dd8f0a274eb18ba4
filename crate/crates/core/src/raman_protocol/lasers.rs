use crate::fock_core::C64;
use crate::squeezed_state::wrap_phase;
use crate::{Error, Result, UnitSystem};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// How comfortably the detuning dominates the other frequency scales.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HierarchyTier {
    /// Δ ≥ 50 max(Ω₁, Ω₂, ω₀).
    Comfortable,
    /// 10 ≤ Δ/max(Ω₁, Ω₂, ω₀) < 50.
    Warning,
    /// Δ/max(Ω₁, Ω₂, ω₀) < 10: adiabatic elimination is not expected to hold.
    Violated,
}

/// Two Raman beams detuned by Δ from the electronic transition, with
/// frequency difference ω₁ − ω₂ = 2ω₀ (second blue sideband).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamanLaserConfig {
    pub rabi: (f64, f64),
    pub lamb_dicke: (f64, f64),
    pub detuning: f64,
    pub phases: (f64, f64),
    pub omega0: f64,
}

impl RamanLaserConfig {
    pub fn x0(&self, units: UnitSystem) -> f64 {
        units.x0(self.omega0)
    }

    /// Beat note ω₁ − ω₂ the scheme assumes.
    pub fn sideband(&self) -> f64 {
        2.0 * self.omega0
    }

    /// |Δ| / max(Ω₁, Ω₂, ω₀).
    pub fn hierarchy_ratio(&self) -> f64 {
        self.detuning.abs() / self.rabi.0.abs().max(self.rabi.1.abs()).max(self.omega0)
    }

    /// Tier of the detuning hierarchy, without rejecting violations.
    pub fn hierarchy(&self) -> Result<HierarchyTier> {
        if !(self.omega0 > 0.0) {
            return Err(Error::InvalidFrequency(self.omega0));
        }
        if self.detuning == 0.0 || !self.detuning.is_finite() {
            return Err(Error::InvalidLasers("detuning must be nonzero".into()));
        }
        let ratio = self.hierarchy_ratio();
        Ok(if ratio < 10.0 {
            HierarchyTier::Violated
        } else if ratio < 50.0 {
            HierarchyTier::Warning
        } else {
            HierarchyTier::Comfortable
        })
    }

    /// Like [`hierarchy`](Self::hierarchy) but rejects a violated hierarchy.
    pub fn validate(&self) -> Result<HierarchyTier> {
        match self.hierarchy()? {
            HierarchyTier::Violated => Err(Error::InvalidLasers(format!(
                "|Δ| = {} is only {:.2} times max(Ω₁, Ω₂, ω₀)",
                self.detuning,
                self.hierarchy_ratio()
            ))),
            tier => Ok(tier),
        }
    }
}

/// Effective squeezing amplitude α of H = ħ(α a² + α* a†²) after adiabatic
/// elimination: α = −(η₂ − η₁)² Ω₁Ω₂/(4Δ) e^{i(Φ₁−Φ₂)}.
pub fn alpha_from_lasers(c: &RamanLaserConfig) -> Result<C64> {
    if c.detuning == 0.0 {
        return Err(Error::InvalidLasers("detuning must be nonzero".into()));
    }
    let d = c.lamb_dicke.1 - c.lamb_dicke.0;
    let mag = d * d * c.rabi.0 * c.rabi.1 / (4.0 * c.detuning);
    Ok(-C64::from_polar(mag, c.phases.0 - c.phases.1))
}

/// Laser quantities realizing a given α.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaserDecomposition {
    pub abs_alpha: f64,
    /// Φ₁ − Φ₂ = arg(−α).
    pub phase_diff: f64,
    /// Ω₁Ω₂ = 4Δ|α|/(η₂ − η₁)².
    pub rabi_product: f64,
}

pub fn decompose_alpha(alpha: C64, lamb_dicke: (f64, f64), detuning: f64) -> LaserDecomposition {
    let d = lamb_dicke.1 - lamb_dicke.0;
    LaserDecomposition {
        abs_alpha: alpha.norm(),
        phase_diff: if alpha.norm() > 0.0 { wrap_phase((-alpha).arg()) } else { 0.0 },
        rabi_product: 4.0 * detuning * alpha.norm() / (d * d),
    }
}

/// Four beams: (0, 1) build the engineered dephasing, (2, 3) the squeezing
/// Hamiltonian, all detuned by Δ̃.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JcLaserConfig {
    pub rabi: [f64; 4],
    pub lamb_dicke: [f64; 4],
    pub detuning: f64,
    pub phases: [f64; 4],
    pub omega0: f64,
}

impl JcLaserConfig {
    /// Resonances ω₁ − ω₀ = ω₀ and ω₂ − ω₃ = 2ω₀ (trap frequency ω₀).
    pub fn resonances(&self) -> (f64, f64) {
        (self.omega0, 2.0 * self.omega0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.detuning == 0.0 || !self.detuning.is_finite() {
            return Err(Error::InvalidLasers("detuning must be nonzero".into()));
        }
        if (wrap_phase(self.phases[1] - self.phases[0]) - FRAC_PI_2).abs() > 1e-12 {
            return Err(Error::InvalidLasers(format!(
                "dissipator form requires Φ₁ − Φ₀ = π/2, got {}",
                self.phases[1] - self.phases[0]
            )));
        }
        if !(self.rabi[0] > 0.0) {
            return Err(Error::InvalidLasers("Ω₀ must be positive".into()));
        }
        Ok(())
    }

    /// κ = (ħ Ω₁ √Ω₀ (η₁ − η₀)/(2Δ̃))².
    pub fn kappa(&self, units: UnitSystem) -> f64 {
        (units.hbar * self.rabi[1] * self.rabi[0].sqrt() * (self.lamb_dicke[1] - self.lamb_dicke[0])
            / (2.0 * self.detuning))
            .powi(2)
    }

    /// Ω₁ realizing a required κ ≥ 0 with the other beams fixed.
    pub fn rabi1_for(&self, kappa: f64, units: UnitSystem) -> Result<f64> {
        if kappa < 0.0 {
            return Err(Error::InvalidLasers(format!("κ = {kappa} < 0 cannot be a square of real amplitudes")));
        }
        let d = (self.lamb_dicke[1] - self.lamb_dicke[0]).abs();
        Ok(2.0 * self.detuning.abs() * kappa.sqrt() / (units.hbar * self.rabi[0].sqrt() * d))
    }

    /// Squeezing amplitude from beams 2 and 3, same structure as [`alpha_from_lasers`].
    pub fn alpha(&self) -> C64 {
        let d = self.lamb_dicke[3] - self.lamb_dicke[2];
        -C64::from_polar(d * d * self.rabi[2] * self.rabi[3] / (4.0 * self.detuning), self.phases[2] - self.phases[3])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> RamanLaserConfig {
        RamanLaserConfig { rabi: (5.0, 5.0), lamb_dicke: (0.15, -0.15), detuning: 50.0, phases: (FRAC_PI_2, 0.0), omega0: 1.0 }
    }

    #[test]
    fn alpha_properties() {
        let c = cfg();
        let a = alpha_from_lasers(&c).unwrap();
        assert!(a.re.abs() < 1e-15 && a.im != 0.0);
        let mut d = c;
        d.detuning *= 2.0;
        assert!((alpha_from_lasers(&d).unwrap().norm() - 0.5 * a.norm()).abs() < 1e-15);
        d.rabi.0 = 0.0;
        assert_eq!(alpha_from_lasers(&d).unwrap().norm(), 0.0);
        d.detuning = 0.0;
        assert!(alpha_from_lasers(&d).is_err());
    }

    #[test]
    fn decomposition_round_trip() {
        let c = cfg();
        let a = alpha_from_lasers(&c).unwrap();
        let dec = decompose_alpha(a, c.lamb_dicke, c.detuning);
        assert!((dec.phase_diff - FRAC_PI_2).abs() < 1e-12);
        assert!((dec.rabi_product - 25.0).abs() < 1e-12);
    }

    #[test]
    fn hierarchy_tiers() {
        let mut c = cfg();
        assert_eq!(c.validate().unwrap(), HierarchyTier::Warning);
        c.detuning = 300.0;
        assert_eq!(c.validate().unwrap(), HierarchyTier::Comfortable);
        c.detuning = 20.0;
        assert!(c.validate().is_err());
        assert_eq!(c.hierarchy().unwrap(), HierarchyTier::Violated);
    }

    #[test]
    fn jc_kappa_inversion() {
        let j = JcLaserConfig {
            rabi: [2.0, 3.0, 1.0, 1.0],
            lamb_dicke: [0.1, -0.1, 0.1, -0.1],
            detuning: 40.0,
            phases: [0.0, FRAC_PI_2, 0.0, 0.0],
            omega0: 1.0,
        };
        j.validate().unwrap();
        let k = j.kappa(UnitSystem::default());
        assert!((j.rabi1_for(k, UnitSystem::default()).unwrap() - 3.0).abs() < 1e-12);
        assert!(j.rabi1_for(-1.0, UnitSystem::default()).is_err());
        let mut bad = j;
        bad.phases[1] = 0.3;
        assert!(bad.validate().is_err());
    }
}
