//! Protocol specification files and their translation into designs.

use crate::error::CliError;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sqzsta::dynamics::{RamanPath, RamanShape};
use sqzsta::raman_protocol::{closed_squeeze_design, invert_controls, jc_invert_controls, ClosedRamanDesign};
use sqzsta::squeezed_state::wrap_phase;
use sqzsta::trap_protocol::{control_open, control_open_isentropic, make_quintic};
use sqzsta::{RamanControls, SqueezeParams, StateFlow, TrapControls, UnitSystem};
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    TrapClosed,
    TrapOpen,
    RamanClosed,
    RamanOpen,
    JcOpen,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StochasticSettings {
    pub count: usize,
    pub dt: f64,
    /// Largest accepted trace distance between the ensemble mean and the target.
    #[serde(default = "default_trace_tol")]
    pub trace_tol: f64,
}

fn default_trace_tol() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySettings {
    pub steps: usize,
    pub samples: usize,
    pub fidelity_tol: f64,
    pub entropy_tol: f64,
    pub stochastic: Option<StochasticSettings>,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self { steps: 20000, samples: 20, fidelity_tol: 0.999, entropy_tol: 1e-4, stochastic: None }
    }
}

/// Two-beam Raman configuration used by `full-ion-check` and for the laser
/// decomposition reported by `design`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaserSettings {
    pub detuning: f64,
    pub lamb_dicke: (f64, f64),
    /// Defaults to √(Δ/2) on both beams.
    pub rabi: Option<(f64, f64)>,
    pub phases: (f64, f64),
    pub atomic_gap: f64,
    pub fock_dim: usize,
    /// Duration of the ion check; defaults to 2π/ω₀.
    pub duration: Option<f64>,
    pub min_fidelity: f64,
}

impl Default for LaserSettings {
    fn default() -> Self {
        Self {
            detuning: 50.0,
            lamb_dicke: (0.15, -0.15),
            rabi: None,
            phases: (FRAC_PI_2, 0.0),
            atomic_gap: 1e6,
            fock_dim: 20,
            duration: None,
            min_fidelity: 0.99,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WignerSettings {
    pub points: usize,
    /// Half-width of the grid in standard deviations of the designed state.
    pub span: f64,
}

impl Default for WignerSettings {
    fn default() -> Self {
        Self { points: 81, span: 7.0 }
    }
}

fn default_grid_points() -> usize {
    1001
}

fn default_fock_dim() -> usize {
    40
}

fn default_omega0() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSpec {
    pub scheme: Scheme,
    pub initial: SqueezeParams,
    pub target: SqueezeParams,
    pub tf: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_fock_dim")]
    pub fock_dim: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub units: UnitSystem,
    #[serde(default = "default_omega0")]
    pub omega0: f64,
    /// Accept a raman-closed target phase that differs from −2ω₀tf.
    #[serde(default)]
    pub phase_override: bool,
    #[serde(default)]
    pub verify: VerifySettings,
    #[serde(default)]
    pub lasers: LaserSettings,
    #[serde(default)]
    pub wigner: WignerSettings,
}

/// Designed controls plus the path the simulated state should follow.
pub enum Design {
    Trap(TrapControls),
    Raman { controls: RamanControls, path: RamanPath, closed: Option<ClosedRamanDesign> },
}

/// Signed squeezing of a state whose phase must be 0 (a negative r is stored as φ = π).
fn signed_r(p: &SqueezeParams, what: &str) -> Result<f64, CliError> {
    if p.r() == 0.0 || p.phi().abs() < 1e-12 {
        Ok(p.r())
    } else if (p.phi().abs() - PI).abs() < 1e-12 {
        Ok(-p.r())
    } else {
        Err(CliError::Input(format!("{what} requires phi = 0, got {}", p.phi())))
    }
}

impl ProtocolSpec {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read spec {}: {e}", path.display())))?;
        let spec: ProtocolSpec =
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("spec {}: {e}", path.display())))?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Input(m));
        if !(self.tf > 0.0) || !self.tf.is_finite() {
            return bad(format!("tf must be positive, got {}", self.tf));
        }
        if self.grid_points < 2 {
            return bad(format!("grid_points must be at least 2, got {}", self.grid_points));
        }
        if self.fock_dim < 2 {
            return bad(format!("fock_dim must be at least 2, got {}", self.fock_dim));
        }
        if !(self.omega0 > 0.0) {
            return bad(format!("omega0 must be positive, got {}", self.omega0));
        }
        if !(self.units.hbar > 0.0 && self.units.mass > 0.0) {
            return bad("units.hbar and units.mass must be positive".into());
        }
        let same_eps = (self.initial.epsilon() - self.target.epsilon()).abs() <= 1e-12 * self.initial.epsilon();
        match self.scheme {
            Scheme::TrapClosed | Scheme::TrapOpen => {
                if self.initial.r() != 0.0 {
                    return bad("trap schemes start from a thermal state (initial.r = 0)".into());
                }
                signed_r(&self.target, "trap schemes")?;
                if self.scheme == Scheme::TrapClosed && !same_eps {
                    return bad("trap-closed is unitary: target.epsilon must equal initial.epsilon".into());
                }
            }
            Scheme::RamanClosed => {
                if self.initial.r() != 0.0 {
                    return bad("raman-closed starts from a thermal state (initial.r = 0)".into());
                }
                if !same_eps {
                    return bad("raman-closed is unitary: target.epsilon must equal initial.epsilon".into());
                }
                let lab = wrap_phase(-2.0 * self.omega0 * self.tf);
                if !self.phase_override && wrap_phase(self.target.phi() - lab).abs() > 1e-9 {
                    return bad(format!(
                        "raman-closed fixes the final phase to -2 omega0 tf = {lab}; target.phi = {} (set phase_override to accept)",
                        self.target.phi()
                    ));
                }
            }
            Scheme::RamanOpen | Scheme::JcOpen => {}
        }
        if self.verify.steps == 0 || self.verify.samples == 0 {
            return bad("verify.steps and verify.samples must be positive".into());
        }
        if let Some(s) = &self.verify.stochastic {
            if s.count == 0 || !(s.dt > 0.0) {
                return bad("verify.stochastic needs count > 0 and dt > 0".into());
            }
        }
        if self.wigner.points < 2 || !(self.wigner.span >= 6.0) {
            return bad("wigner.points must be >= 2 and wigner.span >= 6".into());
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let body = serde_json::to_vec(self).expect("spec serializes");
        format!("{:x}", Sha256::digest(body))
    }

    pub fn design(&self) -> Result<Design, CliError> {
        let (u, w0) = (self.units, self.omega0);
        match self.scheme {
            Scheme::TrapClosed | Scheme::TrapOpen => {
                let wf = w0 * (2.0 * signed_r(&self.target, "trap schemes")?).exp();
                let omega = make_quintic(w0, wf, self.tf)?;
                let controls = if self.scheme == Scheme::TrapClosed {
                    control_open_isentropic(omega, self.initial.epsilon(), u)?
                } else {
                    let b0 = self.initial.epsilon() / (u.hbar * w0);
                    let bf = self.target.epsilon() / (u.hbar * wf);
                    control_open(omega, make_quintic(b0, bf, self.tf)?, u)?
                };
                Ok(Design::Trap(controls))
            }
            Scheme::RamanClosed => {
                let d = closed_squeeze_design(make_quintic(0.0, self.target.r(), self.tf)?, w0, self.grid_points)?;
                let path = RamanPath { shape: RamanShape::Closed { r: d.r, epsilon: self.initial.epsilon() }, omega0: w0, units: u };
                Ok(Design::Raman { controls: d.controls(self.grid_points), path, closed: Some(d) })
            }
            Scheme::RamanOpen | Scheme::JcOpen => {
                let flow = StateFlow::between(&self.initial, &self.target, self.tf)?;
                let controls = if self.scheme == Scheme::RamanOpen {
                    invert_controls(&flow, self.grid_points)?
                } else {
                    jc_invert_controls(&flow, self.grid_points)?
                };
                let path = RamanPath { shape: RamanShape::Flow(flow), omega0: w0, units: u };
                Ok(Design::Raman { controls, path, closed: None })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cooling_controls() -> ProtocolSpec {
        serde_json::from_str(
            r#"{"scheme": "trap-open", "initial": {"r": 0, "phi": 0, "epsilon": 1},
                "target": {"r": 0.5493061443340549, "phi": 0, "epsilon": 6}, "tf": 2}"#,
        )
        .unwrap()
    }

    #[test]
    fn defaults_and_hash() {
        let s = cooling_controls();
        assert_eq!(s.grid_points, 1001);
        assert_eq!(s.verify.steps, 20000);
        s.validate().unwrap();
        assert_eq!(s.hash(), cooling_controls().hash());
        let mut t = cooling_controls();
        t.seed = 9;
        assert_ne!(s.hash(), t.hash());
    }

    #[test]
    fn trap_requires_zero_phase() {
        let mut s = cooling_controls();
        s.target = SqueezeParams::new(0.5, 0.3, 6.0).unwrap();
        assert!(matches!(s.validate(), Err(CliError::Input(_))));
        s.target = SqueezeParams::new(-0.3, 0.0, 6.0).unwrap();
        s.validate().unwrap();
        let Design::Trap(c) = s.design().unwrap() else { panic!("trap design expected") };
        assert!((c.omega.sf - (-0.6f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn raman_closed_phase_rule() {
        let mut s = cooling_controls();
        s.scheme = Scheme::RamanClosed;
        s.tf = 1.0;
        s.target = SqueezeParams::new(1.0, 0.0, 1.0).unwrap();
        assert!(s.validate().is_err());
        s.target = SqueezeParams::new(1.0, -2.0, 1.0).unwrap();
        s.validate().unwrap();
        s.target = SqueezeParams::new(1.0, 0.0, 1.0).unwrap();
        s.phase_override = true;
        s.validate().unwrap();
    }

    #[test]
    fn unknown_fields_rejected() {
        let r: Result<ProtocolSpec, _> = serde_json::from_str(
            r#"{"scheme": "trap-open", "initial": {"r": 0, "phi": 0, "epsilon": 1},
                "target": {"r": 0, "phi": 0, "epsilon": 1}, "tf": 2, "bogus": 1}"#,
        );
        assert!(r.is_err());
    }
}
