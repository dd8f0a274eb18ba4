use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Wrap a phase into (−π, π].
pub fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Squeezed thermal state S_{r,φ} e^{−ε a†a} S†_{r,φ} / Z with
/// S = exp((r/2)(e^{−iφ}a² − e^{iφ}a†²)).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct SqueezeParams {
    r: f64,
    phi: f64,
    epsilon: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    r: f64,
    phi: f64,
    epsilon: f64,
}

impl TryFrom<RawParams> for SqueezeParams {
    type Error = Error;
    fn try_from(p: RawParams) -> Result<Self> {
        SqueezeParams::new(p.r, p.phi, p.epsilon)
    }
}

impl From<SqueezeParams> for RawParams {
    fn from(p: SqueezeParams) -> Self {
        RawParams { r: p.r, phi: p.phi, epsilon: p.epsilon }
    }
}

impl SqueezeParams {
    /// A negative `r` is folded into (|r|, φ + π).
    pub fn new(r: f64, phi: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::UnsupportedTemperature(epsilon));
        }
        if !r.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidSpec(format!("non-finite squeeze parameters r={r}, phi={phi}")));
        }
        let (r, phi) = if r < 0.0 { (-r, phi + PI) } else { (r, phi) };
        let phi = if r == 0.0 { 0.0 } else { wrap_phase(phi) };
        Ok(Self { r, phi, epsilon })
    }

    pub fn thermal(epsilon: f64) -> Result<Self> {
        Self::new(0.0, 0.0, epsilon)
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn phi(&self) -> f64 {
        self.phi
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    /// λ = −ε.
    pub fn lambda(&self) -> f64 {
        -self.epsilon
    }

    /// Mean thermal occupation n̄ = 1/(e^ε − 1).
    pub fn nbar(&self) -> f64 {
        1.0 / self.epsilon.exp_m1()
    }

    /// ⟨a†a⟩ and ⟨a²⟩ of the state.
    pub fn ladder_moments(&self) -> (f64, num_complex::Complex64) {
        let nu = 2.0 * self.nbar() + 1.0;
        let n = (2.0 * self.r).cosh() * self.nbar() + self.r.sinh().powi(2);
        let s = -num_complex::Complex64::from_polar(0.5 * nu * (2.0 * self.r).sinh(), self.phi);
        (n, s)
    }

    /// Inverse of [`Self::ladder_moments`]; any zero-mean Gaussian state
    /// is a squeezed thermal state.
    pub fn from_ladder_moments(n: f64, s: num_complex::Complex64) -> Result<Self> {
        let m = 2.0 * n + 1.0;
        let nu2 = m * m - 4.0 * s.norm_sqr();
        if !(nu2 > 1.0) {
            return Err(Error::InvalidState(format!(
                "moments (n={n}, |a²|={}) describe a pure or unphysical state",
                s.norm()
            )));
        }
        let nu = nu2.sqrt();
        let nbar = 0.5 * (nu - 1.0);
        let epsilon = (1.0 / nbar).ln_1p();
        let r = 0.5 * (m / nu).max(1.0).acosh();
        let phi = if s.norm() > 0.0 { (-s).arg() } else { 0.0 };
        Self::new(r, phi, epsilon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_rules() {
        let p = SqueezeParams::new(-0.5, 0.2, 1.0).unwrap();
        assert_eq!(p.r(), 0.5);
        assert!((p.phi() - wrap_phase(0.2 + PI)).abs() < 1e-15);
        assert_eq!(p.lambda(), -1.0);
        assert!(SqueezeParams::new(0.1, 0.0, 0.0).is_err());
        assert!((wrap_phase(-PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
    }

    #[test]
    fn moments_round_trip() {
        let p = SqueezeParams::new(0.7, -2.1, 1.3).unwrap();
        let (n, s) = p.ladder_moments();
        let q = SqueezeParams::from_ladder_moments(n, s).unwrap();
        assert!((q.r() - p.r()).abs() < 1e-12);
        assert!((q.phi() - p.phi()).abs() < 1e-12);
        assert!((q.epsilon() - p.epsilon()).abs() < 1e-12);
    }
}
