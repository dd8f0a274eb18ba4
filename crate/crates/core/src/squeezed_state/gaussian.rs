use super::params::SqueezeParams;
use crate::fock_core::{build_ladder, expectation, DensityMatrix, C64};
use crate::{Error, Result, UnitSystem};
use serde::{Deserialize, Serialize};

/// First and second moments of (x, p); `cov[0][1]` is the symmetrized
/// covariance ⟨{x,p}⟩/2 − ⟨x⟩⟨p⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianMoments {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

impl GaussianMoments {
    pub fn det(&self) -> f64 {
        self.cov[0][0] * self.cov[1][1] - self.cov[0][1] * self.cov[1][0]
    }

    pub fn check_uncertainty(&self, units: UnitSystem) -> Result<()> {
        let bound = 0.25 * units.hbar * units.hbar;
        if self.det() < bound - 1e-9 {
            return Err(Error::InvalidState(format!("det cov {} below (hbar/2)^2", self.det())));
        }
        Ok(())
    }

    /// Zero-mean moments from ⟨a†a⟩ and ⟨a²⟩ of the ω₀ oscillator.
    pub fn from_ladder(n: f64, s: C64, omega0: f64, units: UnitSystem) -> Self {
        let x0 = units.x0(omega0);
        let p0 = units.p0(omega0);
        let m = 2.0 * n + 1.0;
        let vxx = x0 * x0 * (m + 2.0 * s.re);
        let vpp = p0 * p0 * (m - 2.0 * s.re);
        let vxp = units.hbar * s.im;
        Self { mean: [0.0, 0.0], cov: [[vxx, vxp], [vxp, vpp]] }
    }

    /// Inverse of [`Self::from_ladder`] (means ignored).
    pub fn to_ladder(&self, omega0: f64, units: UnitSystem) -> (f64, C64) {
        let x0 = units.x0(omega0);
        let p0 = units.p0(omega0);
        let xs = self.cov[0][0] / (x0 * x0);
        let ps = self.cov[1][1] / (p0 * p0);
        let n = 0.25 * (xs + ps) - 0.5;
        (n, C64::new(0.25 * (xs - ps), self.cov[0][1] / units.hbar))
    }

    /// Squeezed-thermal parametrization of a zero-mean Gaussian state.
    pub fn to_params(&self, omega0: f64, units: UnitSystem) -> Result<SqueezeParams> {
        let (n, s) = self.to_ladder(omega0, units);
        SqueezeParams::from_ladder_moments(n, s)
    }
}

/// Δx = (ħ/(2mω₀))(2n̄+1)e^{−2r}; closed form valid at φ = 0.
pub fn variance_x(p: &SqueezeParams, omega0: f64, units: UnitSystem) -> Result<f64> {
    if p.phi() != 0.0 {
        return Err(Error::WrongBranch(p.phi()));
    }
    if !(omega0 > 0.0) {
        return Err(Error::InvalidFrequency(omega0));
    }
    Ok(units.hbar / (2.0 * units.mass * omega0) * (2.0 * p.nbar() + 1.0) * (-2.0 * p.r()).exp())
}

/// Covariance of the squeezed thermal state (zero mean).
pub fn to_gaussian_moments(p: &SqueezeParams, omega0: f64, units: UnitSystem) -> GaussianMoments {
    let (n, s) = p.ladder_moments();
    GaussianMoments::from_ladder(n, s, omega0, units)
}

/// Moments of a Fock-space density matrix, by trace expectations.
pub fn moments_from_density(rho: &DensityMatrix, omega0: f64, units: UnitSystem) -> Result<GaussianMoments> {
    let (a, _) = build_ladder(rho.dim())?;
    let ea = expectation(rho, &a.entries);
    let ea2 = expectation(rho, &(&a.entries * &a.entries));
    let en = expectation(rho, &(a.entries.adjoint() * &a.entries)).re;
    let x0 = units.x0(omega0);
    let p0 = units.p0(omega0);
    let mean = [2.0 * x0 * ea.re, 2.0 * p0 * ea.im];
    let n_c = en - ea.norm_sqr();
    let s_c = ea2 - ea * ea;
    let mut g = GaussianMoments::from_ladder(n_c, s_c, omega0, units);
    g.mean = mean;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squeezed_state::squeezed_thermal;

    #[test]
    fn ground_variance() {
        let p = SqueezeParams::new(0.0, 0.0, 40.0).unwrap();
        assert!((variance_x(&p, 1.0, UnitSystem::default()).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_form_example() {
        let p = SqueezeParams::new(0.5, 0.0, 1.0).unwrap();
        let expect = 0.5 * (2.0 / (1f64.exp() - 1.0) + 1.0) * (-1f64).exp();
        assert!((variance_x(&p, 1.0, UnitSystem::default()).unwrap() - expect).abs() < 1e-15);
        assert!(variance_x(&SqueezeParams::new(0.5, 0.3, 1.0).unwrap(), 1.0, UnitSystem::default()).is_err());
    }

    #[test]
    fn dilatation_form() {
        let (w0, wt, eps) = (1.0, 2.7, 1.4);
        let units = UnitSystem { hbar: 1.0, mass: 1.0 };
        let p = SqueezeParams::new((wt / w0 as f64).sqrt().ln(), 0.0, eps).unwrap();
        let k2 = units.mass * wt / units.hbar;
        let expect = 1.0 / (2.0 * k2 * (0.5 * eps as f64).tanh());
        assert!((variance_x(&p, w0, units).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn isotropic_thermal_cov() {
        let units = UnitSystem { hbar: 1.3, mass: 0.7 };
        let p = SqueezeParams::thermal(0.9).unwrap();
        let g = to_gaussian_moments(&p, 2.0, units);
        let nu = 2.0 * p.nbar() + 1.0;
        assert!((g.cov[0][0] - units.hbar / (2.0 * units.mass * 2.0) * nu).abs() < 1e-14);
        assert!((g.cov[1][1] - units.hbar * units.mass * 2.0 / 2.0 * nu).abs() < 1e-14);
        assert_eq!(g.cov[0][1], 0.0);
    }

    #[test]
    fn fock_moments_agree() {
        let units = UnitSystem::default();
        let p = SqueezeParams::new(0.6, 0.8, 1.2).unwrap();
        let rho = squeezed_thermal(&p, 60).unwrap();
        let g = moments_from_density(&rho, 1.0, units).unwrap();
        let h = to_gaussian_moments(&p, 1.0, units);
        for i in 0..2 {
            assert!(g.mean[i].abs() < 1e-12);
            for j in 0..2 {
                assert!((g.cov[i][j] - h.cov[i][j]).abs() < 1e-6, "{:?} {:?}", g, h);
            }
        }
        let q = h.to_params(1.0, units).unwrap();
        assert!((q.r() - p.r()).abs() < 1e-12 && (q.phi() - p.phi()).abs() < 1e-12);
    }
}
