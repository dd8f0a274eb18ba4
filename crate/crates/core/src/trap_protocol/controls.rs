use super::schedule::Schedule;
use crate::squeezed_state::{squeezed_thermal, GaussianMoments, SqueezeParams};
use crate::{DensityMatrix, Error, Result, UnitSystem};
use serde::{Deserialize, Serialize};

/// How ε_t = ħω_tβ_t evolves along the protocol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ThermalProfile {
    /// Quintic β_t; ε follows the instantaneous ω.
    Beta(Schedule),
    /// ε fixed (unitary, isentropic protocol).
    Isentropic(f64),
}

/// Controls of one time point, in the column order of the CSV output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapPoint {
    pub t: f64,
    pub omega_t: f64,
    pub omega_c_sq: f64,
    pub gamma: f64,
    #[serde(rename = "Omega0")]
    pub omega0_term: f64,
    #[serde(rename = "Omega1")]
    pub omega1_term: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrapFlags {
    /// ω_c² < 0 somewhere on the grid.
    pub inverted_trap: bool,
    /// γ < 0 somewhere on the grid.
    pub non_lindblad: bool,
    pub min_omega_c_sq: f64,
    pub max_omega_c_sq: f64,
    pub min_gamma: f64,
    pub max_gamma: f64,
}

/// Trap frequency and engineered dephasing that carry the thermal state at
/// (ω(0), ε(0)) into the squeezed thermal state at (ω(tf), ε(tf)).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapControls {
    pub omega: Schedule,
    pub thermal: ThermalProfile,
    pub units: UnitSystem,
}

fn check_positive(s: &Schedule, what: &str) -> Result<()> {
    if !(s.min() > 0.0) {
        return Err(Error::InvalidSchedule(format!("{what} must stay positive (min {})", s.min())));
    }
    Ok(())
}

/// Closed-dynamics control frequency ω_c² = ω² − ¾(ω̇/ω)² + ½ω̈/ω.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedTrapControl {
    pub omega: Schedule,
}

pub fn control_frequency_closed(omega: Schedule) -> Result<ClosedTrapControl> {
    check_positive(&omega, "omega")?;
    Ok(ClosedTrapControl { omega })
}

impl ClosedTrapControl {
    pub fn omega_c_sq(&self, t: f64) -> f64 {
        let (w, wd, wdd) = self.omega.jet(t);
        w * w - 0.75 * (wd / w).powi(2) + 0.5 * wdd / w
    }

    /// w = √(ω₀/ω_t) and its first two time derivatives.
    pub fn scaling(&self, t: f64) -> (f64, f64, f64) {
        let w0 = self.omega.s0;
        let (w, wd, wdd) = self.omega.jet(t);
        let s = (w0 / w).sqrt();
        (s, -0.5 * s * wd / w, s * (0.75 * (wd / w).powi(2) - 0.5 * wdd / w))
    }

    /// ẅ + ω_c² w − ω₀²/w³.
    pub fn ermakov_residual(&self, t: f64) -> f64 {
        let w0 = self.omega.s0;
        let (w, _, wdd) = self.scaling(t);
        wdd + self.omega_c_sq(t) * w - w0 * w0 / w.powi(3)
    }

    /// Equivalent open-form controls with ε held fixed.
    pub fn as_open(&self, epsilon: f64, units: UnitSystem) -> Result<TrapControls> {
        control_open_isentropic(self.omega, epsilon, units)
    }
}

pub fn control_open(omega: Schedule, beta: Schedule, units: UnitSystem) -> Result<TrapControls> {
    check_positive(&omega, "omega")?;
    check_positive(&beta, "beta")?;
    if (omega.tf - beta.tf).abs() > 1e-12 * omega.tf {
        return Err(Error::InvalidSchedule(format!("durations differ: {} vs {}", omega.tf, beta.tf)));
    }
    Ok(TrapControls { omega, thermal: ThermalProfile::Beta(beta), units })
}

pub fn control_open_isentropic(omega: Schedule, epsilon: f64, units: UnitSystem) -> Result<TrapControls> {
    check_positive(&omega, "omega")?;
    if !(epsilon > 0.0) {
        return Err(Error::UnsupportedTemperature(epsilon));
    }
    Ok(TrapControls { omega, thermal: ThermalProfile::Isentropic(epsilon), units })
}

impl TrapControls {
    pub fn tf(&self) -> f64 {
        self.omega.tf
    }

    pub fn omega0(&self) -> f64 {
        self.omega.s0
    }

    /// (ε, ε̇, ε̈) at `t`.
    pub fn epsilon_jet(&self, t: f64) -> (f64, f64, f64) {
        match self.thermal {
            ThermalProfile::Isentropic(e) => (e, 0.0, 0.0),
            ThermalProfile::Beta(beta) => {
                let (w, wd, wdd) = self.omega.jet(t);
                let (b, bd, bdd) = beta.jet(t);
                let h = self.units.hbar;
                (h * w * b, h * (wd * b + w * bd), h * (wdd * b + 2.0 * wd * bd + w * bdd))
            }
        }
    }

    /// (Ω₀, Ω̇₀, Ω₁, Ω̇₁) at `t`.
    pub fn omega_terms(&self, t: f64) -> (f64, f64, f64, f64) {
        let (w, wd, wdd) = self.omega.jet(t);
        let (e, ed, edd) = self.epsilon_jet(t);
        let o0 = -wd / (2.0 * w);
        let o0d = -(wdd * w - wd * wd) / (2.0 * w * w);
        let (sh, ch) = (e.sinh(), e.cosh());
        let o1 = -ed / (2.0 * sh);
        let o1d = -(edd * sh - ed * ed * ch) / (2.0 * sh * sh);
        (o0, o0d, o1, o1d)
    }

    /// Ω_t = Ω₀ + Ω₁.
    pub fn omega_total(&self, t: f64) -> f64 {
        let (o0, _, o1, _) = self.omega_terms(t);
        o0 + o1
    }

    pub fn omega_c_sq(&self, t: f64) -> f64 {
        let w = self.omega.value(t);
        let (o0, o0d, o1, o1d) = self.omega_terms(t);
        w * w - (o0 + o1).powi(2) - o0d - o1d
    }

    /// γ_t = −(mω/ħ) ε̇ / (4 sinh²(ε/2)).
    pub fn gamma(&self, t: f64) -> f64 {
        let w = self.omega.value(t);
        let (e, ed, _) = self.epsilon_jet(t);
        -(self.units.mass * w / self.units.hbar) * ed / (4.0 * (0.5 * e).sinh().powi(2))
    }

    pub fn at(&self, t: f64) -> TrapPoint {
        let (o0, _, o1, _) = self.omega_terms(t);
        TrapPoint {
            t,
            omega_t: self.omega.value(t),
            omega_c_sq: self.omega_c_sq(t),
            gamma: self.gamma(t),
            omega0_term: o0,
            omega1_term: o1,
        }
    }

    pub fn sample(&self, grid_points: usize) -> Vec<TrapPoint> {
        super::time_grid(self.tf(), grid_points).into_iter().map(|t| self.at(t)).collect()
    }

    pub fn flags(&self, grid_points: usize) -> TrapFlags {
        let pts = self.sample(grid_points);
        let fold = |f: fn(&TrapPoint) -> f64| {
            pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(f(p)), hi.max(f(p))))
        };
        let (min_w, max_w) = fold(|p| p.omega_c_sq);
        let (min_g, max_g) = fold(|p| p.gamma);
        TrapFlags {
            inverted_trap: min_w < 0.0,
            non_lindblad: min_g < 0.0,
            min_omega_c_sq: min_w,
            max_omega_c_sq: max_w,
            min_gamma: min_g,
            max_gamma: max_g,
        }
    }

    /// Instantaneous reference state σ_t = S_{r_t,0} thermal(ε_t) S† with r_t = ½ ln(ω_t/ω₀).
    pub fn reference_params(&self, t: f64) -> Result<SqueezeParams> {
        let r = 0.5 * (self.omega.value(t) / self.omega0()).ln();
        SqueezeParams::new(r, 0.0, self.epsilon_jet(t).0)
    }

    /// Moments of the designed lab-frame state U_Ω σ_t U_Ω†, U_Ω = e^{iΩ_t m x²/(2ħ)}.
    pub fn designed_moments(&self, t: f64) -> GaussianMoments {
        let u = self.units;
        let w = self.omega.value(t);
        let e = self.epsilon_jet(t).0;
        let nu = 1.0 / (0.5 * e).tanh();
        let vxx = u.hbar / (2.0 * u.mass * w) * nu;
        let vpp = u.hbar * u.mass * w / 2.0 * nu;
        let k = u.mass * self.omega_total(t);
        GaussianMoments { mean: [0.0, 0.0], cov: [[vxx, k * vxx], [k * vxx, vpp + k * k * vxx]] }
    }

    pub fn designed_params(&self, t: f64) -> Result<SqueezeParams> {
        self.designed_moments(t).to_params(self.omega0(), self.units)
    }

    /// Designed lab-frame density matrix in the ω₀ number basis.
    pub fn designed_state(&self, t: f64, n: usize) -> Result<DensityMatrix> {
        squeezed_thermal(&self.designed_params(t)?, n)
    }

    /// Target at tf, where Ω vanishes: S_{r_f,0} thermal(ε_f) S†.
    pub fn target_params(&self) -> Result<SqueezeParams> {
        self.reference_params(self.tf())
    }
}
