use crate::{Error, Result, UnitSystem};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Axes of the accessible-variance map: final/initial frequency and
/// inverse-temperature ratios, each sampled uniformly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceMapGrid {
    pub omega_ratio: (f64, f64),
    pub beta_ratio: (f64, f64),
    pub n_omega: usize,
    pub n_beta: usize,
    pub omega0: f64,
    pub beta0: f64,
}

impl Default for VarianceMapGrid {
    fn default() -> Self {
        Self { omega_ratio: (0.5, 3.0), beta_ratio: (0.5, 3.0), n_omega: 21, n_beta: 21, omega0: 1.0, beta0: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceMapPoint {
    pub omega_ratio: f64,
    pub beta_ratio: f64,
    pub db: f64,
    /// 10 log₁₀(ω₀/ω_f): the value any unitary (isentropic) process reaches.
    pub isentropic_db: f64,
    /// Whether β_f ω_f = β₀ ω₀ holds at this grid point.
    pub on_isentropic: bool,
}

/// Δx of the thermal state of an oscillator at frequency ω and inverse temperature β.
pub fn thermal_variance(omega: f64, beta: f64, units: UnitSystem) -> f64 {
    let k2 = units.mass * omega / units.hbar;
    let eps = units.hbar * omega * beta;
    1.0 / (2.0 * k2 * (0.5 * eps).tanh())
}

/// 10 log₁₀(Δx_f/Δx₀) for one pair of ratios.
pub fn variance_db(omega_ratio: f64, beta_ratio: f64, omega0: f64, beta0: f64, units: UnitSystem) -> f64 {
    let v0 = thermal_variance(omega0, beta0, units);
    let vf = thermal_variance(omega0 * omega_ratio, beta0 * beta_ratio, units);
    10.0 * (vf / v0).log10()
}

fn axis(range: (f64, f64), n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![range.0];
    }
    (0..n).map(|k| range.0 + (range.1 - range.0) * k as f64 / (n - 1) as f64).collect()
}

/// Row-major table (ω ratio outer, β ratio inner).
pub fn variance_map(grid: &VarianceMapGrid, units: UnitSystem) -> Result<Vec<VarianceMapPoint>> {
    let positive = |v: f64| v > 0.0 && v.is_finite();
    if ![grid.omega_ratio.0, grid.omega_ratio.1, grid.beta_ratio.0, grid.beta_ratio.1, grid.omega0, grid.beta0]
        .into_iter()
        .all(positive)
        || grid.n_omega == 0
        || grid.n_beta == 0
    {
        return Err(Error::InvalidSpec(format!("variance map grid must be positive: {grid:?}")));
    }
    let ws = axis(grid.omega_ratio, grid.n_omega);
    let bs = axis(grid.beta_ratio, grid.n_beta);
    Ok(ws
        .par_iter()
        .flat_map_iter(|&w| {
            bs.iter().map(move |&b| VarianceMapPoint {
                omega_ratio: w,
                beta_ratio: b,
                db: variance_db(w, b, grid.omega0, grid.beta0, units),
                isentropic_db: 10.0 * (1.0 / w).log10(),
                on_isentropic: (w * b - 1.0).abs() < 1e-12,
            })
        })
        .collect())
}
