use super::gaussian::{moments_from_density, to_gaussian_moments, GaussianMoments};
use super::params::SqueezeParams;
use crate::fock_core::{DensityMatrix, C64};
use crate::{Error, Result, UnitSystem};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl WignerGrid {
    /// Symmetric grid spanning `k` standard deviations of `m` in each quadrature.
    pub fn covering(m: &GaussianMoments, k: f64, nx: usize, np: usize) -> Self {
        let sx = k * m.cov[0][0].sqrt();
        let sp = k * m.cov[1][1].sqrt();
        Self { x_min: m.mean[0] - sx, x_max: m.mean[0] + sx, p_min: m.mean[1] - sp, p_max: m.mean[1] + sp, nx, np }
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn ps(&self) -> Vec<f64> {
        linspace(self.p_min, self.p_max, self.np)
    }

    fn check_covers(&self, m: &GaussianMoments) -> Result<()> {
        let sx = 6.0 * m.cov[0][0].sqrt() * (1.0 - 1e-12);
        let sp = 6.0 * m.cov[1][1].sqrt() * (1.0 - 1e-12);
        if self.x_min > m.mean[0] - sx || self.x_max < m.mean[0] + sx {
            return Err(Error::Coverage("x"));
        }
        if self.p_min > m.mean[1] - sp || self.p_max < m.mean[1] + sp {
            return Err(Error::Coverage("p"));
        }
        Ok(())
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (a + b)];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Scalar field W[ix][ip] on a [`WignerGrid`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerField {
    pub grid: WignerGrid,
    pub values: Vec<Vec<f64>>,
}

fn trapezoid(ys: &[f64], h: f64) -> f64 {
    if ys.len() < 2 {
        return 0.0;
    }
    h * (ys.iter().sum::<f64>() - 0.5 * (ys[0] + ys[ys.len() - 1]))
}

impl WignerField {
    fn dx(&self) -> f64 {
        (self.grid.x_max - self.grid.x_min) / (self.grid.nx - 1) as f64
    }
    fn dp(&self) -> f64 {
        (self.grid.p_max - self.grid.p_min) / (self.grid.np - 1) as f64
    }

    /// Marginal over p, sampled on the x grid.
    pub fn position_marginal(&self) -> Vec<f64> {
        self.values.iter().map(|row| trapezoid(row, self.dp())).collect()
    }

    pub fn integral(&self) -> f64 {
        trapezoid(&self.position_marginal(), self.dx())
    }

    /// Second central moment of the position marginal.
    pub fn marginal_variance_x(&self) -> f64 {
        let marg = self.position_marginal();
        let xs = self.grid.xs();
        let norm = trapezoid(&marg, self.dx());
        let mean = trapezoid(&xs.iter().zip(&marg).map(|(x, w)| x * w).collect::<Vec<_>>(), self.dx()) / norm;
        trapezoid(&xs.iter().zip(&marg).map(|(x, w)| (x - mean).powi(2) * w).collect::<Vec<_>>(), self.dx()) / norm
    }

    pub fn max_abs_difference(&self, other: &WignerField) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

/// Gaussian Wigner function of a state with the given moments.
pub fn gaussian_wigner(m: &GaussianMoments, grid: WignerGrid, units: UnitSystem) -> Result<WignerField> {
    grid.check_covers(m)?;
    let det = m.det();
    if !(det > 0.0) {
        return Err(Error::InvalidState(format!("singular covariance, det = {det}")));
    }
    let _ = units;
    let (a, b, c) = (m.cov[1][1] / det, -m.cov[0][1] / det, m.cov[0][0] / det);
    let pref = 1.0 / (2.0 * PI * det.sqrt());
    let ps = grid.ps();
    let values = grid
        .xs()
        .iter()
        .map(|&x| {
            let dx = x - m.mean[0];
            ps.iter()
                .map(|&p| {
                    let dp = p - m.mean[1];
                    pref * (-0.5 * (a * dx * dx + 2.0 * b * dx * dp + c * dp * dp)).exp()
                })
                .collect()
        })
        .collect();
    Ok(WignerField { grid, values })
}

/// Wigner function of the squeezed thermal state `p`.
pub fn wigner(p: &SqueezeParams, grid: WignerGrid, omega0: f64, units: UnitSystem) -> Result<WignerField> {
    gaussian_wigner(&to_gaussian_moments(p, omega0, units), grid, units)
}

/// Number-state wavefunctions ψ_n(x) of the ω₀ oscillator, n < `n`.
fn hermite_functions(x: f64, n: usize, omega0: f64, units: UnitSystem) -> Vec<f64> {
    let k = (units.mass * omega0 / units.hbar).sqrt();
    let xi = k * x;
    let mut out = vec![0.0; n];
    out[0] = (k * k / PI).powf(0.25) * (-0.5 * xi * xi).exp();
    if n > 1 {
        out[1] = 2f64.sqrt() * xi * out[0];
    }
    for m in 1..n.saturating_sub(1) {
        out[m + 1] = (2.0 / (m + 1) as f64).sqrt() * xi * out[m] - (m as f64 / (m + 1) as f64).sqrt() * out[m - 1];
    }
    out
}

/// W(x,p) = (1/πħ) ∫ dy ⟨x+y|ρ|x−y⟩ e^{−2ipy/ħ}, by direct quadrature on the
/// number-state wavefunctions.
pub fn wigner_from_density(rho: &DensityMatrix, grid: WignerGrid, omega0: f64, units: UnitSystem) -> Result<WignerField> {
    let m = moments_from_density(rho, omega0, units)?;
    grid.check_covers(&m)?;
    let n = rho.dim();
    let hbar = units.hbar;
    // ⟨x+y|ρ|x−y⟩ decays on the scale ħ/(2σ_p) and W must resolve p up to p_max.
    let reach = 10.0 * hbar / (2.0 * m.cov[1][1].sqrt()) + 6.0 * m.cov[0][0].sqrt();
    let pmax = grid.p_min.abs().max(grid.p_max.abs());
    let ny = ((2.0 * reach * pmax / hbar * 4.0).ceil() as usize).clamp(201, 4001) | 1;
    let ys = linspace(-reach, reach, ny);
    let hy = ys[1] - ys[0];
    let ps = grid.ps();
    let phases: Vec<Vec<C64>> = ps
        .iter()
        .map(|&p| ys.iter().map(|&y| C64::from_polar(1.0, -2.0 * p * y / hbar)).collect())
        .collect();
    let mut values = Vec::with_capacity(grid.nx);
    for &x in &grid.xs() {
        let plus: Vec<Vec<f64>> = ys.iter().map(|&y| hermite_functions(x + y, n, omega0, units)).collect();
        let minus: Vec<Vec<f64>> = ys.iter().map(|&y| hermite_functions(x - y, n, omega0, units)).collect();
        let kernel: Vec<C64> = (0..ny)
            .map(|k| {
                let mut acc = C64::new(0.0, 0.0);
                for (nn, &bn) in minus[k].iter().enumerate() {
                    if bn == 0.0 {
                        continue;
                    }
                    let col = rho.entries.column(nn);
                    let mut s = C64::new(0.0, 0.0);
                    for (mm, &am) in plus[k].iter().enumerate() {
                        s += col[mm] * am;
                    }
                    acc += s * bn;
                }
                acc
            })
            .collect();
        let row: Vec<f64> = phases
            .iter()
            .map(|ph| {
                let f: Vec<f64> = kernel.iter().zip(ph).map(|(k, e)| (k * e).re).collect();
                trapezoid(&f, hy) / (PI * hbar)
            })
            .collect();
        values.push(row);
    }
    Ok(WignerField { grid, values })
}
