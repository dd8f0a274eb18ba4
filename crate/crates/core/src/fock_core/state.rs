use super::{hermitian_eigen, max_abs, CMatrix, C64, EDGE};
use crate::{Error, Result};

/// Density operator on a truncated number basis (or two-level ⊗ Fock).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    pub entries: CMatrix,
}

/// Numerical health of a [`DensityMatrix`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateReport {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
    pub tail_mass: f64,
}

impl StateReport {
    pub fn is_valid(&self) -> bool {
        self.trace_error <= 1e-9 && self.hermiticity_error <= 1e-10 && self.min_eigenvalue >= -1e-8
    }

    pub fn truncation_ok(&self) -> bool {
        self.tail_mass <= 1e-8
    }
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Self {
        assert!(entries.is_square());
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// |ψ⟩⟨ψ| for a normalized copy of `psi`.
    pub fn pure(psi: &[C64]) -> Self {
        let v = nalgebra::DVector::from_column_slice(psi);
        let v = &v / C64::new(v.norm(), 0.0);
        Self::new(&v * v.adjoint())
    }

    pub fn fock(n: usize, k: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        m[(k, k)] = C64::new(1.0, 0.0);
        Self::new(m)
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// Population of the top [`EDGE`] levels.
    pub fn tail_mass(&self) -> f64 {
        let n = self.dim();
        (n.saturating_sub(EDGE)..n).map(|k| self.entries[(k, k)].re).sum()
    }

    pub fn report(&self) -> StateReport {
        let (vals, _) = hermitian_eigen(&self.hermitian_part());
        StateReport {
            trace_error: (self.trace() - C64::new(1.0, 0.0)).norm(),
            hermiticity_error: max_abs(&(&self.entries - self.entries.adjoint())),
            min_eigenvalue: vals.iter().cloned().fold(f64::INFINITY, f64::min),
            tail_mass: self.tail_mass(),
        }
    }

    pub fn validate(&self) -> Result<StateReport> {
        let r = self.report();
        if r.is_valid() {
            Ok(r)
        } else {
            Err(Error::InvalidState(format!("{r:?}")))
        }
    }

    pub fn hermitian_part(&self) -> CMatrix {
        (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0)
    }

    /// Unit-trace Hermitian copy.
    pub fn normalized(&self) -> Self {
        let h = self.hermitian_part();
        let tr = h.trace();
        Self::new(h / tr)
    }

    /// U ρ U†.
    pub fn conjugate(&self, u: &CMatrix) -> Self {
        Self::new(u * &self.entries * u.adjoint())
    }
}

/// Thermal state with populations p_n = e^{−εn}(1 − e^{−ε}), renormalized
/// after truncation. The truncation correction shows up in
/// [`DensityMatrix::tail_mass`].
pub fn thermal_state(epsilon: f64, n: usize) -> Result<DensityMatrix> {
    super::check_dim(n)?;
    if !(epsilon > 0.0) {
        return Err(Error::UnsupportedTemperature(epsilon));
    }
    let q = (-epsilon).exp();
    let p: Vec<f64> = (0..n).map(|k| (-epsilon * k as f64).exp() * (1.0 - q)).collect();
    let total: f64 = p.iter().sum();
    let m = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |k, _| C64::new(p[k] / total, 0.0)));
    Ok(DensityMatrix::new(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal_limits() {
        let rho = thermal_state(30.0, 10).unwrap();
        assert!((rho.entries[(0, 0)].re - 1.0).abs() < 1e-12);
        let rho = thermal_state(1.0, 40).unwrap();
        assert!((rho.entries[(0, 0)].re - (1.0 - (-1f64).exp())).abs() < 1e-12);
        let nbar: f64 = (0..40).map(|k| k as f64 * rho.entries[(k, k)].re).sum();
        assert!((nbar - 1.0 / (1f64.exp() - 1.0)).abs() < 1e-10);
        assert!(rho.report().truncation_ok());
        assert!(!thermal_state(0.05, 20).unwrap().report().truncation_ok());
    }

    #[test]
    fn thermal_rejects_nonpositive() {
        assert_eq!(thermal_state(0.0, 5).unwrap_err(), Error::UnsupportedTemperature(0.0));
    }

    #[test]
    fn report_flags_bad_trace() {
        let mut rho = thermal_state(1.0, 6).unwrap();
        rho.entries[(0, 0)] += C64::new(0.1, 0.0);
        assert!(rho.validate().is_err());
    }
}
