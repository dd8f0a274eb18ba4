use super::{CMatrix, DensityMatrix, C64};
use crate::{Error, Result};
use nalgebra::{DVector, SymmetricEigen};

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = CMatrix::from_fn(m.nrows(), idx.len(), |i, j| eig.eigenvectors[(i, idx[j])]);
    (vals, vecs)
}

/// Principal square root of a PSD matrix (negative round-off clipped).
pub fn sqrtm_psd(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|v| C64::new(v.max(0.0).sqrt(), 0.0)));
    &vecs * CMatrix::from_diagonal(&d) * vecs.adjoint()
}

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        Err(Error::DimensionMismatch(a.dim(), b.dim()))
    } else {
        Ok(())
    }
}

/// −Tr ρ ln ρ, eigenvalues below 1e−14 contribute zero.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let (vals, _) = hermitian_eigen(&rho.entries);
    if vals.first().is_some_and(|&v| v < -1e-8) {
        return Err(Error::InvalidState(format!("negative eigenvalue {}", vals[0])));
    }
    Ok(vals.iter().filter(|&&v| v > 1e-14).map(|&v| -v * v.ln()).sum())
}

/// Uhlmann fidelity (Tr √(√ρ σ √ρ))².
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let s = sqrtm_psd(&rho.entries);
    let inner = &s * &sigma.entries * &s;
    let (vals, _) = hermitian_eigen(&inner);
    let f: f64 = vals.iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok((f * f).clamp(0.0, 1.0))
}

/// ½‖ρ − σ‖₁ for Hermitian arguments.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let (vals, _) = hermitian_eigen(&(&rho.entries - &sigma.entries));
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

/// Tr(ρ O).
pub fn expectation(rho: &DensityMatrix, op: &CMatrix) -> C64 {
    (&rho.entries * op).trace()
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    (&rho.entries * &rho.entries).trace().re
}
