use super::{check_dim, CMatrix, DensityMatrix, C64};
use crate::Result;

/// Operator on {|g⟩, |e⟩} ⊗ Fock. Index layout: ground block first
/// (0..N), excited block second (N..2N).
#[derive(Clone, Debug, PartialEq)]
pub struct TwoLevelFockOperator {
    pub fock_dim: usize,
    pub entries: CMatrix,
}

impl TwoLevelFockOperator {
    pub fn zeros(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self { fock_dim: n, entries: CMatrix::zeros(2 * n, 2 * n) })
    }

    /// σ_z = |e⟩⟨e| − |g⟩⟨g| ⊗ 𝟙.
    pub fn sigma_z(n: usize) -> Result<Self> {
        let mut op = Self::zeros(n)?;
        for k in 0..n {
            op.entries[(k, k)] = C64::new(-1.0, 0.0);
            op.entries[(n + k, n + k)] = C64::new(1.0, 0.0);
        }
        Ok(op)
    }

    /// σ_x = |g⟩⟨e| + |e⟩⟨g| ⊗ 𝟙.
    pub fn sigma_x(n: usize) -> Result<Self> {
        let mut op = Self::zeros(n)?;
        for k in 0..n {
            op.entries[(k, n + k)] = C64::new(1.0, 0.0);
            op.entries[(n + k, k)] = C64::new(1.0, 0.0);
        }
        Ok(op)
    }

    /// |g⟩⟨e| ⊗ `m`.
    pub fn lowering_with(m: &CMatrix) -> Self {
        let n = m.nrows();
        let mut entries = CMatrix::zeros(2 * n, 2 * n);
        entries.view_mut((0, n), (n, n)).copy_from(m);
        Self { fock_dim: n, entries }
    }

    /// |g⟩⟨g| ⊗ `m`.
    pub fn ground_with(m: &CMatrix) -> Self {
        let n = m.nrows();
        let mut entries = CMatrix::zeros(2 * n, 2 * n);
        entries.view_mut((0, 0), (n, n)).copy_from(m);
        Self { fock_dim: n, entries }
    }
}

/// |g⟩⟨g| ⊗ ρ.
pub fn embed_ground(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::new(TwoLevelFockOperator::ground_with(&rho.entries).entries)
}

/// Partial trace over the two-level system.
pub fn reduce_motional(rho: &DensityMatrix) -> DensityMatrix {
    let n = rho.dim() / 2;
    let g = rho.entries.view((0, 0), (n, n));
    let e = rho.entries.view((n, n), (n, n));
    DensityMatrix::new(g + e)
}

/// Population of the excited manifold.
pub fn excited_population(rho: &DensityMatrix) -> f64 {
    let n = rho.dim() / 2;
    (n..2 * n).map(|k| rho.entries[(k, k)].re).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_core::{max_abs, thermal_state};

    #[test]
    fn pauli_algebra() {
        let z = TwoLevelFockOperator::sigma_z(4).unwrap();
        let x = TwoLevelFockOperator::sigma_x(4).unwrap();
        let anti = &z.entries * &x.entries + &x.entries * &z.entries;
        assert!(max_abs(&anti) == 0.0);
        assert!(max_abs(&(&x.entries * &x.entries - CMatrix::identity(8, 8))) == 0.0);
    }

    #[test]
    fn embed_and_reduce() {
        let th = thermal_state(1.0, 5).unwrap();
        let full = embed_ground(&th);
        assert_eq!(reduce_motional(&full), th);
        assert_eq!(excited_population(&full), 0.0);
    }
}
