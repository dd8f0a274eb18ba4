//! Truncated Fock-space algebra: ladder operators, quadratures, squeeze
//! unitaries, thermal states and the state metrics used by every oracle.

mod banded;
mod ladder;
mod metrics;
mod state;
mod two_level;

pub use banded::Banded;
#[cfg(test)]
pub(crate) use ladder::squeeze_unpadded;
pub use ladder::{build_ladder, number_operator, quadratures, squeeze_operator, squeeze_padding};
pub use metrics::{
    expectation, fidelity, hermitian_eigen, purity, sqrtm_psd, trace_distance, von_neumann_entropy,
};
pub use state::{thermal_state, DensityMatrix, StateReport};
pub use two_level::{embed_ground, excited_population, reduce_motional, TwoLevelFockOperator};

use nalgebra::DMatrix;

pub type C64 = num_complex::Complex64;
pub type CMatrix = DMatrix<C64>;

/// Rows/columns excluded from operator-identity checks at the truncation edge.
pub const EDGE: usize = 5;

/// Dense operator on the truncated number basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    pub entries: CMatrix,
}

impl FockOperator {
    pub fn new(entries: CMatrix) -> Self {
        assert!(entries.is_square());
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn identity(n: usize) -> Self {
        Self::new(CMatrix::identity(n, n))
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.entries.adjoint())
    }

    /// Max-norm distance to the adjoint.
    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.adjoint()))
    }

    /// Leading `k`×`k` block.
    pub fn block(&self, k: usize) -> CMatrix {
        self.entries.view((0, 0), (k, k)).into_owned()
    }

    /// Leading block with the top [`EDGE`] levels removed.
    pub fn interior(&self) -> CMatrix {
        self.block(self.dim().saturating_sub(EDGE))
    }
}

impl std::ops::Mul for &FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: &FockOperator) -> FockOperator {
        FockOperator::new(&self.entries * &rhs.entries)
    }
}

impl std::ops::Add for &FockOperator {
    type Output = FockOperator;
    fn add(self, rhs: &FockOperator) -> FockOperator {
        FockOperator::new(&self.entries + &rhs.entries)
    }
}

impl std::ops::Sub for &FockOperator {
    type Output = FockOperator;
    fn sub(self, rhs: &FockOperator) -> FockOperator {
        FockOperator::new(&self.entries - &rhs.entries)
    }
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Commutator AB − BA.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub(crate) fn check_dim(n: usize) -> crate::Result<()> {
    if n < 2 {
        Err(crate::Error::InvalidDimension(n))
    } else {
        Ok(())
    }
}
