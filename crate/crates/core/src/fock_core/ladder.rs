use super::{check_dim, CMatrix, FockOperator, C64};
use crate::{Error, Result, UnitSystem};

/// Annihilation and creation operators, a|n⟩ = √n|n−1⟩.
pub fn build_ladder(n: usize) -> Result<(FockOperator, FockOperator)> {
    check_dim(n)?;
    let mut a = CMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    let ad = a.adjoint();
    Ok((FockOperator::new(a), FockOperator::new(ad)))
}

pub fn number_operator(n: usize) -> Result<FockOperator> {
    check_dim(n)?;
    Ok(FockOperator::new(CMatrix::from_diagonal(
        &nalgebra::DVector::from_fn(n, |k, _| C64::new(k as f64, 0.0)),
    )))
}

/// x = x₀(a + a†) and p = i p₀(a† − a) for the oscillator of frequency `omega`.
pub fn quadratures(n: usize, omega: f64, units: UnitSystem) -> Result<(FockOperator, FockOperator)> {
    if !(omega > 0.0) {
        return Err(Error::InvalidFrequency(omega));
    }
    let (a, ad) = build_ladder(n)?;
    let x = (&a.entries + &ad.entries) * C64::new(units.x0(omega), 0.0);
    let p = (&ad.entries - &a.entries) * C64::new(0.0, units.p0(omega));
    Ok((FockOperator::new(x), FockOperator::new(p)))
}

/// Working dimension used to build S before truncating to `n`.
///
/// A squeezed number state |k⟩ spreads over ~k e^{2|r|} levels, so the
/// exponential is taken in a larger space and only the leading block is kept.
pub fn squeeze_padding(n: usize, r: f64) -> usize {
    let spread = (1.5 * n as f64 * (2.0 * r.abs()).exp()).ceil() as usize;
    (n + spread.max(60)).min(1600).max(n)
}

/// S(r, φ) = exp((r/2)(e^{−iφ}a² − e^{iφ}a†²)), leading `n`×`n` block.
pub fn squeeze_operator(r: f64, phi: f64, n: usize) -> Result<FockOperator> {
    check_dim(n)?;
    if r == 0.0 {
        return Ok(FockOperator::identity(n));
    }
    let s = squeeze_unpadded(r, phi, squeeze_padding(n, r))?;
    Ok(FockOperator::new(s.block(n)))
}

/// Exponential taken directly in dimension `n`; exact only away from the edge.
pub(crate) fn squeeze_unpadded(r: f64, phi: f64, n: usize) -> Result<FockOperator> {
    let (a, ad) = build_ladder(n)?;
    let a2 = &a.entries * &a.entries;
    let ad2 = &ad.entries * &ad.entries;
    let z = C64::from_polar(0.5 * r, -phi);
    Ok(FockOperator::new((a2 * z - ad2 * z.conj()).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_core::{commutator, max_abs};

    #[test]
    fn ladder_n3_entries() {
        let (a, _) = build_ladder(3).unwrap();
        let mut expect = CMatrix::zeros(3, 3);
        expect[(0, 1)] = C64::new(1.0, 0.0);
        expect[(1, 2)] = C64::new(2f64.sqrt(), 0.0);
        assert!(max_abs(&(&a.entries - expect)) == 0.0);
    }

    #[test]
    fn commutator_interior() {
        let (a, ad) = build_ladder(3).unwrap();
        let c = commutator(&a.entries, &ad.entries);
        let id = CMatrix::identity(2, 2);
        assert!(max_abs(&(c.view((0, 0), (2, 2)) - id)) < 1e-15);

        let (a, ad) = build_ladder(40).unwrap();
        let c = commutator(&a.entries, &ad.entries);
        assert!(max_abs(&(c.view((0, 0), (35, 35)) - CMatrix::identity(35, 35))) <= 1e-12);
    }

    #[test]
    fn rejects_small_dimension() {
        assert_eq!(build_ladder(1).unwrap_err(), Error::InvalidDimension(1));
    }

    #[test]
    fn quadrature_scale_and_ground_variance() {
        let (x, p) = quadratures(40, 1.0, UnitSystem::default()).unwrap();
        assert!((x.entries[(0, 1)].re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(x.hermiticity_error() < 1e-12 && p.hermiticity_error() < 1e-12);
        let x2 = &x.entries * &x.entries;
        assert!((x2[(0, 0)].re - 0.5).abs() < 1e-14);
        let c = commutator(&x.entries, &p.entries);
        let k = 35;
        let target = CMatrix::identity(k, k) * C64::new(0.0, 1.0);
        assert!(max_abs(&(c.view((0, 0), (k, k)) - target)) < 1e-12);
        assert!(quadratures(4, 0.0, UnitSystem::default()).is_err());
    }

    #[test]
    fn squeeze_identity_at_zero() {
        let s = squeeze_operator(0.0, 0.3, 6).unwrap();
        assert_eq!(s.entries, CMatrix::identity(6, 6));
    }

    fn conjugation_error(r: f64, phi: f64) -> f64 {
        let n = 40;
        let s = squeeze_operator(r, phi, n).unwrap();
        let sw = squeeze_unpadded(r, phi, squeeze_padding(n, r)).unwrap();
        let (a, ad) = build_ladder(sw.dim()).unwrap();
        let lhs = &sw.entries * &a.entries * sw.entries.adjoint();
        let rhs = &a.entries * C64::new(r.cosh(), 0.0) + &ad.entries * C64::from_polar(r.sinh(), phi);
        let k = n - 5;
        assert!(max_abs(&(s.block(k) - sw.block(k))) < 1e-12);
        max_abs(&(lhs.view((0, 0), (k, k)) - rhs.view((0, 0), (k, k))))
    }

    #[test]
    fn squeeze_conjugation_phi_zero() {
        assert!(conjugation_error(0.5, 0.0) < 1e-8);
    }

    #[test]
    fn squeeze_conjugation_phi_third() {
        assert!(conjugation_error(0.5, std::f64::consts::FRAC_PI_3) < 1e-8);
    }
}
