use super::controls::TrapControls;
use crate::fock_core::{build_ladder, check_dim, commutator, Banded, CMatrix, FockOperator, C64};
use crate::squeezed_state::SqueezeParams;
use crate::{DensityMatrix, Error, Result, UnitSystem};

/// H/ħ of p²/2m + ½mω_c²x² in the ω₀ number basis (constant dropped):
/// ½(ω₀ + ω_c²/ω₀) a†a + ¼(ω_c²/ω₀ − ω₀)(a² + a†²).
pub fn trap_hamiltonian(omega_c_sq: f64, omega0: f64, n: usize) -> Banded {
    let g = C64::new(0.25 * (omega_c_sq / omega0 - omega0), 0.0);
    Banded::quadratic(n, 0.5 * (omega0 + omega_c_sq / omega0), g, g)
}


/// H_CD = ħ(φ̇/2)(A†A − a†a) + iħ(ṙ/2)(a²e^{−iφ} − a†²e^{iφ}), A = S a S†.
///
/// A†A − a†a = 2 sinh²r a†a + sinh²r + cosh r sinh r (e^{−iφ}a² + e^{iφ}a†²).
pub fn cd_hamiltonian(p: &SqueezeParams, rdot: f64, phidot: f64, n: usize, units: UnitSystem) -> Result<FockOperator> {
    check_dim(n)?;
    let (c, s) = (p.r().cosh(), p.r().sinh());
    let z = C64::from_polar(1.0, -p.phi());
    let half_phi = 0.5 * phidot;
    let rot = C64::new(0.0, 0.5 * rdot);
    let g = z * (half_phi * c * s) + rot * z;
    let h = z.conj() * (half_phi * c * s) - rot * z.conj();
    let mut m = Banded::quadratic(n, 2.0 * half_phi * s * s, g, h).to_dense();
    for k in 0..n {
        m[(k, k)] += half_phi * s * s;
    }
    Ok(FockOperator::new(m * C64::new(units.hbar, 0.0)))
}

/// −γ[x,[x,ρ]].
pub fn control_dissipator(rho: &DensityMatrix, gamma: f64, x: &FockOperator) -> Result<CMatrix> {
    if rho.dim() != x.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), x.dim()));
    }
    let inner = commutator(&x.entries, &rho.entries);
    Ok(commutator(&x.entries, &inner) * C64::new(-gamma, 0.0))
}

/// General control dissipator
/// (Ω₁/2)[b² − b†², ρ] − ε̇ ρ (b†b + 1/(1 − e^ε)),
/// b = a_t − i(Ω/(2ω_t))(a_t + a_t†), a_t the ladder operator of the ω_t oscillator.
/// It coincides with the double-commutator form only on the designed state.
pub fn b_form_dissipator(rho: &DensityMatrix, controls: &TrapControls, t: f64) -> Result<CMatrix> {
    let n = rho.dim();
    check_dim(n)?;
    let w = controls.omega.value(t);
    let r = 0.5 * (w / controls.omega0()).ln();
    let (_, _, o1, _) = controls.omega_terms(t);
    let om = controls.omega_total(t);
    let (e, ed, _) = controls.epsilon_jet(t);
    let k = C64::new(0.0, -om / (2.0 * w));
    let (c, s) = (C64::new(r.cosh(), 0.0), C64::new(r.sinh(), 0.0));
    // b = (c + k(c + s)) a + (s + k(c + s)) a†
    let b = Banded::linear(n, c + k * (c + s), s + k * (c + s)).to_dense();
    let bd = b.adjoint();
    let sq = &b * &b - &bd * &bd;
    let mut out = commutator(&sq, &rho.entries) * C64::new(0.5 * o1, 0.0);
    let shift = CMatrix::identity(n, n) * C64::new(1.0 / (-e.exp_m1()), 0.0);
    out -= &rho.entries * (&bd * &b + shift) * C64::new(ed, 0.0);
    Ok(out)
}

/// a_t of the ω_t oscillator expressed in the ω₀ basis, for diagnostics.
pub fn instantaneous_ladder(omega_t: f64, omega0: f64, n: usize) -> Result<FockOperator> {
    let (a, ad) = build_ladder(n)?;
    let r = 0.5 * (omega_t / omega0).ln();
    Ok(FockOperator::new(&a.entries * C64::new(r.cosh(), 0.0) + &ad.entries * C64::new(r.sinh(), 0.0)))
}
