use super::model::{Instant, MasterModel};
use crate::fock_core::C64;
use crate::{Error, GaussianMoments, Result};

/// Second moments ⟨a†a⟩, ⟨a²⟩ of a zero-mean state in the ω₀ basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderMoments {
    pub n: f64,
    pub s: C64,
}

/// Time derivative of (n, s) under a quadratic generator, from the
/// Heisenberg equations of a†a and a².
pub fn moment_rhs(inst: &Instant, m: LadderMoments) -> Result<LadderMoments> {
    if inst.renormalized != 0.0 {
        return Err(Error::Unsupported("trace-renormalized dissipator has no closed moment equations".into()));
    }
    let (e, g) = (inst.hamiltonian.number, inst.hamiltonian.pair);
    let mut dn = -4.0 * (g * m.s).im;
    let mut ds = -C64::new(0.0, 1.0) * (m.s * (2.0 * e) + g.conj() * (4.0 * m.n + 2.0));
    for j in &inst.jumps {
        let (u2, v2) = (j.u.norm_sqr(), j.v.norm_sqr());
        dn += j.rate * (v2 * (m.n + 1.0) - u2 * m.n);
        ds += (m.s * (v2 - u2) - j.u.conj() * j.v) * j.rate;
    }
    Ok(LadderMoments { n: dn, s: ds })
}

/// Moments trajectory sampled at every `sample_every`-th step (and the ends).
pub fn evolve_covariance(
    model: &dyn MasterModel,
    m0: &GaussianMoments,
    t0: f64,
    t1: f64,
    steps: usize,
    sample_every: usize,
) -> Result<Vec<(f64, GaussianMoments)>> {
    let (w0, units) = (model.omega0(), model.units());
    let (n, s) = m0.to_ladder(w0, units);
    let mut y = LadderMoments { n, s };
    let steps = steps.max(1);
    let h = (t1 - t0) / steps as f64;
    let add = |a: LadderMoments, b: LadderMoments, k: f64| LadderMoments { n: a.n + k * b.n, s: a.s + b.s * k };
    let mut out = vec![(t0, *m0)];
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        let (i0, im, i1) = (model.at(t), model.at(t + 0.5 * h), model.at(t + h));
        let k1 = moment_rhs(&i0, y)?;
        let k2 = moment_rhs(&im, add(y, k1, 0.5 * h))?;
        let k3 = moment_rhs(&im, add(y, k2, 0.5 * h))?;
        let k4 = moment_rhs(&i1, add(y, k3, h))?;
        y = LadderMoments {
            n: y.n + h / 6.0 * (k1.n + 2.0 * k2.n + 2.0 * k3.n + k4.n),
            s: y.s + (k1.s + k2.s * 2.0 + k3.s * 2.0 + k4.s) * (h / 6.0),
        };
        if !y.n.is_finite() || !y.s.is_finite() {
            return Err(Error::IllPosed { t: t + h, reason: "moments diverged".into() });
        }
        if (sample_every > 0 && (k + 1) % sample_every == 0) || k + 1 == steps {
            let mut g = GaussianMoments::from_ladder(y.n, y.s, w0, units);
            g.mean = m0.mean;
            out.push((t0 + (k + 1) as f64 * h, g));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::model::{LinearJump, Quadratic};
    use super::*;
    use crate::fock_core::{build_ladder, expectation, thermal_state, CMatrix};
    use crate::squeezed_state::squeezed_thermal;
    use crate::SqueezeParams;

    /// Moment derivatives from the dense Fock generator (trace oracle).
    fn fock_rates(inst: &Instant, rho: &CMatrix) -> (f64, C64) {
        let n = rho.nrows();
        let mut g = super::super::lindblad::FockGenerator::new(n);
        let mut d = CMatrix::zeros(n, n);
        g.apply(inst, rho, &mut d);
        let (a, _) = build_ladder(n).unwrap();
        let dm = crate::DensityMatrix::new(d);
        let num = a.entries.adjoint() * &a.entries;
        (expectation(&dm, &num).re, expectation(&dm, &(&a.entries * &a.entries)))
    }

    #[test]
    fn moment_equations_match_fock() {
        let n = 80;
        let p = SqueezeParams::new(0.4, 0.9, 1.5).unwrap();
        let rho = squeezed_thermal(&p, n).unwrap();
        let inst = Instant {
            hamiltonian: Quadratic { number: 1.7, pair: C64::new(-0.3, 0.25) },
            jumps: vec![
                LinearJump { rate: 0.6, u: C64::new(0.8, 0.1), v: C64::new(-0.2, 0.5) },
                LinearJump { rate: -0.3, u: C64::new(1.0, 0.0), v: C64::new(1.0, 0.0) },
            ],
            renormalized: 0.0,
        };
        let (n0, s0) = p.ladder_moments();
        let d = moment_rhs(&inst, LadderMoments { n: n0, s: s0 }).unwrap();
        let (fn_, fs) = fock_rates(&inst, &rho.entries);
        assert!((d.n - fn_).abs() < 1e-9 && (d.s - fs).norm() < 1e-9, "{d:?} {fn_} {fs}");
        let _ = thermal_state(1.0, 4).unwrap();
    }
}
