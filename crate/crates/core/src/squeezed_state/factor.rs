use super::params::{wrap_phase, SqueezeParams};
use crate::fock_core::{check_dim, CMatrix, DensityMatrix, C64};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Normal-ordered form K e^{J* a†²} e^{−B a†a} e^{J a²} of exp(λ S a†a S†).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizedForm {
    pub k: C64,
    pub j: C64,
    pub b: f64,
}

/// j(r, λ) = sinh r cosh r (e^{2λ} − 1) / (2(cosh²r − sinh²r e^{2λ})).
pub fn j_of(r: f64, lambda: f64) -> f64 {
    let (s, c) = (r.sinh(), r.cosh());
    let e2 = (2.0 * lambda).exp();
    s * c * (2.0 * lambda).exp_m1() / (2.0 * (c * c - s * s * e2))
}

fn b_argument(r: f64, lambda: f64) -> f64 {
    let (s2, c2) = (r.sinh().powi(2), r.cosh().powi(2));
    let el = lambda.exp();
    1.0 + lambda.exp_m1() * (c2 + s2 * el) / (c2 - s2 * el * el)
}

/// B(r, λ) = −ln(1 + (e^λ − 1)(cosh²r + sinh²r e^λ)/(cosh²r − sinh²r e^{2λ})).
pub fn b_of(r: f64, lambda: f64) -> Result<f64> {
    let arg = b_argument(r, lambda);
    if !(arg > 1e-14) {
        return Err(Error::DegenerateParameters(format!(
            "log argument {arg:e} of B at r={r}, lambda={lambda}"
        )));
    }
    Ok(-arg.ln())
}

/// K = (cosh²r − sinh²r e^{2λ})^{−1/2}.
pub fn k_of(r: f64, lambda: f64) -> f64 {
    let (s2, c2) = (r.sinh().powi(2), r.cosh().powi(2));
    (c2 - s2 * (2.0 * lambda).exp()).powf(-0.5)
}

/// Raw factorization in terms of λ; rejects λ ≥ 0.
pub fn factorize_lambda(r: f64, phi: f64, lambda: f64) -> Result<FactorizedForm> {
    if !(lambda < 0.0) {
        return Err(Error::UnsupportedRegime(lambda));
    }
    let b = b_of(r, lambda)?;
    let j = C64::from_polar(1.0, -phi) * j_of(r, lambda);
    let k = k_of(r, lambda);
    let f = FactorizedForm { k: C64::new(k, 0.0), j, b };
    let z = -1.0 / lambda.exp_m1();
    let witness = f.k.re * normal_ordered_trace(j.norm(), b)?;
    if ((witness - z) / z).abs() > 1e-8 {
        return Err(Error::Consistency(format!(
            "K = {k} fails the trace witness ({witness} vs {z}) at r={r}, lambda={lambda}"
        )));
    }
    Ok(f)
}

pub fn factorize(p: &SqueezeParams) -> Result<FactorizedForm> {
    factorize_lambda(p.r(), p.phi(), p.lambda())
}

/// Tr(e^{J* a†²} e^{−B a†a} e^{J a²}) on the untruncated space, |J| = `jabs`.
///
/// Expanding both exponentials and summing the geometric series in the
/// number index first gives Σ_k C(2k,k) |J|^{2k}/(1−x)^{2k+1} with x = e^{−B},
/// which resums to ((1−x)² − 4|J|²)^{−1/2}.
pub fn normal_ordered_trace(jabs: f64, b: f64) -> Result<f64> {
    let gap = -(-b).exp_m1();
    if !(b > 0.0) || !(gap > 2.0 * jabs) {
        return Err(Error::DegenerateParameters(format!(
            "normal-ordered trace diverges for |J|={jabs}, B={b}"
        )));
    }
    Ok(1.0 / ((gap - 2.0 * jabs) * (gap + 2.0 * jabs)).sqrt())
}

/// e^{J* a†²} truncated to `n` levels (lower triangular, hence exact).
pub fn pair_creation_exponential(j: C64, n: usize) -> CMatrix {
    let jc = j.conj();
    let mut l = CMatrix::zeros(n, n);
    for m in 0..n {
        let mut v = C64::new(1.0, 0.0);
        l[(m, m)] = v;
        let mut k = 1;
        while m + 2 * k < n {
            let top = (m + 2 * k) as f64;
            v *= jc * (top * (top - 1.0)).sqrt() / k as f64;
            l[(m + 2 * k, m)] = v;
            k += 1;
        }
    }
    l
}

/// The truncated product K e^{J* a†²} e^{−B a†a} e^{J a²}.
pub fn factorized_product(f: &FactorizedForm, n: usize) -> Result<CMatrix> {
    check_dim(n)?;
    let l = pair_creation_exponential(f.j, n);
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |k, _| {
        C64::new((-f.b * k as f64).exp(), 0.0)
    }));
    Ok(&l * d * l.adjoint() * f.k)
}

/// Unit-trace state built from the factorized form.
pub fn factorized_state(f: &FactorizedForm, n: usize) -> Result<DensityMatrix> {
    Ok(DensityMatrix::new(factorized_product(f, n)?).normalized())
}

/// Squeezed thermal density matrix on `n` levels.
pub fn squeezed_thermal(p: &SqueezeParams, n: usize) -> Result<DensityMatrix> {
    factorized_state(&factorize(p)?, n)
}

/// Recover (r, φ, ε) from (J, B) by damped Newton on (j, B).
pub fn unfactorize(f: &FactorizedForm) -> Result<SqueezeParams> {
    let target_j = f.j.norm();
    let target_b = f.b;
    if !(target_b > 0.0) {
        return Err(Error::OutOfDomain(format!("B = {target_b} is not positive")));
    }
    if target_j == 0.0 {
        return SqueezeParams::new(0.0, 0.0, target_b);
    }
    let residual = |r: f64, eps: f64| -> Option<(f64, f64)> {
        let bb = b_of(r, -eps).ok()?;
        Some((j_of(r, -eps) + target_j, bb - target_b))
    };
    let mut eps = target_b.clamp(1e-4, 50.0);
    let mut r = (2.0 * target_j / (-(-2.0 * eps).exp_m1())).clamp(0.0, 10.0);
    let mut converged = false;
    for _ in 0..200 {
        let Some((f0, g0)) = residual(r, eps) else { break };
        if f0.abs() < 1e-15 && g0.abs() < 1e-14 * target_b.max(1.0) {
            converged = true;
            break;
        }
        let hr = 1e-7 * (1.0 + r);
        let he = 1e-7 * eps;
        let (Some((fr, gr)), Some((fe, ge))) = (residual(r + hr, eps), residual(r, eps + he)) else {
            break;
        };
        let (a11, a12, a21, a22) = ((fr - f0) / hr, (fe - f0) / he, (gr - g0) / hr, (ge - g0) / he);
        let det = a11 * a22 - a12 * a21;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dr = (a22 * f0 - a12 * g0) / det;
        let de = (a11 * g0 - a21 * f0) / det;
        let norm0 = f0.hypot(g0);
        let mut step = 1.0;
        loop {
            let rn = (r - step * dr).clamp(0.0, 10.0);
            let en = (eps - step * de).clamp(1e-4, 50.0);
            if let Some((f1, g1)) = residual(rn, en) {
                if f1.hypot(g1) < norm0 || step < 1e-6 {
                    r = rn;
                    eps = en;
                    break;
                }
            }
            step *= 0.5;
            if step < 1e-9 {
                break;
            }
        }
    }
    if !converged {
        if let Some((f0, g0)) = residual(r, eps) {
            converged = f0.abs() < 1e-12 && g0.abs() < 1e-11 * target_b.max(1.0);
        }
    }
    if !converged {
        return Err(Error::OutOfDomain(format!("J = {}, B = {target_b}", f.j)));
    }
    SqueezeParams::new(r, wrap_phase(PI - f.j.arg()), eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_core::max_abs;

    #[test]
    fn trace_matches_direct_series() {
        for (j, b) in [(0.1, 0.5), (0.3, 1.2), (0.02, 0.1)] {
            let x: f64 = (-b as f64).exp();
            let mut total = 0.0;
            for m in 0..4000usize {
                let mut term = x.powi(m as i32);
                let mut inner = term;
                for k in 1..2000usize {
                    let top = (m + 2 * k) as f64;
                    term *= j * j * top * (top - 1.0) / (k * k) as f64;
                    inner += term;
                    if term < 1e-18 * inner {
                        break;
                    }
                }
                total += inner;
            }
            let closed = normal_ordered_trace(j, b).unwrap();
            assert!(((closed - total) / closed).abs() < 1e-10, "{closed} vs {total}");
        }
        assert!(normal_ordered_trace(0.3, 0.4).is_err());
    }

    #[test]
    fn unsqueezed_branch() {
        let f = factorize(&SqueezeParams::thermal(1.0).unwrap()).unwrap();
        assert_eq!(f.j, C64::new(0.0, 0.0));
        assert!((f.b - 1.0).abs() < 1e-15);
        assert!((f.k.re - 1.0).abs() < 1e-15);
        let p = unfactorize(&FactorizedForm { k: C64::new(1.0, 0.0), j: C64::new(0.0, 0.0), b: 1.5 }).unwrap();
        assert_eq!(p.r(), 0.0);
        assert!((p.epsilon() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn phase_convention() {
        let phi = std::f64::consts::FRAC_PI_3;
        let f = factorize(&SqueezeParams::new(0.4, phi, 1.0).unwrap()).unwrap();
        assert!(j_of(0.4, -1.0) < 0.0);
        assert!((f.j.arg() - (PI - phi)).abs() < 1e-12);
        let real_positive = FactorizedForm { k: C64::new(1.0, 0.0), j: C64::new(0.1, 0.0), b: 1.2 };
        assert!((unfactorize(&real_positive).unwrap().phi() - PI).abs() < 1e-12);
    }

    #[test]
    fn known_k_value() {
        assert!((k_of(0.5, -1.0) - 0.8999).abs() < 1e-4);
    }

    #[test]
    fn rejects_nonnegative_lambda() {
        assert_eq!(factorize_lambda(0.2, 0.0, 0.0).unwrap_err(), Error::UnsupportedRegime(0.0));
    }

    #[test]
    fn round_trip_example() {
        let p = SqueezeParams::new(0.7, 1.1, 2.0).unwrap();
        let q = unfactorize(&factorize(&p).unwrap()).unwrap();
        assert!((q.r() - 0.7).abs() < 1e-8);
        assert!((q.phi() - 1.1).abs() < 1e-8);
        assert!((q.epsilon() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn pair_exponential_is_lower_triangular_series() {
        let j = C64::new(0.1, -0.2);
        let n = 12;
        let l = pair_creation_exponential(j, n);
        let (_, ad) = crate::fock_core::build_ladder(40).unwrap();
        let dense = (&ad.entries * &ad.entries * j.conj()).exp();
        assert!(max_abs(&(l - dense.view((0, 0), (n, n)))) < 1e-12);
    }
}
