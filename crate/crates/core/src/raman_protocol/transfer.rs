use crate::fock_core::C64;
use nalgebra::Matrix3;

/// Which engineered dissipator the controls drive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Variant {
    /// Two Raman beams: κ multiplies D(a) + D(a†).
    TwoLaser,
    /// Four beams (Jaynes–Cummings form): κ multiplies the trace-renormalized X ρ X term.
    FourLaser,
}

/// Map from (κ, α_R, α_I) to (J̇_R, J̇_I, Ḃ) for the two-laser master equation.
pub fn transfer_matrix(j: C64, b: f64) -> Matrix3<f64> {
    let (jr, ji) = (j.re, j.im);
    let d = jr * jr - ji * ji;
    let e1 = (-b).exp();
    let e2 = (-2.0 * b).exp();
    Matrix3::new(
        4.0 * (e1 - 1.0) * jr, -8.0 * ji * jr, 4.0 * d + e2 - 1.0,
        4.0 * (e1 - 1.0) * ji, 4.0 * d + 1.0 - e2, 8.0 * jr * ji,
        -4.0 * (b.cosh() - 1.0 + 2.0 * b.exp() * j.norm_sqr()), 8.0 * ji, -8.0 * jr,
    )
}

/// Four-laser counterpart: only the κ column differs.
pub fn jc_transfer_matrix(j: C64, b: f64) -> Matrix3<f64> {
    let mut m = transfer_matrix(j, b);
    let e1 = (-b).exp();
    m[(0, 0)] = 0.25 * e1 * (1.0 + 2.0 * j.re);
    m[(1, 0)] = 0.5 * e1 * j.im;
    m[(2, 0)] = -(0.5 * b.cosh() + b.exp() * (j.norm_sqr() + j.re));
    m
}

pub fn variant_matrix(variant: Variant, j: C64, b: f64) -> Matrix3<f64> {
    match variant {
        Variant::TwoLaser => transfer_matrix(j, b),
        Variant::FourLaser => jc_transfer_matrix(j, b),
    }
}

/// 2-norm condition number of a 3×3 matrix (infinite when singular).
pub fn condition_number(m: &Matrix3<f64>) -> f64 {
    let s = m.singular_values();
    let (hi, lo) = (s.max(), s.min());
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}
