//! The transfer matrices against the master equation itself: the velocity
//! M(J, B)·(κ, α_R, α_I) must be the tangent of the factorized manifold that
//! the Fock generator produces.

use nalgebra::Vector3;
use sqzsta::dynamics::{FockGenerator, MasterModel, RamanModel};
use sqzsta::fock_core::{max_abs, CMatrix, C64};
use sqzsta::raman_protocol::{variant_matrix, RamanControls, RamanPoint, Variant};
use sqzsta::squeezed_state::{factorize, factorized_state};
use sqzsta::{FactorizedForm, SqueezeParams, UnitSystem};

const N: usize = 120;
const INTERIOR: usize = 40;

fn constant_controls(variant: Variant, alpha: C64, kappa: f64) -> RamanModel {
    let points = vec![RamanPoint::new(0.0, alpha, kappa), RamanPoint::new(1.0, alpha, kappa)];
    RamanModel::new(RamanControls::from_points(variant, points).unwrap(), 1.0, UnitSystem::default())
}

fn state(j: C64, b: f64) -> CMatrix {
    factorized_state(&FactorizedForm { k: C64::new(1.0, 0.0), j, b }, N).unwrap().entries
}

fn check(variant: Variant, p: SqueezeParams, alpha: C64, kappa: f64) {
    let f = factorize(&p).unwrap();
    let v = variant_matrix(variant, f.j, f.b) * Vector3::new(kappa, alpha.re, alpha.im);
    let jdot = C64::new(v[0], v[1]);
    let h = 1e-5;
    let tangent = (state(f.j + jdot * h, f.b + v[2] * h) - state(f.j - jdot * h, f.b - v[2] * h)) / C64::new(2.0 * h, 0.0);

    let rho = state(f.j, f.b);
    let model = constant_controls(variant, alpha, kappa);
    let mut out = CMatrix::zeros(N, N);
    FockGenerator::new(N).apply(&model.at(0.5), &rho, &mut out);

    let d = tangent.view((0, 0), (INTERIOR, INTERIOR)) - out.view((0, 0), (INTERIOR, INTERIOR));
    let scale = max_abs(&out.view((0, 0), (INTERIOR, INTERIOR)).into_owned());
    assert!(max_abs(&d) < 1e-7 * scale.max(1.0), "{variant:?} {p:?}: {} vs scale {scale}", max_abs(&d));
}

#[test]
fn two_laser_matrix_is_generator_tangent() {
    let cases = [
        (SqueezeParams::new(0.3, 0.4, 1.0).unwrap(), C64::new(0.2, -0.1), 0.15),
        (SqueezeParams::new(0.6, -1.1, 0.7).unwrap(), C64::new(-0.05, 0.3), -0.08),
        (SqueezeParams::new(0.0, 0.0, 1.5).unwrap(), C64::new(0.1, 0.1), 0.3),
    ];
    for (p, a, k) in cases {
        check(Variant::TwoLaser, p, a, k);
    }
}

#[test]
fn four_laser_matrix_is_generator_tangent() {
    let cases = [
        (SqueezeParams::new(0.3, 0.4, 1.0).unwrap(), C64::new(0.2, -0.1), 0.15),
        (SqueezeParams::new(0.5, 2.0, 0.8).unwrap(), C64::new(0.0, 0.2), 0.4),
    ];
    for (p, a, k) in cases {
        check(Variant::FourLaser, p, a, k);
    }
}
