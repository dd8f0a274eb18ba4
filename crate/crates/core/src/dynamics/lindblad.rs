use super::model::{Instant, MasterModel};
use crate::fock_core::{Banded, CMatrix, C64};
use crate::{DensityMatrix, Error, Result};

/// Fixed-step options for [`integrate_master`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrateOptions {
    pub steps: usize,
    /// Keep every k-th state (0 keeps only the end points).
    pub sample_every: usize,
}

impl IntegrateOptions {
    pub fn new(steps: usize) -> Self {
        Self { steps, sample_every: 0 }
    }

    pub fn sampled(steps: usize, samples: usize) -> Self {
        Self { steps, sample_every: (steps / samples.max(1)).max(1) }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub max_trace_drift: f64,
    /// Largest anti-Hermitian part removed by symmetrization.
    pub max_symmetrization: f64,
}

impl Trajectory {
    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory has at least one state")
    }
}

/// y += a·x elementwise.
fn axpy(y: &mut CMatrix, a: C64, x: &CMatrix) {
    for (u, v) in y.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *u += a * v;
    }
}

/// Right-hand side of the master equation on dense states.
pub struct FockGenerator {
    n: usize,
    tmp: CMatrix,
    tmp2: CMatrix,
}

impl FockGenerator {
    pub fn new(n: usize) -> Self {
        Self { n, tmp: CMatrix::zeros(n, n), tmp2: CMatrix::zeros(n, n) }
    }

    /// out = L_t(ρ).
    pub fn apply(&mut self, inst: &Instant, rho: &CMatrix, out: &mut CMatrix) {
        let n = self.n;
        out.fill(C64::new(0.0, 0.0));
        let q = inst.hamiltonian;
        let h = Banded::quadratic(n, q.number, q.pair, q.pair.conj());
        h.left_acc(rho, C64::new(0.0, -1.0), out);
        h.right_acc(rho, C64::new(0.0, 1.0), out);
        for jump in &inst.jumps {
            if jump.rate == 0.0 {
                continue;
            }
            let l = jump.operator(n);
            let ld = l.adjoint();
            let ldl = ld.mul(&l);
            self.tmp.fill(C64::new(0.0, 0.0));
            l.left_acc(rho, C64::new(1.0, 0.0), &mut self.tmp);
            ld.right_acc(&self.tmp, C64::new(jump.rate, 0.0), out);
            ldl.left_acc(rho, C64::new(-0.5 * jump.rate, 0.0), out);
            ldl.right_acc(rho, C64::new(-0.5 * jump.rate, 0.0), out);
        }
        if inst.renormalized != 0.0 {
            let one = C64::new(1.0, 0.0);
            let x = Banded::linear(n, one, one);
            self.tmp.fill(C64::new(0.0, 0.0));
            self.tmp2.fill(C64::new(0.0, 0.0));
            x.left_acc(rho, one, &mut self.tmp);
            x.right_acc(&self.tmp, one, &mut self.tmp2);
            let c = inst.renormalized;
            let tr = self.tmp2.trace();
            axpy(out, C64::new(c, 0.0), &self.tmp2);
            axpy(out, -tr * c, rho);
        }
    }
}

fn frobenius_sq(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Classical RK4 from `t0` to `t1` (backwards when t1 < t0).
///
/// The state is symmetrized after every step. A trace drift above 1e−6 is a
/// step-size error; growth of ‖ρ‖_F beyond 1 signals an ill-posed direction
/// (anti-diffusion integrated forwards) and aborts.
pub fn integrate_master(
    model: &dyn MasterModel,
    rho0: &DensityMatrix,
    t0: f64,
    t1: f64,
    opts: IntegrateOptions,
) -> Result<Trajectory> {
    let n = rho0.dim();
    let steps = opts.steps.max(1);
    let h = (t1 - t0) / steps as f64;
    let mut gen = FockGenerator::new(n);
    let mut rho = rho0.hermitian_part();
    let (mut k1, mut k2, mut k3, mut k4) =
        (CMatrix::zeros(n, n), CMatrix::zeros(n, n), CMatrix::zeros(n, n), CMatrix::zeros(n, n));
    let mut stage = CMatrix::zeros(n, n);
    let mut out = Trajectory {
        times: vec![t0],
        states: vec![DensityMatrix::new(rho.clone())],
        max_trace_drift: (rho.trace().re - 1.0).abs(),
        max_symmetrization: 0.0,
    };
    let start_norm = frobenius_sq(&rho).sqrt();
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        let (i0, im, i1) = (model.at(t), model.at(t + 0.5 * h), model.at(t + h));
        gen.apply(&i0, &rho, &mut k1);
        stage.copy_from(&rho);
        axpy(&mut stage, C64::new(0.5 * h, 0.0), &k1);
        gen.apply(&im, &stage, &mut k2);
        stage.copy_from(&rho);
        axpy(&mut stage, C64::new(0.5 * h, 0.0), &k2);
        gen.apply(&im, &stage, &mut k3);
        stage.copy_from(&rho);
        axpy(&mut stage, C64::new(h, 0.0), &k3);
        gen.apply(&i1, &stage, &mut k4);
        let w = C64::new(h / 6.0, 0.0);
        axpy(&mut rho, w, &k1);
        axpy(&mut rho, w * 2.0, &k2);
        axpy(&mut rho, w * 2.0, &k3);
        axpy(&mut rho, w, &k4);
        let tn = t0 + (k + 1) as f64 * h;
        let herm = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
        let corr = (&rho - &herm).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        out.max_symmetrization = out.max_symmetrization.max(corr);
        rho = herm;
        let norm = frobenius_sq(&rho).sqrt();
        if !norm.is_finite() || norm > start_norm.max(1.0) * (1.0 + 1e-3) {
            return Err(Error::IllPosed {
                t: tn,
                reason: format!("state norm grew to {norm:.3e}; integrate this segment in the opposite direction"),
            });
        }
        let drift = (rho.trace().re - 1.0).abs();
        out.max_trace_drift = out.max_trace_drift.max(drift);
        if drift > 1e-6 {
            return Err(Error::StepSize { reason: format!("trace drift {drift:e} at t = {tn}"), suggested_dt: 0.5 * h.abs() });
        }
        let keep = opts.sample_every > 0 && (k + 1) % opts.sample_every == 0;
        if keep || k + 1 == steps {
            out.times.push(tn);
            out.states.push(DensityMatrix::new(rho.clone()));
        }
    }
    Ok(out)
}

/// Checks that the step resolves the fastest coherent and dissipative scales
/// (at least 50 steps per period) on the sampled instants.
pub fn check_resolution(model: &dyn MasterModel, t0: f64, t1: f64, steps: usize) -> Result<()> {
    let h = ((t1 - t0) / steps.max(1) as f64).abs();
    let mut fastest: f64 = 0.0;
    for k in 0..=steps.min(2000) {
        let t = t0 + (t1 - t0) * k as f64 / steps.min(2000).max(1) as f64;
        let inst = model.at(t);
        let q = inst.hamiltonian;
        let mode = (q.number * q.number - 4.0 * q.pair.norm_sqr()).abs().sqrt();
        fastest = fastest.max(2.0 * mode).max(2.0 * q.pair.norm()).max(inst.max_rate());
    }
    let limit = 2.0 * std::f64::consts::PI / 50.0;
    if fastest * h > limit {
        return Err(Error::StepSize {
            reason: format!("step {h:e} resolves fewer than 50 steps per period of the fastest scale {fastest:e}"),
            suggested_dt: limit / fastest,
        });
    }
    Ok(())
}
