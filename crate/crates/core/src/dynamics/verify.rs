use super::gaussian::evolve_covariance;
use super::lindblad::{check_resolution, integrate_master, IntegrateOptions};
use super::model::MasterModel;
use crate::fock_core::{fidelity, von_neumann_entropy};
use crate::raman_protocol::StateFlow;
use crate::squeezed_state::{moments_from_density, squeezed_thermal, to_gaussian_moments};
use crate::trap_protocol::TrapControls;
use crate::{DensityMatrix, Error, GaussianMoments, Result, Schedule, SqueezeParams, UnitSystem};
use serde::{Deserialize, Serialize};

/// Designed state along a protocol, in the frame of the matching model.
pub trait DesignedPath: Sync {
    fn tf(&self) -> f64;
    fn moments(&self, t: f64) -> Result<GaussianMoments>;
    fn state(&self, t: f64, n: usize) -> Result<DensityMatrix>;
}

impl DesignedPath for TrapControls {
    fn tf(&self) -> f64 {
        TrapControls::tf(self)
    }
    fn moments(&self, t: f64) -> Result<GaussianMoments> {
        Ok(self.designed_moments(t))
    }
    fn state(&self, t: f64, n: usize) -> Result<DensityMatrix> {
        self.designed_state(t, n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RamanShape {
    Flow(StateFlow),
    /// Unitary squeezing r(t) at phase 0 and fixed ε.
    Closed { r: Schedule, epsilon: f64 },
}

/// Designed Raman state in the frame rotating at ω₀.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RamanPath {
    pub shape: RamanShape,
    pub omega0: f64,
    pub units: UnitSystem,
}

impl RamanPath {
    pub fn params(&self, t: f64) -> Result<SqueezeParams> {
        match self.shape {
            RamanShape::Flow(f) => f.params(t),
            RamanShape::Closed { r, epsilon } => SqueezeParams::new(r.value(t), 0.0, epsilon),
        }
    }
}

impl DesignedPath for RamanPath {
    fn tf(&self) -> f64 {
        match self.shape {
            RamanShape::Flow(f) => f.tf(),
            RamanShape::Closed { r, .. } => r.tf,
        }
    }
    fn moments(&self, t: f64) -> Result<GaussianMoments> {
        Ok(to_gaussian_moments(&self.params(t)?, self.omega0, self.units))
    }
    fn state(&self, t: f64, n: usize) -> Result<DensityMatrix> {
        squeezed_thermal(&self.params(t)?, n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// One constant-sign stretch of the dissipative rate, integrated in its
/// well-posed direction from the designed state at one end and compared with
/// the designed state at the other.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentCheck {
    pub t_start: f64,
    pub t_end: f64,
    pub direction: Direction,
    pub fidelity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    /// Fidelity with the designed state at the same instant (the target at tf).
    pub fidelity_to_target: f64,
    pub entropy: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub cov_xp: f64,
    pub trace_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Fock dimension; `None` runs the Gaussian oracle only.
    pub fock_dim: Option<usize>,
    pub steps: usize,
    pub samples: usize,
    pub fidelity_tol: f64,
    pub entropy_tol: f64,
}

impl VerifyOptions {
    pub fn new(fock_dim: Option<usize>, steps: usize) -> Self {
        Self { fock_dim, steps, samples: 20, fidelity_tol: 0.999, entropy_tol: 1e-4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub segments: Vec<SegmentCheck>,
    /// Smallest segment-end fidelity of the Fock oracle.
    pub fock_fidelity: Option<f64>,
    /// Fidelity of the forward Gaussian run with the target at tf.
    pub gaussian_fidelity: Option<f64>,
    pub target_entropy: f64,
    pub final_entropy: f64,
    /// Largest |Δcov| between the oracles at shared samples with a clean Fock tail.
    pub oracle_moment_gap: Option<f64>,
    pub max_trace_error: f64,
    pub non_lindblad: bool,
    pub rows: Vec<TrajectoryRow>,
    pub failures: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Moments rescaled so the vacuum covariance is I/2.
fn dimensionless(m: &GaussianMoments, omega0: f64, units: UnitSystem) -> ([f64; 2], [[f64; 2]; 2]) {
    let sx = 1.0 / (2f64.sqrt() * units.x0(omega0));
    let sp = 1.0 / (2f64.sqrt() * units.p0(omega0));
    (
        [m.mean[0] * sx, m.mean[1] * sp],
        [[m.cov[0][0] * sx * sx, m.cov[0][1] * sx * sp], [m.cov[1][0] * sx * sp, m.cov[1][1] * sp * sp]],
    )
}

/// Uhlmann fidelity of two single-mode Gaussian states.
pub fn gaussian_fidelity(a: &GaussianMoments, b: &GaussianMoments, omega0: f64, units: UnitSystem) -> f64 {
    let (ma, va) = dimensionless(a, omega0, units);
    let (mb, vb) = dimensionless(b, omega0, units);
    let s = [[va[0][0] + vb[0][0], va[0][1] + vb[0][1]], [va[1][0] + vb[1][0], va[1][1] + vb[1][1]]];
    let det_s = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    let det = |v: [[f64; 2]; 2]| v[0][0] * v[1][1] - v[0][1] * v[1][0];
    let lam = (4.0 * (det(va) - 0.25) * (det(vb) - 0.25)).max(0.0);
    let d = [ma[0] - mb[0], ma[1] - mb[1]];
    let quad = (s[1][1] * d[0] * d[0] - 2.0 * s[0][1] * d[0] * d[1] + s[0][0] * d[1] * d[1]) / det_s;
    (-0.5 * quad).exp() / ((det_s + lam).sqrt() - lam.sqrt())
}

/// Von Neumann entropy of a Gaussian state from its symplectic eigenvalue.
pub fn gaussian_entropy(m: &GaussianMoments, omega0: f64, units: UnitSystem) -> f64 {
    let (_, v) = dimensionless(m, omega0, units);
    let nu = (v[0][0] * v[1][1] - v[0][1] * v[1][0]).max(0.25).sqrt();
    let lo = nu - 0.5;
    let hi = nu + 0.5;
    hi * hi.ln() - if lo > 0.0 { lo * lo.ln() } else { 0.0 }
}

/// Maximal stretches of constant rate sign on a grid of `steps` intervals;
/// zero rates count as non-negative.
pub fn rate_segments(model: &dyn MasterModel, tf: f64, steps: usize) -> Vec<(f64, f64, Direction)> {
    let steps = steps.max(1);
    let sign = |t: f64| {
        let inst = model.at(t);
        let scale = inst.max_rate().max(1e-300);
        if inst.net_rate() < -1e-12 * scale {
            Direction::Backward
        } else {
            Direction::Forward
        }
    };
    let mut out = Vec::new();
    let mut start = 0.0;
    let mut cur = sign(0.5 * tf / steps as f64);
    for k in 1..steps {
        let t = tf * k as f64 / steps as f64;
        let mid = t + 0.5 * tf / steps as f64;
        let s = sign(mid);
        if s != cur {
            out.push((start, t, cur));
            start = t;
            cur = s;
        }
    }
    out.push((start, tf, cur));
    out
}

fn fock_row(rho: &DensityMatrix, designed: &DensityMatrix, t: f64, omega0: f64, units: UnitSystem) -> Result<TrajectoryRow> {
    let m = moments_from_density(rho, omega0, units)?;
    Ok(TrajectoryRow {
        t,
        fidelity_to_target: fidelity(rho, designed)?,
        entropy: von_neumann_entropy(rho)?,
        var_x: m.cov[0][0],
        var_p: m.cov[1][1],
        cov_xp: m.cov[0][1],
        trace_error: (rho.trace().re - 1.0).abs(),
    })
}

/// Runs the Fock oracle segment by segment and the Gaussian oracle forward
/// over the whole protocol, and checks both against the designed path.
pub fn verify_protocol(model: &dyn MasterModel, path: &dyn DesignedPath, opts: VerifyOptions) -> Result<VerificationReport> {
    let tf = path.tf();
    let (w0, units) = (model.omega0(), model.units());
    let steps = opts.steps.max(1);
    let mut failures = Vec::new();
    let non_lindblad = (0..=steps.min(2000)).any(|k| {
        let t = tf * k as f64 / steps.min(2000) as f64;
        model.at(t).jumps.iter().any(|j| j.rate < 0.0) || model.at(t).renormalized < 0.0
    });

    let target = path.moments(tf)?;
    let target_entropy = gaussian_entropy(&target, w0, units);

    let every = (steps / opts.samples.max(1)).max(1);
    let gaussian = match evolve_covariance(model, &path.moments(0.0)?, 0.0, tf, steps, every) {
        Ok(samples) => Some(samples),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    let gauss_fid = gaussian.as_ref().map(|g| gaussian_fidelity(&g.last().expect("non-empty").1, &target, w0, units));
    if let Some(f) = gauss_fid {
        if f < opts.fidelity_tol {
            failures.push(format!("Gaussian oracle: final fidelity {f:.9} below {}", opts.fidelity_tol));
        }
    }

    let mut segments = Vec::new();
    let mut rows = Vec::new();
    let mut fock_fidelity = None;
    let mut moment_gap: Option<f64> = None;
    let mut max_trace_error: f64 = 0.0;
    let mut fock_final_entropy = None;
    let mut clean = Vec::new();
    if let Some(n) = opts.fock_dim {
        check_resolution(model, 0.0, tf, steps)?;
        for (ta, tb, dir) in rate_segments(model, tf, steps) {
            let seg_steps = (((tb - ta) / tf) * steps as f64).round().max(1.0) as usize;
            let opt = IntegrateOptions::sampled(seg_steps, ((opts.samples as f64 * (tb - ta) / tf).ceil() as usize).max(1));
            let (from, to) = match dir {
                Direction::Forward => (ta, tb),
                Direction::Backward => (tb, ta),
            };
            let traj = integrate_master(model, &path.state(from, n)?, from, to, opt)?;
            max_trace_error = max_trace_error.max(traj.max_trace_drift);
            for (t, rho) in traj.times.iter().zip(&traj.states) {
                let designed = path.state(*t, n)?;
                let row = fock_row(rho, &designed, *t, w0, units)?;
                if rho.tail_mass() <= 1e-8 {
                    clean.push(row);
                }
                rows.push(row);
            }
            let end_fid = rows.last().expect("segment produced rows").fidelity_to_target;
            if dir == Direction::Forward && (tb - tf).abs() < 1e-12 {
                fock_final_entropy = Some(rows.last().expect("rows").entropy);
            }
            segments.push(SegmentCheck { t_start: ta, t_end: tb, direction: dir, fidelity: end_fid });
        }
        rows.sort_by(|a, b| a.t.total_cmp(&b.t));
        rows.dedup_by(|a, b| (a.t - b.t).abs() < 1e-12);
        let worst = segments.iter().map(|s| s.fidelity).fold(1.0, f64::min);
        fock_fidelity = Some(worst);
        if worst < opts.fidelity_tol {
            failures.push(format!("Fock oracle: segment-end fidelity {worst:.9} below {}", opts.fidelity_tol));
        }
        if let Some(g) = gaussian.as_ref() {
            for (t, gm) in g {
                if let Some(row) = clean.iter().find(|r| (r.t - t).abs() < 1e-9) {
                    let gap = (row.var_x - gm.cov[0][0])
                        .abs()
                        .max((row.var_p - gm.cov[1][1]).abs())
                        .max((row.cov_xp - gm.cov[0][1]).abs());
                    moment_gap = Some(moment_gap.map_or(gap, |m: f64| m.max(gap)));
                }
            }
        }
    } else if let Some(g) = gaussian.as_ref() {
        for (t, gm) in g {
            let dm = path.moments(*t)?;
            rows.push(TrajectoryRow {
                t: *t,
                fidelity_to_target: gaussian_fidelity(gm, &dm, w0, units),
                entropy: gaussian_entropy(gm, w0, units),
                var_x: gm.cov[0][0],
                var_p: gm.cov[1][1],
                cov_xp: gm.cov[0][1],
                trace_error: 0.0,
            });
        }
    } else {
        return Err(Error::Unsupported("model has no Gaussian oracle and no Fock dimension was given".into()));
    }

    let final_entropy = match (gaussian.as_ref(), fock_final_entropy) {
        (Some(g), _) => gaussian_entropy(&g.last().expect("non-empty").1, w0, units),
        (None, Some(s)) => s,
        (None, None) => target_entropy,
    };
    if (final_entropy - target_entropy).abs() > opts.entropy_tol {
        failures.push(format!("entropy mismatch: simulated {final_entropy:.9}, target {target_entropy:.9}"));
    }
    Ok(VerificationReport {
        segments,
        fock_fidelity,
        gaussian_fidelity: gauss_fid,
        target_entropy,
        final_entropy,
        oracle_moment_gap: moment_gap,
        max_trace_error,
        non_lindblad,
        rows,
        failures,
    })
}
