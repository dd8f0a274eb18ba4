use super::model::{Instant, MasterModel};
use crate::fock_core::{hermitian_eigen, Banded, CMatrix, C64};
use crate::{DensityMatrix, Error, Result};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Trajectories per parallel work unit; fixed so the reduction order is too.
const CHUNK: usize = 16;

/// Stochastic unraveling of a dephasing master equation with a single
/// Hermitian jump operator L and signed rate.
pub struct StochasticRunSpec<'a> {
    pub model: &'a dyn MasterModel,
    pub rho0: DensityMatrix,
    pub tf: f64,
    pub dt: f64,
    pub seed: u64,
    pub count: usize,
    /// Number of output samples after t = 0.
    pub samples: usize,
}

/// One realization: ket Ψ and co-ket Φ with ⟨Φ|Ψ⟩ = 1 at every sample.
/// For non-negative rates Φ = Ψ and this is an ordinary pure-state trajectory.
#[derive(Clone, Debug)]
pub struct PureTrajectory {
    pub times: Vec<f64>,
    pub kets: Vec<Vec<C64>>,
    pub cokets: Vec<Vec<C64>>,
    /// |Σ_k (δ_k − Itô_k)| / T over the run, δ_k restricted to its ΔW-even part.
    pub norm_drift: f64,
    /// ‖Ψ‖‖Φ‖ at tf; 1 for non-negative rates.
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub count: usize,
    pub max_norm_drift: f64,
    pub mean_weight: f64,
    pub max_weight: f64,
}

impl EnsembleResult {
    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("ensemble has samples")
    }
}

struct Plan {
    steps: usize,
    h: f64,
    every: usize,
    cumulative: Vec<f64>,
    vectors: CMatrix,
}

fn noise_jump(inst: &Instant, t: f64) -> Result<(f64, C64)> {
    if inst.renormalized != 0.0 || inst.jumps.len() != 1 || !inst.jumps[0].is_hermitian() {
        return Err(Error::Unsupported(format!(
            "stochastic unraveling needs exactly one Hermitian jump operator (t = {t})"
        )));
    }
    Ok((inst.jumps[0].rate, inst.jumps[0].u))
}

impl StochasticRunSpec<'_> {
    fn plan(&self) -> Result<Plan> {
        if !(self.dt > 0.0) || !(self.tf > 0.0) {
            return Err(Error::InvalidSpec(format!("dt = {}, tf = {} must be positive", self.dt, self.tf)));
        }
        let steps = (self.tf / self.dt).round().max(1.0) as usize;
        let h = self.tf / steps as f64;
        let mut max_rate: f64 = 0.0;
        for k in 0..=steps {
            let (rate, _) = noise_jump(&self.model.at(k as f64 * h), k as f64 * h)?;
            max_rate = max_rate.max(rate.abs());
        }
        if h * max_rate > 0.01 {
            return Err(Error::StepSize {
                reason: format!("dt·max|rate| = {:.3e} exceeds 0.01", h * max_rate),
                suggested_dt: 0.01 / max_rate,
            });
        }
        let (vals, vectors) = hermitian_eigen(&self.rho0.entries);
        let mut acc = 0.0;
        let cumulative = vals
            .iter()
            .map(|v| {
                acc += v.max(0.0);
                acc
            })
            .collect::<Vec<_>>();
        let total = acc;
        let cumulative = cumulative.into_iter().map(|c| c / total).collect();
        let every = (steps / self.samples.max(1)).max(1);
        Ok(Plan { steps, h, every, cumulative, vectors })
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Standard normal deviate for step `step` of trajectory `index`.
fn gaussian(rng: &mut ChaCha8Rng, step: usize) -> f64 {
    rng.set_word_pos(4 * (step as u128 + 1));
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn apply(op: &Banded, v: &[C64], s: C64) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    op.apply_acc(v, s, &mut out);
    out
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Drift generator −iH − ½ rate L² at one instant.
fn drift_operator(inst: &Instant, n: usize) -> Result<(Banded, Banded, f64)> {
    let (rate, _) = noise_jump(inst, f64::NAN)?;
    let q = inst.hamiltonian;
    let l = inst.jumps[0].operator(n);
    let mut d = Banded::quadratic(n, q.number, q.pair, q.pair.conj()).scaled(C64::new(0.0, -1.0));
    d.add_assign(&l.mul(&l), C64::new(-0.5 * rate, 0.0));
    Ok((d, l, rate))
}

fn rk4_drift(d0: &Banded, dm: &Banded, d1: &Banded, v: &[C64], h: f64) -> Vec<C64> {
    let one = C64::new(1.0, 0.0);
    let k1 = apply(d0, v, one);
    let s: Vec<C64> = v.iter().zip(&k1).map(|(a, b)| a + b * (0.5 * h)).collect();
    let k2 = apply(dm, &s, one);
    let s: Vec<C64> = v.iter().zip(&k2).map(|(a, b)| a + b * (0.5 * h)).collect();
    let k3 = apply(dm, &s, one);
    let s: Vec<C64> = v.iter().zip(&k3).map(|(a, b)| a + b * h).collect();
    let k4 = apply(d1, &s, one);
    (0..v.len()).map(|i| v[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0)).collect()
}

fn run_one(spec: &StochasticRunSpec, plan: &Plan, index: usize) -> Result<PureTrajectory> {
    let n = spec.rho0.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    rng.set_word_pos(0);
    let u = uniform(&mut rng);
    let pick = plan.cumulative.partition_point(|&c| c < u).min(n - 1);
    let start: Vec<C64> = plan.vectors.column(pick).iter().copied().collect();
    let (mut psi, mut phi) = (start.clone(), start);
    let mut out = PureTrajectory {
        times: vec![0.0],
        kets: vec![psi.clone()],
        cokets: vec![phi.clone()],
        norm_drift: 0.0,
        weight: 1.0,
    };
    let h = plan.h;
    let mut systematic = C64::new(0.0, 0.0);
    for k in 0..plan.steps {
        let t = k as f64 * h;
        let (d0, l, rate) = drift_operator(&spec.model.at(t), n)?;
        let (dm, _, _) = drift_operator(&spec.model.at(t + 0.5 * h), n)?;
        let (d1, _, _) = drift_operator(&spec.model.at(t + h), n)?;
        let dw = gaussian(&mut rng, k) * h.sqrt();
        let c = C64::new(rate, 0.0).sqrt();
        let lpsi = apply(&l, &psi, C64::new(1.0, 0.0));
        let lphi = apply(&l, &phi, C64::new(1.0, 0.0));
        let l2 = dot(&lphi, &lpsi);
        let mut npsi = rk4_drift(&d0, &dm, &d1, &psi, h);
        let mut nphi = rk4_drift(&d0, &dm, &d1, &phi, h);
        // The part of the overlap change that is even in ΔW, less its Itô
        // expectation; the odd part is a martingale and carries no bias.
        systematic += dot(&nphi, &npsi) - 1.0 + l2 * (rate * h);
        let kick_psi = C64::new(0.0, -1.0) * c * dw;
        let kick_phi = C64::new(0.0, -1.0) * c.conj() * dw;
        for i in 0..n {
            npsi[i] += kick_psi * lpsi[i];
            nphi[i] += kick_phi * lphi[i];
        }
        let overlap = dot(&nphi, &npsi);
        if !overlap.is_finite() || overlap.norm() < 1e-300 {
            return Err(Error::StepSize { reason: format!("trajectory {index} degenerated at t = {t}"), suggested_dt: 0.5 * h });
        }
        let s = overlap.sqrt();
        for i in 0..n {
            npsi[i] /= s;
            nphi[i] /= s.conj();
        }
        psi = npsi;
        phi = nphi;
        if (k + 1) % plan.every == 0 || k + 1 == plan.steps {
            out.times.push((k + 1) as f64 * h);
            out.kets.push(psi.clone());
            out.cokets.push(phi.clone());
        }
    }
    out.norm_drift = systematic.norm() / spec.tf;
    out.weight = norm(&psi) * norm(&phi);
    if out.norm_drift > 1e-3 {
        return Err(Error::StepSize {
            reason: format!("trajectory {index}: norm drift {:.3e} per unit time exceeds 1e-3", out.norm_drift),
            suggested_dt: 0.5 * h,
        });
    }
    Ok(out)
}

/// Single seeded realization; bit-identical for equal (seed, index).
pub fn stochastic_trajectory(spec: &StochasticRunSpec, index: usize) -> Result<PureTrajectory> {
    let plan = spec.plan()?;
    run_one(spec, &plan, index)
}

struct Partial {
    sums: Vec<CMatrix>,
    max_drift: f64,
    weight_sum: f64,
    max_weight: f64,
}

/// Mean of |Ψ⟩⟨Φ| over `count` trajectories, reduced in index order.
pub fn ensemble_average(spec: &StochasticRunSpec) -> Result<EnsembleResult> {
    if spec.count < 100 {
        return Err(Error::InvalidSpec(format!("ensemble needs at least 100 trajectories, got {}", spec.count)));
    }
    let plan = spec.plan()?;
    let n = spec.rho0.dim();
    let chunks = spec.count.div_ceil(CHUNK);
    let partials: Vec<Result<(Vec<f64>, Partial)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut part: Option<Partial> = None;
            let mut times = Vec::new();
            for index in c * CHUNK..((c + 1) * CHUNK).min(spec.count) {
                let tr = run_one(spec, &plan, index)?;
                let p = part.get_or_insert_with(|| Partial {
                    sums: vec![CMatrix::zeros(n, n); tr.times.len()],
                    max_drift: 0.0,
                    weight_sum: 0.0,
                    max_weight: 0.0,
                });
                for (s, (k, f)) in p.sums.iter_mut().zip(tr.kets.iter().zip(&tr.cokets)) {
                    for j in 0..n {
                        let fj = f[j].conj();
                        for i in 0..n {
                            s[(i, j)] += k[i] * fj;
                        }
                    }
                }
                p.max_drift = p.max_drift.max(tr.norm_drift);
                p.weight_sum += tr.weight;
                p.max_weight = p.max_weight.max(tr.weight);
                times = tr.times;
            }
            Ok((times, part.expect("chunk is non-empty")))
        })
        .collect();
    let mut times = Vec::new();
    let mut total: Option<Partial> = None;
    for r in partials {
        let (t, p) = r?;
        times = t;
        match total.as_mut() {
            None => total = Some(p),
            Some(acc) => {
                for (a, b) in acc.sums.iter_mut().zip(&p.sums) {
                    *a += b;
                }
                acc.max_drift = acc.max_drift.max(p.max_drift);
                acc.weight_sum += p.weight_sum;
                acc.max_weight = acc.max_weight.max(p.max_weight);
            }
        }
    }
    let total = total.expect("count ≥ 100");
    let m = C64::new(1.0 / spec.count as f64, 0.0);
    let states = total
        .sums
        .into_iter()
        .map(|s| DensityMatrix::new(DensityMatrix::new(s * m).hermitian_part()))
        .collect();
    Ok(EnsembleResult {
        times,
        states,
        count: spec.count,
        max_norm_drift: total.max_drift,
        mean_weight: total.weight_sum / spec.count as f64,
        max_weight: total.max_weight,
    })
}
