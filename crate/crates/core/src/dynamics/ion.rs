use super::lindblad::{integrate_master, IntegrateOptions};
use super::model::{FnModel, Instant, Quadratic};
use crate::fock_core::{build_ladder, check_dim, fidelity, hermitian_eigen, CMatrix, C64};
use crate::raman_protocol::{alpha_from_lasers, HierarchyTier, RamanLaserConfig};
use crate::{DensityMatrix, Error, Result, UnitSystem};

/// Full two-level ⊗ Fock model of the two-beam Raman scheme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IonModelSpec {
    pub lasers: RamanLaserConfig,
    /// Optical transition frequency; must exceed |Δ|.
    pub atomic_gap: f64,
    pub fock_dim: usize,
    pub tf: f64,
    /// Upper bound on the step; the actual step divides tf evenly.
    pub dt: f64,
    /// Number of reduced states to keep after t = 0.
    pub samples: usize,
}

impl IonModelSpec {
    /// Step small enough to resolve Δ: min(0.05/|Δ|, 0.002).
    pub fn default_dt(detuning: f64) -> f64 {
        (0.05 / detuning.abs()).min(0.002)
    }
}

#[derive(Clone, Debug)]
pub struct IonRun {
    pub times: Vec<f64>,
    /// Reduced motional states in the frame rotating at ω₀.
    pub states: Vec<DensityMatrix>,
    pub excited_population: Vec<f64>,
    pub max_excited: f64,
    /// 10 (Ω/Δ)² with Ω = max(Ω₁, Ω₂).
    pub excited_bound: f64,
    pub elimination_valid: bool,
    pub tier: HierarchyTier,
    pub alpha: C64,
    /// State produced by H_eff = ħ(α a² + α* a†²) from the same initial state.
    pub effective: DensityMatrix,
    pub fidelity: f64,
}

/// exp(−iηX) for X = a + a†, through the eigenbasis of X.
fn displacement_like(x: &CMatrix, eta: f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(x);
    let n = x.nrows();
    let mut scaled = vecs.clone();
    for (j, v) in vals.iter().enumerate() {
        let ph = C64::from_polar(1.0, -eta * v);
        for i in 0..n {
            scaled[(i, j)] *= ph;
        }
    }
    scaled * vecs.adjoint()
}

struct Couplings {
    d1: CMatrix,
    d2: CMatrix,
    d1h: CMatrix,
    d2h: CMatrix,
}

/// Integrates i d/dt (g, e) = H (g, e) in the lab frame of the motion,
/// H = ħω₀ a†a + ħΔ/2 (|g⟩⟨g| − |e⟩⟨e|) + ħ(V |g⟩⟨e| + h.c.),
/// V = ½(Ω₁ e^{i(ω₀t+Φ₁)} D₁ + Ω₂ e^{i(−ω₀t+Φ₂)} D₂), D_l = e^{−iη_l X},
/// for every eigenvector of ρ0 and returns the reduced motional state.
pub fn full_ion_model(spec: &IonModelSpec, rho0: &DensityMatrix, units: UnitSystem) -> Result<IonRun> {
    let n = spec.fock_dim;
    check_dim(n)?;
    if rho0.dim() != n {
        return Err(Error::DimensionMismatch(rho0.dim(), n));
    }
    if !(spec.tf > 0.0) || !(spec.dt > 0.0) {
        return Err(Error::InvalidSpec(format!("tf = {}, dt = {} must be positive", spec.tf, spec.dt)));
    }
    let l = spec.lasers;
    if !(spec.atomic_gap > l.detuning.abs()) {
        return Err(Error::InvalidLasers(format!(
            "atomic gap {} must exceed |Δ| = {}",
            spec.atomic_gap,
            l.detuning.abs()
        )));
    }
    let tier = l.hierarchy()?;
    let alpha = alpha_from_lasers(&l)?;
    let w0 = l.omega0;

    let (a, ad) = build_ladder(n)?;
    let x = &a.entries + &ad.entries;
    let d1 = displacement_like(&x, l.lamb_dicke.0);
    let d2 = displacement_like(&x, l.lamb_dicke.1);
    let cp = Couplings { d1h: d1.adjoint(), d2h: d2.adjoint(), d1, d2 };

    let steps = (spec.tf / spec.dt).ceil().max(1.0) as usize;
    let h = spec.tf / steps as f64;
    let every = (steps / spec.samples.max(1)).max(1);

    let (weights, vecs) = hermitian_eigen(&rho0.hermitian_part());
    let kept: Vec<usize> = (0..n).filter(|&k| weights[k] > 1e-14).collect();
    let m = kept.len();
    // Columns are the kept eigenvectors embedded in the ground manifold.
    let mut psi = CMatrix::zeros(2 * n, m);
    for (c, &k) in kept.iter().enumerate() {
        psi.view_mut((0, c), (n, 1)).copy_from(&vecs.column(k));
    }
    let w: Vec<f64> = kept.iter().map(|&k| weights[k]).collect();

    let energy: Vec<f64> = (0..n).map(|k| w0 * k as f64).collect();
    let half = 0.5 * l.detuning;
    let rhs = |p: &CMatrix, t: f64| -> CMatrix {
        let c1 = C64::from_polar(0.5 * l.rabi.0, w0 * t + l.phases.0);
        let c2 = C64::from_polar(0.5 * l.rabi.1, -w0 * t + l.phases.1);
        let g = p.view((0, 0), (n, m));
        let e = p.view((n, 0), (n, m));
        let ve = (&cp.d1 * &e) * c1 + (&cp.d2 * &e) * c2;
        let vg = (&cp.d1h * &g) * c1.conj() + (&cp.d2h * &g) * c2.conj();
        let mut out = CMatrix::zeros(2 * n, m);
        let mi = C64::new(0.0, -1.0);
        for j in 0..m {
            for i in 0..n {
                out[(i, j)] = mi * ((energy[i] + half) * g[(i, j)] + ve[(i, j)]);
                out[(n + i, j)] = mi * ((energy[i] - half) * e[(i, j)] + vg[(i, j)]);
            }
        }
        out
    };

    let reduce = |p: &CMatrix, t: f64| -> (DensityMatrix, f64) {
        let mut rho = CMatrix::zeros(n, n);
        let mut pe = 0.0;
        for (j, wj) in w.iter().enumerate() {
            let mut g: Vec<C64> = (0..n).map(|i| p[(i, j)]).collect();
            let mut e: Vec<C64> = (0..n).map(|i| p[(n + i, j)]).collect();
            for i in 0..n {
                let u = C64::from_polar(1.0, energy[i] * t);
                g[i] *= u;
                e[i] *= u;
            }
            pe += wj * e.iter().map(|z| z.norm_sqr()).sum::<f64>();
            for c in 0..n {
                let (gc, ec) = (g[c].conj(), e[c].conj());
                for r in 0..n {
                    rho[(r, c)] += (g[r] * gc + e[r] * ec) * *wj;
                }
            }
        }
        (DensityMatrix::new(rho), pe)
    };

    let (s0, p0) = reduce(&psi, 0.0);
    let mut run_times = vec![0.0];
    let mut states = vec![s0];
    let mut excited = vec![p0];
    let mut max_excited = p0;
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = rhs(&psi, t);
        let k2 = rhs(&(&psi + &k1 * C64::new(0.5 * h, 0.0)), t + 0.5 * h);
        let k3 = rhs(&(&psi + &k2 * C64::new(0.5 * h, 0.0)), t + 0.5 * h);
        let k4 = rhs(&(&psi + &k3 * C64::new(h, 0.0)), t + h);
        psi += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0);
        let tn = (k + 1) as f64 * h;
        let last = k + 1 == steps;
        let pe: f64 = w
            .iter()
            .enumerate()
            .map(|(j, wj)| wj * (0..n).map(|i| psi[(n + i, j)].norm_sqr()).sum::<f64>())
            .sum();
        max_excited = max_excited.max(pe);
        if (k + 1) % every == 0 || last {
            let (s, _) = reduce(&psi, tn);
            run_times.push(tn);
            states.push(s);
            excited.push(pe);
        }
    }

    let model = FnModel {
        f: move |_t: f64| Instant {
            hamiltonian: Quadratic { number: 0.0, pair: alpha },
            jumps: Vec::new(),
            renormalized: 0.0,
        },
        omega0: w0,
        units,
    };
    let eff_steps = ((spec.tf * alpha.norm() * 400.0).ceil() as usize).max(400);
    let effective = integrate_master(&model, rho0, 0.0, spec.tf, IntegrateOptions::new(eff_steps))?
        .last()
        .clone();
    let final_state = states.last().expect("at least one sample");
    let fid = fidelity(final_state, &effective)?;
    let omega = l.rabi.0.abs().max(l.rabi.1.abs());
    let excited_bound = 10.0 * (omega / l.detuning).powi(2);
    Ok(IonRun {
        times: run_times,
        states,
        excited_population: excited,
        max_excited,
        excited_bound,
        elimination_valid: max_excited <= excited_bound,
        tier,
        alpha,
        effective,
        fidelity: fid,
    })
}
