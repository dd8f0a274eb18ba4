//! Subcommand implementations. Each returns a one-line summary on success.

use crate::artifacts::{read_csv, Artifacts};
use crate::error::CliError;
use crate::spec::{Design, ProtocolSpec, Scheme};
use serde::Serialize;
use sha2::{Digest, Sha256};
use sqzsta::dynamics::{
    check_resolution, ensemble_average, full_ion_model, integrate_master, rate_segments, verify_protocol, DesignedPath,
    Direction, IntegrateOptions, IonModelSpec, MasterModel, RamanModel, SegmentCheck, StochasticRunSpec,
    TrapModel, TrapTableModel, VerifyOptions,
};
use sqzsta::fock_core::trace_distance;
use sqzsta::raman_protocol::{decompose_alpha, HierarchyTier, LaserDecomposition, RamanPoint, Variant};
use sqzsta::squeezed_state::{
    gaussian_wigner, squeezed_thermal, variance_map as compute_variance_map, wigner_from_density, VarianceMapGrid,
    WignerGrid,
};
use sqzsta::trap_protocol::{TrapFlags, TrapPoint};
use sqzsta::{DensityMatrix, RamanControls, SqueezeParams};
use std::f64::consts::PI;
use std::path::Path;

#[derive(Serialize)]
struct TrapDesignMeta<'a> {
    scheme: Scheme,
    grid_points: usize,
    omega_final: f64,
    target: SqueezeParams,
    non_lindblad: bool,
    flags: TrapFlags,
    spec: &'a ProtocolSpec,
}

#[derive(Serialize)]
struct RamanDesignMeta<'a> {
    scheme: Scheme,
    variant: Variant,
    grid_points: usize,
    max_condition: f64,
    non_lindblad: bool,
    kappa_max: f64,
    alpha_max: f64,
    /// Laser settings realizing the peak |α| with the configured Lamb–Dicke factors and detuning.
    peak_lasers: LaserDecomposition,
    final_lab_phase: Option<f64>,
    spec: &'a ProtocolSpec,
}

pub fn design(spec: &ProtocolSpec, art: &Artifacts) -> Result<String, CliError> {
    let design = spec.design()?;
    art.write_json("spec.json", spec)?;
    match design {
        Design::Trap(c) => {
            let rows = c.sample(spec.grid_points);
            art.write_csv("controls.csv", &rows)?;
            let flags = c.flags(spec.grid_points);
            let meta = TrapDesignMeta {
                scheme: spec.scheme,
                grid_points: spec.grid_points,
                omega_final: c.omega.sf,
                target: c.target_params()?,
                non_lindblad: flags.non_lindblad,
                flags,
                spec,
            };
            art.write_json("design.json", &meta)?;
            Ok(format!(
                "designed {:?}: omega_c^2 in [{:.4}, {:.4}], gamma in [{:.4}, {:.4}]{} -> {}",
                spec.scheme,
                flags.min_omega_c_sq,
                flags.max_omega_c_sq,
                flags.min_gamma,
                flags.max_gamma,
                if flags.non_lindblad { " (non-Lindblad)" } else { "" },
                art.dir.display()
            ))
        }
        Design::Raman { controls, closed, .. } => {
            art.write_csv("controls.csv", &controls.points)?;
            let peak = controls.points.iter().max_by(|a, b| a.abs_alpha.total_cmp(&b.abs_alpha)).expect("non-empty");
            let meta = RamanDesignMeta {
                scheme: spec.scheme,
                variant: controls.variant,
                grid_points: spec.grid_points,
                max_condition: controls.max_condition,
                non_lindblad: controls.non_lindblad(),
                kappa_max: controls.kappa_max(),
                alpha_max: controls.alpha_max(),
                peak_lasers: decompose_alpha(peak.alpha(), spec.lasers.lamb_dicke, spec.lasers.detuning),
                final_lab_phase: closed.map(|d| d.final_phase()),
                spec,
            };
            art.write_json("design.json", &meta)?;
            Ok(format!(
                "designed {:?}: max |alpha| {:.4}, max |kappa| {:.4}{} -> {}",
                spec.scheme,
                meta.alpha_max,
                meta.kappa_max,
                if meta.non_lindblad { " (non-Lindblad)" } else { "" },
                art.dir.display()
            ))
        }
    }
}

#[derive(Serialize)]
struct EnsembleSummary {
    seed: u64,
    count: usize,
    dt: f64,
    trace_distance: Option<f64>,
    trace_tol: f64,
    max_norm_drift: Option<f64>,
    mean_weight: Option<f64>,
    max_weight: Option<f64>,
    error: Option<String>,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    passed: bool,
    scheme: Scheme,
    controls: String,
    fock_dim: usize,
    steps: usize,
    fidelity_tol: f64,
    entropy_tol: f64,
    fock_fidelity: Option<f64>,
    gaussian_fidelity: Option<f64>,
    target_entropy: f64,
    final_entropy: f64,
    oracle_moment_gap: Option<f64>,
    max_trace_error: f64,
    non_lindblad: bool,
    segments: &'a [SegmentCheck],
    failures: &'a [String],
    stochastic: Option<EnsembleSummary>,
}

fn stochastic_check(
    spec: &ProtocolSpec,
    model: &dyn MasterModel,
    path: &dyn DesignedPath,
    failures: &mut Vec<String>,
) -> Result<Option<EnsembleSummary>, CliError> {
    let Some(s) = &spec.verify.stochastic else { return Ok(None) };
    let n = spec.fock_dim;
    let run = StochasticRunSpec {
        model,
        rho0: path.state(0.0, n)?,
        tf: path.tf(),
        dt: s.dt,
        seed: spec.seed,
        count: s.count,
        samples: 1,
    };
    let mut out = EnsembleSummary {
        seed: spec.seed,
        count: s.count,
        dt: s.dt,
        trace_distance: None,
        trace_tol: s.trace_tol,
        max_norm_drift: None,
        mean_weight: None,
        max_weight: None,
        error: None,
    };
    match ensemble_average(&run) {
        Ok(res) => {
            let d = trace_distance(res.last(), &path.state(path.tf(), n)?)?;
            if d > s.trace_tol {
                failures.push(format!("stochastic ensemble: trace distance {d:.4} to target exceeds {}", s.trace_tol));
            }
            out.trace_distance = Some(d);
            out.max_norm_drift = Some(res.max_norm_drift);
            out.mean_weight = Some(res.mean_weight);
            out.max_weight = Some(res.max_weight);
        }
        Err(e) => {
            failures.push(format!("stochastic ensemble: {e}"));
            out.error = Some(e.to_string());
        }
    }
    Ok(Some(out))
}

pub fn verify(spec: &ProtocolSpec, art: &Artifacts, controls: Option<&Path>) -> Result<String, CliError> {
    let table = controls.map(Path::to_path_buf).unwrap_or_else(|| art.path("controls.csv"));
    if !table.exists() {
        return Err(CliError::Input(format!(
            "no controls at {}; run `design` first or pass --controls",
            table.display()
        )));
    }
    let opts = VerifyOptions {
        fock_dim: Some(spec.fock_dim),
        steps: spec.verify.steps,
        samples: spec.verify.samples,
        fidelity_tol: spec.verify.fidelity_tol,
        entropy_tol: spec.verify.entropy_tol,
    };
    let check_tf = |tf: f64| {
        if (tf - spec.tf).abs() > 1e-9 * spec.tf {
            Err(CliError::Input(format!("control table ends at t = {tf}, spec has tf = {}", spec.tf)))
        } else {
            Ok(())
        }
    };
    let (rep, mut failures, stochastic) = match spec.design()? {
        Design::Trap(c) => {
            let model = TrapTableModel::new(read_csv::<TrapPoint>(&table)?, spec.units)?;
            check_tf(model.tf())?;
            let rep = verify_protocol(&model, &c, opts)?;
            let mut failures = rep.failures.clone();
            let st = stochastic_check(spec, &model, &c, &mut failures)?;
            (rep, failures, st)
        }
        Design::Raman { controls, path, .. } => {
            if spec.verify.stochastic.is_some() {
                return Err(CliError::Input("the stochastic ensemble supports trap schemes only".into()));
            }
            let points = read_csv::<RamanPoint>(&table)?;
            let model = RamanModel::new(RamanControls::from_points(controls.variant, points)?, spec.omega0, spec.units);
            check_tf(model.controls.tf())?;
            let rep = verify_protocol(&model, &path, opts)?;
            let failures = rep.failures.clone();
            (rep, failures, None)
        }
    };
    failures.dedup();
    art.write_csv("trajectory.csv", &rep.rows)?;
    let report = VerifyReport {
        passed: failures.is_empty(),
        scheme: spec.scheme,
        controls: table.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
        fock_dim: spec.fock_dim,
        steps: spec.verify.steps,
        fidelity_tol: spec.verify.fidelity_tol,
        entropy_tol: spec.verify.entropy_tol,
        fock_fidelity: rep.fock_fidelity,
        gaussian_fidelity: rep.gaussian_fidelity,
        target_entropy: rep.target_entropy,
        final_entropy: rep.final_entropy,
        oracle_moment_gap: rep.oracle_moment_gap,
        max_trace_error: rep.max_trace_error,
        non_lindblad: rep.non_lindblad,
        segments: &rep.segments,
        failures: &failures,
        stochastic,
    };
    art.write_json("report.json", &report)?;
    let fid = |f: Option<f64>| f.map_or("n/a".to_string(), |v| format!("{v:.6}"));
    let line = format!(
        "fidelity Fock {} Gaussian {}, entropy {:.6} (target {:.6})",
        fid(rep.fock_fidelity),
        fid(rep.gaussian_fidelity),
        rep.final_entropy,
        rep.target_entropy
    );
    if failures.is_empty() {
        Ok(format!("PASS: {line} -> {}", art.dir.display()))
    } else {
        Err(CliError::VerifyFailed(format!("{}; {line}", failures.join("; "))))
    }
}

#[derive(Serialize)]
struct VarianceMapMeta {
    grid: VarianceMapGrid,
    points: usize,
    min_db: f64,
    max_db: f64,
}

pub fn variance_map(grid_file: Option<&Path>, out_dir: &Path) -> Result<String, CliError> {
    let grid: VarianceMapGrid = match grid_file {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Input(format!("cannot read grid {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("grid {}: {e}", p.display())))?
        }
        None => VarianceMapGrid::default(),
    };
    let body = serde_json::to_vec(&grid).expect("grid serializes");
    let art = Artifacts::create(out_dir, format!("{:x}", Sha256::digest(body)))?;
    let map = compute_variance_map(&grid, sqzsta::UnitSystem::default())?;
    art.write_csv("variance_map.csv", &map)?;
    let (lo, hi) = map.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p.db), h.max(p.db)));
    art.write_json("variance_map.json", &VarianceMapMeta { grid, points: map.len(), min_db: lo, max_db: hi })?;
    Ok(format!("variance map: {} points, dB in [{lo:.3}, {hi:.3}] -> {}", map.len(), art.dir.display()))
}

/// Simulated state at `t`: integrated in the well-posed direction of the
/// rate segment containing `t`, starting from the designed state at that
/// segment's anchor.
fn simulate_at(
    model: &dyn MasterModel,
    path: &dyn DesignedPath,
    t: f64,
    n: usize,
    steps: usize,
) -> Result<DensityMatrix, CliError> {
    let tf = path.tf();
    let segments = rate_segments(model, tf, steps);
    let (ta, tb, dir) = *segments
        .iter()
        .find(|(a, b, _)| *a <= t && t <= *b)
        .unwrap_or_else(|| segments.last().expect("at least one segment"));
    let anchor = match dir {
        Direction::Forward => ta,
        Direction::Backward => tb,
    };
    if (t - anchor).abs() < 1e-12 {
        return Ok(path.state(anchor, n)?);
    }
    let k = (((t - anchor).abs() / tf) * steps as f64).round().max(1.0) as usize;
    let traj = integrate_master(model, &path.state(anchor, n)?, anchor, t, IntegrateOptions::new(k))?;
    Ok(traj.last().clone())
}

#[derive(Serialize)]
struct WignerRow {
    x: f64,
    p: f64,
    w_fock: f64,
    w_gauss: f64,
}

#[derive(Serialize)]
struct WignerSnapshot {
    t: f64,
    file: String,
    grid: WignerGrid,
    integral_fock: f64,
    integral_gauss: f64,
    max_discrepancy: f64,
    var_x_fock: f64,
    var_x_gauss: f64,
}

#[derive(Serialize)]
struct WignerMeta {
    fock_dim: usize,
    steps: usize,
    snapshots: Vec<WignerSnapshot>,
    max_discrepancy: f64,
}

pub fn wigner(spec: &ProtocolSpec, art: &Artifacts, times: &[f64]) -> Result<String, CliError> {
    if times.is_empty() {
        return Err(CliError::Input("no times requested".into()));
    }
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && **t <= spec.tf)) {
        return Err(CliError::Input(format!("time {t} outside [0, {}]", spec.tf)));
    }
    let (n, steps) = (spec.fock_dim, spec.verify.steps);
    let (model, path): (Box<dyn MasterModel>, Box<dyn DesignedPath>) = match spec.design()? {
        Design::Trap(c) => (Box::new(TrapModel::new(c)), Box::new(c)),
        Design::Raman { controls, path, .. } => (Box::new(RamanModel::new(controls, spec.omega0, spec.units)), Box::new(path)),
    };
    check_resolution(model.as_ref(), 0.0, spec.tf, steps)?;
    let mut snapshots = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        let rho = simulate_at(model.as_ref(), path.as_ref(), t, n, steps)?;
        let m = path.moments(t)?;
        let pts = spec.wigner.points;
        let grid = WignerGrid::covering(&m, spec.wigner.span, pts, pts);
        let wf = wigner_from_density(&rho, grid, spec.omega0, spec.units)?;
        let wg = gaussian_wigner(&m, grid, spec.units)?;
        let (xs, ps) = (grid.xs(), grid.ps());
        let rows: Vec<WignerRow> = xs
            .iter()
            .enumerate()
            .flat_map(|(i, &x)| {
                let (wf, wg) = (&wf, &wg);
                ps.iter().enumerate().map(move |(j, &p)| WignerRow { x, p, w_fock: wf.values[i][j], w_gauss: wg.values[i][j] })
            })
            .collect();
        let file = format!("wigner_{k:02}.csv");
        art.write_csv(&file, &rows)?;
        snapshots.push(WignerSnapshot {
            t,
            file,
            grid,
            integral_fock: wf.integral(),
            integral_gauss: wg.integral(),
            max_discrepancy: wf.max_abs_difference(&wg),
            var_x_fock: wf.marginal_variance_x(),
            var_x_gauss: wg.marginal_variance_x(),
        });
    }
    let worst = snapshots.iter().map(|s| s.max_discrepancy).fold(0.0, f64::max);
    let bad: Vec<String> = snapshots
        .iter()
        .filter(|s| (s.integral_fock - 1.0).abs() > 1e-4 || (s.integral_gauss - 1.0).abs() > 1e-4)
        .map(|s| format!("t = {}: normalization {:.6} / {:.6}", s.t, s.integral_fock, s.integral_gauss))
        .collect();
    let count = snapshots.len();
    art.write_json("wigner.json", &WignerMeta { fock_dim: n, steps, snapshots, max_discrepancy: worst })?;
    if !bad.is_empty() {
        return Err(CliError::VerifyFailed(bad.join("; ")));
    }
    Ok(format!("{count} Wigner snapshots, max |W_fock - W_gauss| {worst:.2e} -> {}", art.dir.display()))
}

#[derive(Serialize)]
struct IonRow {
    t: f64,
    excited_population: f64,
}

#[derive(Serialize)]
struct IonMeta {
    detuning: f64,
    rabi: (f64, f64),
    lamb_dicke: (f64, f64),
    duration: f64,
    fock_dim: usize,
    alpha_re: f64,
    alpha_im: f64,
    tier: HierarchyTier,
    fidelity: f64,
    min_fidelity: f64,
    max_excited: f64,
    excited_bound: f64,
    elimination_valid: bool,
}

pub fn full_ion_check(spec: &ProtocolSpec, art: &Artifacts) -> Result<String, CliError> {
    let l = &spec.lasers;
    let rabi = l.rabi.unwrap_or_else(|| {
        let r = (0.5 * l.detuning.abs()).sqrt();
        (r, r)
    });
    let tf = l.duration.unwrap_or(2.0 * PI / spec.omega0);
    let ion = IonModelSpec {
        lasers: sqzsta::RamanLaserConfig {
            rabi,
            lamb_dicke: l.lamb_dicke,
            detuning: l.detuning,
            phases: l.phases,
            omega0: spec.omega0,
        },
        atomic_gap: l.atomic_gap,
        fock_dim: l.fock_dim,
        tf,
        dt: IonModelSpec::default_dt(l.detuning),
        samples: spec.verify.samples,
    };
    let rho0 = squeezed_thermal(&spec.initial, l.fock_dim)?;
    let run = full_ion_model(&ion, &rho0, spec.units)?;
    let rows: Vec<IonRow> =
        run.times.iter().zip(&run.excited_population).map(|(&t, &p)| IonRow { t, excited_population: p }).collect();
    art.write_csv("ion.csv", &rows)?;
    let meta = IonMeta {
        detuning: l.detuning,
        rabi,
        lamb_dicke: l.lamb_dicke,
        duration: tf,
        fock_dim: l.fock_dim,
        alpha_re: run.alpha.re,
        alpha_im: run.alpha.im,
        tier: run.tier,
        fidelity: run.fidelity,
        min_fidelity: l.min_fidelity,
        max_excited: run.max_excited,
        excited_bound: run.excited_bound,
        elimination_valid: run.elimination_valid,
    };
    art.write_json("ion.json", &meta)?;
    let line = format!(
        "fidelity with effective model {:.6}, max excited population {:.2e} (bound {:.2e}), tier {:?}",
        run.fidelity, run.max_excited, run.excited_bound, run.tier
    );
    if run.elimination_valid && run.fidelity >= l.min_fidelity {
        Ok(format!("PASS: {line} -> {}", art.dir.display()))
    } else {
        Err(CliError::VerifyFailed(line))
    }
}
