use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_sqz-sta");

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs")
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(BIN).args(args).arg("--out-dir").arg(out).output().expect("binary runs")
}

fn spec_run(spec: &Path, cmd: &[&str], out: &Path) -> Output {
    let mut args = vec!["--spec", spec.to_str().unwrap()];
    args.extend_from_slice(cmd);
    run(&args, out)
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// The single artifact directory under `out`.
fn artifact_dir(out: &Path) -> PathBuf {
    let mut dirs: Vec<PathBuf> = fs::read_dir(out).unwrap().map(|e| e.unwrap().path()).filter(|p| p.is_dir()).collect();
    assert_eq!(dirs.len(), 1, "{dirs:?}");
    dirs.pop().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_spec(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn trap_cooling_designs_and_verifies() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = specs().join("trap_cooling.json");
    let o = spec_run(&spec, &["design"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = spec_run(&spec, &["verify"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let dir = artifact_dir(tmp.path());
    let report = json(&dir.join("report.json"));
    assert_eq!(report["passed"], true);
    assert!(report["fock_fidelity"].as_f64().unwrap() >= 0.999);
    assert!(report["gaussian_fidelity"].as_f64().unwrap() >= 0.999);
    assert_eq!(report["non_lindblad"], true);
    let design = json(&dir.join("design.json"));
    assert_eq!(design["flags"]["non_lindblad"], true);

    let hash = report["spec_hash"].as_str().unwrap().to_string();
    assert!(dir.file_name().unwrap().to_str().unwrap().starts_with(&hash[..16]));
    for entry in fs::read_dir(&dir).unwrap() {
        let p = entry.unwrap().path();
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.contains(&hash), "{} lacks the spec hash", p.display());
        assert!(text.contains(env!("CARGO_PKG_VERSION")), "{} lacks the version", p.display());
        if p.extension().unwrap() == "csv" {
            assert!(text.starts_with("# sqz-sta "));
            assert!(!text.contains('\r'));
        }
    }
    let header = fs::read_to_string(dir.join("controls.csv")).unwrap().lines().nth(1).unwrap().to_string();
    assert_eq!(header, "t,omega_t,omega_c_sq,gamma,Omega0,Omega1");
    let header = fs::read_to_string(dir.join("trajectory.csv")).unwrap().lines().nth(1).unwrap().to_string();
    assert_eq!(header, "t,fidelity_to_target,entropy,var_x,var_p,cov_xp,trace_error");
}

#[test]
fn zero_dephasing_fails_with_entropy_mismatch() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = specs().join("trap_cooling.json");
    assert_eq!(code(&spec_run(&spec, &["design"], tmp.path())), 0);
    let dir = artifact_dir(tmp.path());
    let text = fs::read_to_string(dir.join("controls.csv")).unwrap();
    let mut lines = text.lines();
    let mut edited = format!("{}\n{}\n", lines.next().unwrap(), lines.next().unwrap());
    for l in lines {
        let mut f: Vec<&str> = l.split(',').collect();
        f[3] = "0";
        edited.push_str(&f.join(","));
        edited.push('\n');
    }
    let table = tmp.path().join("no_gamma.csv");
    fs::write(&table, edited).unwrap();
    let o = spec_run(&spec, &["verify", "--controls", table.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("entropy mismatch"), "{}", stderr(&o));
    assert_eq!(json(&dir.join("report.json"))["passed"], false);
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let tmp = tempfile::tempdir().unwrap();
    let spec = write_spec(
        tmp.path(),
        "heating.json",
        r#"{"scheme": "trap-open", "initial": {"r": 0, "phi": 0, "epsilon": 1},
            "target": {"r": 0.05, "phi": 0, "epsilon": 0.95}, "tf": 2,
            "fock_dim": 40, "seed": 11,
            "verify": {"steps": 2000, "stochastic": {"count": 100, "dt": 0.0005, "trace_tol": 0.2}}}"#,
    );
    for out in [a.path(), b.path()] {
        let o = spec_run(&spec, &["design"], out);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let o = spec_run(&spec, &["verify"], out);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let (da, db) = (artifact_dir(a.path()), artifact_dir(b.path()));
    assert_eq!(da.file_name(), db.file_name());
    for name in ["controls.csv", "trajectory.csv", "design.json", "report.json", "spec.json"] {
        assert_eq!(fs::read(da.join(name)).unwrap(), fs::read(db.join(name)).unwrap(), "{name} differs");
    }
    let st = &json(&da.join("report.json"))["stochastic"];
    assert_eq!(st["seed"], 11);
    assert_eq!(st["count"], 100);
    assert!(st["trace_distance"].as_f64().unwrap() < 0.2);

    let o = spec_run(&spec, &["--seed", "12", "verify"], a.path());
    assert_eq!(code(&o), 4, "a new seed is a new spec without controls: {}", stderr(&o));
}

#[test]
fn identity_spec_has_zero_corrections() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = write_spec(
        tmp.path(),
        "identity.json",
        r#"{"scheme": "trap-open", "initial": {"r": 0, "phi": 0, "epsilon": 1.3},
            "target": {"r": 0, "phi": 0, "epsilon": 1.3}, "tf": 1, "grid_points": 11}"#,
    );
    let o = spec_run(&spec, &["design"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(artifact_dir(tmp.path()).join("controls.csv")).unwrap();
    for line in text.lines().skip(2) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!((f[1], f[2]), (1.0, 1.0));
        assert_eq!((f[3].abs(), f[4].abs(), f[5].abs()), (0.0, 0.0, 0.0));
    }
}

#[test]
fn raman_specs_verify() {
    for name in ["raman_cooling.json", "raman_closed.json", "jc_heating.json"] {
        let tmp = tempfile::tempdir().unwrap();
        let spec = specs().join(name);
        let o = spec_run(&spec, &["design"], tmp.path());
        assert_eq!(code(&o), 0, "{name}: {}", stderr(&o));
        let o = spec_run(&spec, &["verify"], tmp.path());
        assert_eq!(code(&o), 0, "{name}: {}", stderr(&o));
        let dir = artifact_dir(tmp.path());
        let header = fs::read_to_string(dir.join("controls.csv")).unwrap().lines().nth(1).unwrap().to_string();
        assert_eq!(header, "t,alpha_R,alpha_I,abs_alpha,phase_diff,kappa");
    }
}

#[test]
fn exit_codes_for_bad_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cooling_jc = write_spec(
        tmp.path(),
        "jc.json",
        r#"{"scheme": "jc-open", "initial": {"r": 0, "phi": 0, "epsilon": 1},
            "target": {"r": 1, "phi": 0.7853981633974483, "epsilon": 2}, "tf": 1}"#,
    );
    let o = spec_run(&cooling_jc, &["design"], tmp.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("κ ≥ 0"), "{}", stderr(&o));

    let phased = write_spec(
        tmp.path(),
        "phased.json",
        r#"{"scheme": "trap-open", "initial": {"r": 0, "phi": 0, "epsilon": 1},
            "target": {"r": 0.5, "phi": 0.4, "epsilon": 2}, "tf": 1}"#,
    );
    assert_eq!(code(&spec_run(&phased, &["design"], tmp.path())), 4);

    let closed = write_spec(
        tmp.path(),
        "closed.json",
        r#"{"scheme": "raman-closed", "initial": {"r": 0, "phi": 0, "epsilon": 1},
            "target": {"r": 0.5, "phi": 0, "epsilon": 1}, "tf": 1}"#,
    );
    let o = spec_run(&closed, &["design"], tmp.path());
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("phase_override"));

    let missing = tmp.path().join("missing.json");
    assert_eq!(code(&spec_run(&missing, &["design"], tmp.path())), 4);
    assert_eq!(code(&run(&["design"], tmp.path())), 4);
    assert_eq!(code(&run(&["--bogus"], tmp.path())), 4);
    let o = spec_run(&specs().join("trap_cooling.json"), &["wigner", "--times", "2.5"], tmp.path());
    assert_eq!(code(&o), 4);
}

#[test]
fn wigner_snapshots_start_round_and_end_squeezed() {
    let tmp = tempfile::tempdir().unwrap();
    let o = spec_run(&specs().join("trap_cooling.json"), &["wigner", "--times", "0,2"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let meta = json(&artifact_dir(tmp.path()).join("wigner.json"));
    let snaps = meta["snapshots"].as_array().unwrap();
    for s in snaps {
        assert!((s["integral_fock"].as_f64().unwrap() - 1.0).abs() < 1e-4);
        assert!((s["integral_gauss"].as_f64().unwrap() - 1.0).abs() < 1e-4);
        assert!(s["max_discrepancy"].as_f64().unwrap() < 1e-4);
    }
    let width = |s: &serde_json::Value, a: &str, b: &str| s["grid"][b].as_f64().unwrap() - s["grid"][a].as_f64().unwrap();
    let (x0, p0) = (width(&snaps[0], "x_min", "x_max"), width(&snaps[0], "p_min", "p_max"));
    assert!((x0 - p0).abs() < 1e-9 * x0, "thermal start is isotropic");
    let (xf, pf) = (width(&snaps[1], "x_min", "x_max"), width(&snaps[1], "p_min", "p_max"));
    assert!(xf < 0.5 * pf, "final state squeezed along x: {xf} vs {pf}");
}

#[test]
fn variance_map_default_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["variance-map"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(artifact_dir(tmp.path()).join("variance_map.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "omega_ratio,beta_ratio,db,isentropic_db,on_isentropic");
    assert_eq!(lines.len(), 2 + 441);
    let grid = write_spec(
        tmp.path(),
        "grid.json",
        r#"{"omega_ratio": [1, 2], "beta_ratio": [-1, 2], "n_omega": 3, "n_beta": 3, "omega0": 1, "beta0": 1}"#,
    );
    assert_eq!(code(&run(&["variance-map", "--grid", grid.to_str().unwrap()], tmp.path())), 4);
}

#[test]
fn full_ion_check_passes_at_large_detuning() {
    let tmp = tempfile::tempdir().unwrap();
    let o = spec_run(&specs().join("trap_cooling.json"), &["full-ion-check"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let meta = json(&artifact_dir(tmp.path()).join("ion.json"));
    assert!(meta["fidelity"].as_f64().unwrap() >= 0.99);
    assert_eq!(meta["elimination_valid"], true);
}
