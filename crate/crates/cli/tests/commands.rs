use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qrecon(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrecon"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("QRECON_OUT_DIR")
        .output()
        .expect("spawn qrecon")
}

fn records(path: &Path) -> Vec<csv::StringRecord> {
    let mut reader = csv::Reader::from_path(path).expect("csv");
    reader.records().map(|r| r.expect("record")).collect()
}

#[test]
fn zero_wait_sweep_is_linear_in_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let out = qrecon(&["sweep", "fig10a", "--horizon", "2e5", "--reps", "2"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = records(&dir.path().join("sweep_fig10a.csv"));
    assert_eq!(rows.len(), 20);
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r[1].parse().unwrap(), r[6].parse().unwrap())).collect();

    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = sxy * sxy / (sxx * syy);
    assert!((slope - 2.0).abs() < 0.05, "slope {slope}");
    assert!(r2 > 0.999, "r2 {r2}");
}

#[test]
fn rows_carry_seed_and_header_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = qrecon(&["simulate", "--rate", "0.4", "--horizon", "1e3", "--seed", "17", "--reps", "2"], dir.path());
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("simulate.csv")).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "policy,lambda,mu,param,T,seed,theta_hat,abs_theta_hat,mean_delay,mean_aoi,samples,unstable,theta_analytic,theta_lower_bound"
    );
    let rows = records(&dir.path().join("simulate.csv"));
    let seeds: Vec<&str> = rows.iter().map(|r| &r[5]).collect();
    assert_eq!(seeds, ["17", "18"]);
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("simulate.json")).unwrap()).unwrap();
    assert_eq!(summary["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--rate", "0.2,0.5,0.8", "--interp", "off,single", "--horizon", "5e3", "--reps", "3"];
    let mut bodies = Vec::new();
    for workers in ["1", "6"] {
        let out_dir = dir.path().join(workers);
        let mut all = args.to_vec();
        all.extend(["--workers", workers]);
        assert!(qrecon(&all, &out_dir).status.success());
        bodies.push(fs::read(out_dir.join("sweep.csv")).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn analytic_marks_unstable_points_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out = qrecon(&["analytic", "--policy", "uniform,zero-wait", "--rate", "0.5,1.2"], dir.path());
    assert!(out.status.success());
    let rows = records(&dir.path().join("analytic.csv"));
    assert_eq!(rows.len(), 3);
    assert!(!rows[0][12].is_empty() && !rows[0][13].is_empty());
    assert!(rows[1][12].is_empty() && rows[1][13].is_empty());
    assert_eq!(&rows[2][0], "zero_wait");
    assert!((rows[2][12].parse::<f64>().unwrap() - 1.8).abs() < 1e-12);
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small grid\nrate = 0.3\nrate = 0.6\nhorizon = 1e3\nseed = 5\n").unwrap();
    let out = qrecon(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "8"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = records(&dir.path().join("simulate.csv"));
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| &r[5] == "8" && &r[4] == "1000.0"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| qrecon(args, dir.path()).status.code();

    let cfg = dir.path().join("empty.cfg");
    fs::write(&cfg, "rate =\n").unwrap();
    assert_eq!(code(&["sweep", "--config", cfg.to_str().unwrap()]), Some(1), "empty grid");
    assert_eq!(code(&["sweep", "--rate", ""]), Some(1));
    assert_eq!(code(&["frobnicate"]), Some(1));
    assert_eq!(code(&["sweep", "--reps", "0"]), Some(1));
    assert_eq!(code(&["--help"]), Some(0));

    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let status = qrecon(&["analytic"], &blocker.join("sub")).status.code();
    assert_eq!(status, Some(3), "unwritable output directory");
}
