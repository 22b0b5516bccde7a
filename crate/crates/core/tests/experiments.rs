use std::fs;
use std::path::Path;
use std::process::Command;

use htq::experiments::{
    cmd_geometry, cmd_jsq_sweep, cmd_sweep, cmd_verify, run_sweep, ExperimentConfig, Suite,
};
use htq::Error;

const ON_OFF: &str = r#"
eps_grid = [0.2, 0.1, 0.05]
seed_base = 11
workers = 1
[model]
kind = "switch"
nu = [0.8]
[[model.states]]
psi = 0.8
services = [[1]]
[[model.states]]
psi = 0.2
services = [[0]]
[run]
burn_in = 2000
horizon = 200000
"#;

fn cfg(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml(text).unwrap()
}

fn read_without_header(dir: &Path) -> (String, String, serde_json::Value) {
    let sweep = fs::read_to_string(dir.join("sweep.csv")).unwrap();
    let records = fs::read_to_string(dir.join("records.csv")).unwrap();
    let mut summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    summary.as_object_mut().unwrap().remove("header");
    (sweep, records, summary)
}

#[test]
fn sweep_structure() {
    let r = run_sweep(&cfg(ON_OFF)).unwrap();
    assert_eq!(r.points.len(), 3);
    assert!(r.points.iter().all(|p| p.residual >= 0.0));
    assert!(r.fit.is_some());
    assert_eq!(r.points.iter().map(|p| p.seed).collect::<Vec<_>>(), vec![11, 12, 13]);
    let dir = tempfile::tempdir().unwrap();
    cmd_sweep(&cfg(ON_OFF), Some(dir.path())).unwrap();
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "eps,mean_qw,ci,ht_limit,residual,T1,T2,T3,T4,pi_min,perp_m1,perp_m2,perp_m3,perp_m4,flags"
    );
    assert_eq!(lines.count(), 3);
}

#[test]
fn identical_runs_give_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    cmd_sweep(&cfg(ON_OFF), Some(a.path())).unwrap();
    cmd_sweep(&cfg(ON_OFF), Some(b.path())).unwrap();
    assert_eq!(read_without_header(a.path()), read_without_header(b.path()));
}

#[test]
fn concurrent_equals_sequential() {
    let seq = run_sweep(&cfg(ON_OFF)).unwrap();
    let par = run_sweep(&cfg(&ON_OFF.replace("workers = 1", "workers = 3"))).unwrap();
    assert_eq!(seq, par);
}

// Batch-means half-widths scale like 1/sqrt(horizon); averaged over seeds to
// tame the sampling noise of a 20-batch interval.
#[test]
fn doubling_horizon_shrinks_intervals() {
    let mean_hw = |horizon: u64| -> f64 {
        let text = ON_OFF
            .replace("eps_grid = [0.2, 0.1, 0.05]", "eps_grid = [0.2]")
            .replace("horizon = 200000", &format!("horizon = {horizon}"));
        (0..12)
            .map(|s| {
                let c = cfg(&text.replace("seed_base = 11", &format!("seed_base = {}", 500 + s)));
                run_sweep(&c).unwrap().points[0].record.mean_qw.half_width
            })
            .sum::<f64>()
            / 12.0
    };
    let ratio = mean_hw(400_000) / mean_hw(200_000);
    assert!((ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.15, "ratio {ratio}");
}

#[test]
fn geometry_reports() {
    let iq = cfg("[model]\nkind = \"iq-switch\"\nports = 2\n");
    let dir = tempfile::tempdir().unwrap();
    let g = cmd_geometry(&iq, Some(dir.path())).unwrap();
    assert_eq!(g.region.facets().len(), 4);
    assert_eq!(g.p.len(), 4);
    assert_eq!(g.p_tilde.len(), 3);
    assert_eq!(g.delta.delta, 1.0);
    let facets = fs::read_to_string(dir.path().join("facets.csv")).unwrap();
    assert!(facets.starts_with("facet_id,c_1,c_2,c_3,c_4,b"));
    assert_eq!(facets.lines().count(), 5);

    let g = cmd_geometry(&cfg(ON_OFF), None).unwrap();
    assert_eq!(g.region.facets().len(), 1);
    assert!((g.sigma_b[0][0] - 0.16).abs() < 1e-12);

    let interior = cfg(&ON_OFF.replace("nu = [0.8]", "nu = [0.4]"));
    assert!(matches!(cmd_geometry(&interior, None), Err(Error::NotOnBoundary { .. })));
}

#[test]
fn verify_suites() {
    assert!(cmd_verify(&cfg(ON_OFF), Suite::Geometry).unwrap().passed());
    assert!(matches!("bogus".parse::<Suite>(), Err(Error::InvalidInput(_))));
    let short = cfg(&ON_OFF.replace("horizon = 200000", "horizon = 1000"));
    let r = cmd_verify(&short, Suite::Drift).unwrap();
    assert!(!r.advisories.is_empty());
    let ssc = cmd_verify(&cfg(ON_OFF), Suite::Ssc).unwrap();
    assert!(ssc.passed(), "{ssc}");
    assert!(cmd_verify(&cfg(ON_OFF), Suite::Jsq).is_err());
}

#[test]
fn sweep_kinds_are_checked() {
    assert!(cmd_jsq_sweep(&cfg(ON_OFF), None).is_err());
    let jsq = cfg(
        "eps_grid = [0.2]\n[model]\nkind = \"jsq\"\nservers = [{ values = [0, 1], probs = [0.5, 0.5] }]\n[run]\nhorizon = 10000\n",
    );
    assert!(cmd_sweep(&jsq, None).is_err());
    let r = cmd_jsq_sweep(&jsq, None).unwrap();
    assert_eq!(r.points.len(), 1);
    assert!(r.jsq);
}

fn htq(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_htq")).args(args).output().unwrap()
}

#[test]
fn command_line() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("on_off.toml");
    fs::write(&config, ON_OFF).unwrap();
    let out = dir.path().join("out");
    let c = config.to_str().unwrap();
    let o = out.to_str().unwrap();

    let g = htq(&["geometry", "--config", c, "--out", o]);
    assert!(g.status.success());
    assert!(out.join("facets.csv").exists());

    let s = htq(&["sweep", "--config", c, "--out", o, "--seed", "5", "--workers", "2"]);
    assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
    let summary = fs::read_to_string(out.join("summary.json")).unwrap();
    assert!(summary.contains("\"seed\": 5"));

    let v = htq(&["verify", "--config", c, "--suite", "geometry"]);
    assert!(v.status.success());
    assert!(String::from_utf8_lossy(&v.stdout).contains("[PASS]"));

    let bad = htq(&["verify", "--config", c, "--suite", "nope"]);
    assert!(!bad.status.success());

    fs::write(&config, ON_OFF.replace("nu = [0.8]", "nu = [0.4]")).unwrap();
    assert!(!htq(&["geometry", "--config", c]).status.success());
}
