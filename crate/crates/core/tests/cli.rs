use std::path::Path;
use std::process::Command;
use std::time::Instant;

use layerscat::cli::*;
use layerscat::error::Error;

const BIN: &str = env!("CARGO_BIN_EXE_layerscat");

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const EXAMPLE2_IBVP: &str = r#"{
  "problem": "impedance",
  "k_plus": 2.7,
  "k_minus": 3.5,
  "surface": {"builtin": "gamma2"},
  "incident": {"plane": {"theta_d": 4.18879020478639}},
  "beta": {"constant": [1.0, 0.0]},
  "N": 4,
  "a_pi": 4,
  "eval_points": [[1.0, -0.2], [0.0, 0.5]]
}"#;

#[test]
fn every_preset_runs_quickly_at_n8() {
    for name in PRESET_NAMES {
        let mut cfg = preset(name).unwrap();
        cfg.n = 8;
        cfg.validate().unwrap();
        let t = Instant::now();
        let rep = run(&cfg).unwrap();
        assert!(t.elapsed().as_secs_f64() < 60.0, "{name}");
        assert_eq!(rep.nodes, 161);
        assert!(rep.points[0].re.is_finite() && rep.points[0].im.is_finite());
        assert!(rep.residual_norm <= 1e-10);
    }
}

#[test]
fn example1_report_error() {
    let rep = run(&preset("example1-dbvp").unwrap()).unwrap();
    let rel = rep.points[0].rel_error.unwrap();
    assert!(rel > 1.5e-4 && rel < 3.5e-4, "{rel:e}");
}

#[test]
fn example2_report_is_compared_with_the_flat_solution() {
    let mut cfg = preset("example2-ibvp").unwrap();
    cfg.n = 8;
    let rep = run(&cfg).unwrap();
    let p = &rep.points[0];
    assert!((p.exact_re.unwrap() - 0.643898669829883).abs() < 1e-9);
    assert!((p.exact_im.unwrap() + 0.508543039062194).abs() < 1e-9);
    assert!(p.abs_error.unwrap() < 2e-3);
}

#[test]
fn malformed_configs_are_rejected_with_field_names() {
    let zero = EXAMPLE2_IBVP.replace("\"N\": 4", "\"N\": 0");
    match RunConfig::from_json(&zero) {
        Err(Error::Config(m)) => assert!(m.starts_with("N:"), "{m}"),
        other => panic!("{other:?}"),
    }
    let bad_theta = EXAMPLE2_IBVP.replace("4.18879020478639", "1.0");
    assert!(matches!(RunConfig::from_json(&bad_theta), Err(Error::Config(m)) if m.contains("theta_d")));
    let unknown = EXAMPLE2_IBVP.replace("\"N\": 4", "\"N\": 4, \"extra\": 1");
    assert!(RunConfig::from_json(&unknown).is_err());
    let odd = EXAMPLE2_IBVP.replace("\"a_pi\": 4", "\"a_pi\": 2.3");
    assert!(matches!(RunConfig::from_json(&odd), Err(Error::Config(m)) if m.contains("a_pi")));
    let surf = EXAMPLE2_IBVP.replace("gamma2", "gamma9");
    let cfg = RunConfig::from_json(&surf).unwrap();
    assert!(run(&cfg).is_err());
}

#[test]
fn expression_surface_matches_builtin() {
    let a = RunConfig::from_json(EXAMPLE2_IBVP).unwrap();
    let b = RunConfig::from_json(&EXAMPLE2_IBVP.replace(r#"{"builtin": "gamma2"}"#, r#"{"expr": {"f": "-1"}}"#)).unwrap();
    let (ra, rb) = (compute(&a).unwrap(), compute(&b).unwrap());
    for (x, y) in ra.density.values.iter().zip(&rb.density.values) {
        assert!((x - y).norm() < 1e-12);
    }
    assert_ne!(a.hash(), b.hash());
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::from_json(EXAMPLE2_IBVP).unwrap();
    cfg.output.dir = Some(dir.path().to_path_buf());
    let mut texts = Vec::new();
    for _ in 0..2 {
        let rep = run(&cfg).unwrap();
        assert_eq!(rep.outputs.len(), 2);
        let d = std::fs::read_to_string(dir.path().join("density.csv")).unwrap();
        let f = std::fs::read_to_string(dir.path().join("field.csv")).unwrap();
        texts.push((d, f));
    }
    assert_eq!(texts[0], texts[1]);
    let first = texts[0].0.lines().next().unwrap().to_string();
    assert_eq!(first, format!("# config-sha256 {}", cfg.hash()));
}

#[test]
fn sweep_rows_and_self_convergence() {
    let cfg = preset("example3-ibvp").unwrap();
    let rows = convergence_sweep(&cfg, &[8, 16, 32]).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].diff_prev.is_none());
    let (d1, d2) = (rows[1].diff_prev.unwrap(), rows[2].diff_prev.unwrap());
    assert!(d2 < d1, "{d1:e} {d2:e}");
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &cfg, &rows).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.lines().any(|l| l == "N,point,x1,x2,re,im,abs_error,rel_error,diff_prev"));
    assert!(convergence_sweep(&cfg, &[16, 8]).is_err());
}

#[test]
fn single_n_sweep_equals_run() {
    let cfg = RunConfig::from_json(EXAMPLE2_IBVP).unwrap();
    let rows = convergence_sweep(&cfg, &[4]).unwrap();
    let rep = run(&cfg).unwrap();
    assert_eq!(rows.len(), rep.points.len());
    for (r, p) in rows.iter().zip(&rep.points) {
        assert_eq!((r.re, r.im), (p.re, p.im));
    }
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_config(dir.path(), "good.json", EXAMPLE2_IBVP);
    let out = Command::new(BIN).args(["solve", "--config"]).arg(&good).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["N"], 4);

    let out = Command::new(BIN).args(["solve", "--N", "0", "--config"]).arg(&good).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let on_surface = write_config(dir.path(), "on.json", &EXAMPLE2_IBVP.replace("[0.0, 0.5]", "[0.0, -1.0]"));
    let out = Command::new(BIN).args(["solve", "--config"]).arg(&on_surface).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    let out = Command::new(BIN).args(["presets", "run", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = Command::new(BIN).args(["presets", "list"]).output().unwrap();
    let names: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(names, PRESET_NAMES);

    let out = Command::new(BIN)
        .args(["greens", "--grid", "-1:1:2,0.5:1:2", "--source", "0,-1.5", "--config"])
        .arg(&good)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let data = String::from_utf8(out.stdout).unwrap();
    assert_eq!(data.lines().filter(|l| !l.starts_with('#')).count(), 5);
}
