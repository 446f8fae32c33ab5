//! End-to-end behavior of the `redmap` binary: exit codes, emitted files,
//! round-trip parseability and schedule-independence.

use std::path::PathBuf;
use std::process::{Command, Output};

use redmap_cli::report::{parse_sweep_csv, StateDto};
use redmap_core::{
    cp_check, resolved_convention, ChoiMatrix, ScenarioKind, ScenarioVerdict, Verdict, CP_TOL,
};

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_redmap")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("redmap-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(exe());
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &std::path::Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    let out = run(&[], &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_succeeds() {
    let out = run(&["help"], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("subcommands"));
}

#[test]
fn unknown_scenario_is_rejected_at_parse_time() {
    let dir = tmp_dir("bad-scenario");
    let cfg = write_config(&dir, "cfg.json", r#"{"scenario":"bogus"}"#);
    let out = run(&["sweep", "--config", &cfg], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown scenario"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn zero_samples_is_a_range_error() {
    let dir = tmp_dir("zero-samples");
    let cfg = write_config(&dir, "cfg.json", r#"{"scenario":"mc","n_samples":0}"#);
    let out = run(&["mcfraction", "--config", &cfg], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_samples"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tmp_dir("unknown-key");
    let cfg = write_config(&dir, "cfg.json", r#"{"scenario":"mc","surprise":1}"#);
    let out = run(&["mcfraction", "--config", &cfg], &[]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn singular_point_exits_two_and_names_the_obstruction() {
    let dir = tmp_dir("singular");
    let cfg = write_config(
        &dir,
        "cfg.json",
        &format!(
            r#"{{"scenario":"cnot_twice","theta":{}}}"#,
            std::f64::consts::FRAC_PI_4
        ),
    );
    let out = run(
        &["spectrum", "--config", &cfg, "--out", dir.to_str().unwrap()],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("maximal-entanglement") || err.contains("singular"),
        "stderr should name the obstruction: {err}"
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_csv_round_trips_and_verdicts_match_recomputation() {
    let dir = tmp_dir("sweep");
    let cfg = write_config(
        &dir,
        "cfg.json",
        r#"{"scenario":"cnot_twice","theta_grid":[0.05,1.5,24],"seed":7}"#,
    );
    let out = run(
        &["sweep", "--config", &cfg, "--out", dir.to_str().unwrap()],
        &[],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.join("sweep_cnot_twice.csv")).unwrap();
    let rows = parse_sweep_csv(&text).unwrap();
    assert_eq!(rows.len(), 24);
    let conv = resolved_convention();
    for row in &rows {
        let rep = ScenarioKind::CnotTwice.run(row.theta, &conv).unwrap();
        // verdict recomputed from the emitted spectrum's source
        let choi = ChoiMatrix::new(
            rep.matrices.iter().find(|(n, _)| n == "choi").unwrap().1.clone(),
            2,
        )
        .unwrap();
        let check = cp_check(&choi, CP_TOL).unwrap();
        let expect = match check.verdict {
            Verdict::Cp => ScenarioVerdict::Cp,
            Verdict::Ncp => ScenarioVerdict::Ncp,
        };
        assert_eq!(row.verdict, expect, "theta={}", row.theta);
        assert!((row.lambda_minus - rep.lambda_minus).abs() < 1e-15);
        assert!((row.lambda_plus - rep.lambda_plus).abs() < 1e-15);
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_rows_at_singular_theta_are_marked_singular() {
    let dir = tmp_dir("sweep-singular");
    // grid that lands exactly on pi/4
    let cfg = write_config(
        &dir,
        "cfg.json",
        &format!(
            r#"{{"scenario":"cnot_twice","theta_grid":[{},{},1]}}"#,
            std::f64::consts::FRAC_PI_4,
            std::f64::consts::FRAC_PI_4
        ),
    );
    let out = run(
        &["sweep", "--config", &cfg, "--out", dir.to_str().unwrap()],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.join("sweep_cnot_twice.csv")).unwrap();
    let rows = parse_sweep_csv(&text).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].verdict, ScenarioVerdict::Singular);
    assert!(rows[0].lambda_minus.is_nan());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn thread_count_does_not_change_bytes() {
    let dir = tmp_dir("threads");
    let cfg = write_config(
        &dir,
        "cfg.json",
        r#"{"scenario":"sqrtcphase","theta_grid":[0.05,1.5,32],"seed":3}"#,
    );
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    for (out, threads) in [(&out_a, "1"), (&out_b, "7")] {
        let res = run(
            &["sweep", "--config", &cfg, "--out", out.to_str().unwrap()],
            &[("REDMAP_THREADS", threads)],
        );
        assert_eq!(res.status.code(), Some(0));
    }
    let a = std::fs::read(out_a.join("sweep_sqrtcphase.csv")).unwrap();
    let b = std::fs::read(out_b.join("sweep_sqrtcphase.csv")).unwrap();
    assert_eq!(a, b);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn numbers_are_emitted_with_17_significant_digits() {
    let dir = tmp_dir("digits");
    let cfg = write_config(&dir, "cfg.json", r#"{"scenario":"sqrtcnot","theta":0.3}"#);
    let out = run(
        &["spectrum", "--config", &cfg, "--out", dir.to_str().unwrap()],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.join("spectrum_sqrtcnot.json")).unwrap();
    // theta = 0.3 must appear as a fixed-precision scientific literal
    assert!(
        text.contains("2.9999999999999999e-1") || text.contains("3.0000000000000000e-1"),
        "expected 17-significant-digit floats, got: {}",
        &text[..text.len().min(400)]
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn state_records_round_trip_through_the_cli() {
    let dir = tmp_dir("state");
    // a product state: preinitial must find s = 0
    let record = StateDto {
        d_first: 2,
        d_second: 2,
        system_slot: "second".into(),
        re: vec![1.0, 0.0, 0.0, 0.0],
        im: vec![0.0, 0.0, 0.0, 0.0],
    };
    let state_path = dir.join("phi.json");
    std::fs::write(&state_path, serde_json::to_string(&record).unwrap()).unwrap();
    let cfg = write_config(
        &dir,
        "cfg.json",
        &format!(
            r#"{{"scenario":"preinitial","phi":"{}"}}"#,
            state_path.to_string_lossy()
        ),
    );
    let out = run(
        &["preinitial", "--config", &cfg, "--out", dir.to_str().unwrap()],
        &[],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.join("preinitial.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["found"], serde_json::Value::Bool(true));
    assert!(parsed["s"].as_f64().unwrap() < 1e-9);
    // the emitted record echoes the state
    assert_eq!(parsed["phi"]["d_first"], 2);
    assert_eq!(parsed["phi"]["system_slot"], "second");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn conventions_subcommand_reports_the_winner() {
    let dir = tmp_dir("conventions");
    let out = run(&["conventions", "--out", dir.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.join("conventions.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["winner"]["control_slot"], "first");
    assert_eq!(parsed["winner"]["root_branch"], "principal");
    assert_eq!(parsed["winner"]["tensor_order"], "env_sys");
    assert_eq!(parsed["winner"]["state_reading"], "env_system");
    assert_eq!(parsed["winner"]["reproduces_maps"], true);
    assert_eq!(parsed["winner"]["reproduces_spectrum"], true);
    assert_eq!(parsed["winner"]["reproduces_product_identity"], false);
    assert_eq!(parsed["table"].as_array().unwrap().len(), 16);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn mcfraction_same_seed_is_identical() {
    let dir = tmp_dir("mc");
    let cfg = write_config(
        &dir,
        "cfg.json",
        r#"{"scenario":"mc","ensemble":"haar_full","n_samples":60,"seed":11,"theta":0.5}"#,
    );
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    for out in [&out_a, &out_b] {
        let res = run(
            &["mcfraction", "--config", &cfg, "--out", out.to_str().unwrap()],
            &[],
        );
        assert_eq!(res.status.code(), Some(0));
    }
    let a = std::fs::read(out_a.join("mcfraction.json")).unwrap();
    let b = std::fs::read(out_b.join("mcfraction.json")).unwrap();
    assert_eq!(a, b);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn augment_emits_the_reference_table() {
    let dir = tmp_dir("augment");
    let out = run(&["augment", "--out", dir.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.join("augment.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "u_l,locality_preserved,verdict,min_choi_eigenvalue");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("Z(x)X,true,CP"));
    assert!(lines[5].starts_with("X(x)X,false,NCP"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn dimratio_emits_the_power_table() {
    let dir = tmp_dir("dimratio");
    let out = run(&["dimratio", "--out", dir.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.join("dimratio.csv")).unwrap();
    assert!(text.starts_with("d_s,d_e,exact,approx,limit\n"));
    assert_eq!(text.lines().count(), 11);
    // the (2,2) row carries approx = 1/2
    assert!(text.lines().nth(1).unwrap().contains("5.0000000000000000e-1"));
    std::fs::remove_dir_all(&dir).ok();
}
