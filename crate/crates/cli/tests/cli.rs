use std::fs;
use std::process::{Command, Output};

fn anyon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anyon"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .expect("spawn anyon")
}

fn data_lines(out: &Output) -> Vec<String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[test]
fn single_rates_to_stdout() {
    let out = anyon(&["single-rates", "--theta", "pi/2", "--beta", "1", "--gamma", "0.1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.starts_with("# frequency=appendix"));
    let lines = data_lines(&out);
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("theta [rad],"));
}

#[test]
fn fig1_grid_and_range() {
    let out = anyon(&["fig1", "--grid", "5", "--range", "0:pi"]);
    assert!(out.status.success());
    assert_eq!(data_lines(&out).len(), 6);
}

#[test]
fn validation_errors_exit_one() {
    for args in [
        vec!["fig2", "--xi", "1.5"],
        vec!["single-rates", "--beta", "-1"],
        vec!["spectrum", "--cutoff", "1"],
        vec!["fig1", "--no-such-flag"],
        vec!["fig1", "--range", "1:0"],
    ] {
        let out = anyon(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn io_errors_exit_two() {
    let out = anyon(&["sweep", "--config", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not/here.json"));
}

#[test]
fn out_dir_gets_csv_json_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = anyon(&["spectrum", "--grid", "16", "--theta", "pi/2", "--xi", "1", "--out", d, "--svg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let names: Vec<String> = fs::read_dir(d)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    for ext in ["csv", "json", "svg"] {
        assert!(names.iter().any(|n| n.ends_with(ext)), "{ext} missing in {names:?}");
    }
    let json = names.iter().find(|n| n.ends_with(".json")).unwrap();
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join(json)).unwrap()).unwrap();
    assert_eq!(meta["timestamp"], "2023-11-14T22:13:20Z");
    assert_eq!(meta["conventions"]["conjugation"], "modulus");
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"task":"fig1","params":{"beta":1.0,"gamma":0.1},"axes":[{"name":"theta","start":0.0,"stop":3.141592653589793,"count":7}]}"#,
    )
    .unwrap();
    let a = anyon(&["sweep", "--config", cfg.to_str().unwrap()]);
    let b = anyon(&["fig1", "--grid", "7", "--range", "0:pi"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);

    fs::write(&cfg, r#"{"task":"fig1","unknown":1}"#).unwrap();
    let bad = anyon(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn ep_locate_one_row_per_xi() {
    let out = anyon(&["ep-locate", "--xi", "0.5,-0.5,1"]);
    assert!(out.status.success());
    assert_eq!(data_lines(&out).len(), 4);
}

#[test]
fn thread_count_does_not_change_output() {
    let a = anyon(&["fig2", "--grid", "40", "--threads", "1"]);
    let b = anyon(&["fig2", "--grid", "40", "--threads", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
