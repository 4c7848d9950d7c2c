use std::path::Path;
use std::process::{Command, Output};

use zsrp_cli::CSV_HEADER;

fn zsrp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zsrp"))
        .args(args)
        .env_remove("ZSRP_SEED")
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn analytic_point_prints_key_values() {
    let out = zsrp(&["zsrp", "--scheme", "fcr-gcsi-pfs", "--closed-form"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("scheme=fcr-gcsi-pfs\nevaluator=analytic\nzsrp=0.0314"));
    assert!(text.contains("\nmeijer=") && text.contains("\nseries="));
}

#[test]
fn empty_config_matches_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "empty.toml", "");
    let with = zsrp(&["--config", &cfg, "zsrp"]);
    let without = zsrp(&["zsrp"]);
    assert!(with.status.success());
    assert_eq!(with.stdout, without.stdout);
}

#[test]
fn transmit_power_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let low = write(dir.path(), "low.toml", "[environment]\ngamma_b_db = -5.0\n");
    let high = write(dir.path(), "high.toml", "[environment]\ngamma_b_db = 45.0\n");
    for args in [&["zsrp"][..], &["--trials", "5000", "zsrp", "--scheme", "scr-fcsi-pfs", "--evaluator", "mc"]] {
        let a = zsrp(&[&["--config", &low][..], args].concat());
        let b = zsrp(&[&["--config", &high][..], args].concat());
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn run_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "fig2.toml",
        "[experiment]\nkind = \"fig2\"\ngrid = [200.0, 400.0]\ntrials = 3000\n",
    );
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    for out in [&out1, &out2] {
        let st = zsrp(&["--config", &cfg, "--out", out.to_str().unwrap(), "run"]);
        assert!(st.status.success());
    }
    let a = std::fs::read_to_string(&out1).unwrap();
    assert_eq!(a, std::fs::read_to_string(&out2).unwrap());
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 1 + 2 * (5 + 2));
    assert!(lines[1].starts_with("r_max,200,fcr-rs,mc,"));
    assert!(lines.iter().skip(1).all(|l| l.ends_with(",0")));
}

#[test]
fn seed_flag_and_environment_agree() {
    let flag = zsrp(&["--seed", "42", "--trials", "2000", "zsrp", "--evaluator", "mc"]);
    let env = Command::new(env!("CARGO_BIN_EXE_zsrp"))
        .args(["--trials", "2000", "zsrp", "--evaluator", "mc"])
        .env("ZSRP_SEED", "42")
        .output()
        .unwrap();
    assert!(flag.status.success());
    assert_eq!(flag.stdout, env.stdout);
    assert!(stdout(&flag).contains("seed=42"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "unknown.toml", "[geometry]\nradius = 3\n");
    let negative = write(dir.path(), "neg.toml", "[geometry]\nr_max = -1.0\n");
    let cases: Vec<Vec<&str>> = vec![
        vec!["--config", &unknown, "zsrp"],
        vec!["--config", &negative, "zsrp"],
        vec!["--config", "/nonexistent/zsrp.toml", "zsrp"],
        vec!["zsrp", "--scheme", "nope"],
        vec!["zsrp", "--scheme", "scr-rs"],
        vec!["--threads", "0", "zsrp"],
        vec!["--trials", "0", "zsrp", "--evaluator", "mc"],
    ];
    for args in cases {
        let out = zsrp(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn analytic_altitude_search_has_interior_optimum() {
    let out = zsrp(&["optimize-altitude", "--h-lo", "50", "--h-hi", "1000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let h: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("altitude="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(h > 100.0 && h < 900.0, "{text}");
}

#[test]
fn selftest_passes() {
    let out = zsrp(&["selftest"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 8);
}
