use std::path::Path;
use std::process::{Command, Output};

use eisencong::qexp;
use eisencong::report::{Report, Status, REPORT_DIR_ENV};
use eisencong_core::arith::Int;
use num_traits::Zero;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_eisencong"));
    c.env_remove(REPORT_DIR_ENV);
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn gauss_quadratic_mod_five() {
    let o = run(&["epsilon", "gauss", "--modulus", "5", "--char", "quadratic"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("G^2 = 5"), "{}", stdout(&o));
}

#[test]
fn empty_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    std::fs::write(&cfg, "").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "selftest", "all"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_typos_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[presets.z]\nbuiltin = \"zeta9\"\nalpah = 2\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "euler", "identity"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpah"));
    let o = run(&["--config", dir.path().join("missing.toml").to_str().unwrap(), "euler", "identity"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn wrong_p_and_unknown_preset() {
    assert_eq!(run(&["congruence", "check", "--preset", "zeta9", "--p", "5", "--bound", "3"]).status.code(), Some(2));
    assert_eq!(run(&["congruence", "check", "--preset", "zeta11", "--bound", "3"]).status.code(), Some(2));
    assert_eq!(run(&["eis", "expand", "--preset", "zeta9", "--phi", "battery:99"]).status.code(), Some(2));
}

#[test]
fn congruence_small_bound_and_control() {
    let o = run(&["congruence", "check", "--preset", "zeta9", "--phi", "battery:0", "--bound", "9", "--p", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["congruence", "check", "--preset", "zeta9", "--phi", "control", "--k", "2", "--bound", "12", "--forced"]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    // without --forced the control is refused
    let o = run(&["congruence", "check", "--preset", "zeta9", "--phi", "control", "--k", "2", "--bound", "12"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn inconclusive_hypothesis_exits_four() {
    let o = run(&["assumptions", "check", "--preset", "zeta9"]);
    assert_eq!(o.status.code(), Some(4), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("h2: holds") && s.contains("h3: holds"));
}

#[test]
fn class_groups_from_the_command_line() {
    let o = run(&["classgrp", "compute", "--disc", "-23"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Z/3 (exact)"));
    let o = run(&["classgrp", "compute", "--disc", "-12"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["classgrp", "compute", "--preset", "zeta9", "--which", "k0", "--ray", "11"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Z/11"), "{}", stdout(&o));
}

fn read_qexp(p: &Path) -> eisencong_core::eisenstein::QExpansion {
    qexp::read(&std::fs::read_to_string(p).unwrap()).unwrap().1
}

#[test]
fn expansion_files_restrict_and_twist() {
    let dir = tempfile::tempdir().unwrap();
    let f = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let steps: [Vec<String>; 4] = [
        vec!["eis".into(), "expand".into(), "--preset".into(), "zeta9".into(), "--k".into(), "2".into(), "--bound".into(), "12".into(), "--out".into(), f("top.qexp")],
        vec!["eis".into(), "restrict".into(), "--preset".into(), "zeta9".into(), "--input".into(), f("top.qexp"), "--out".into(), f("res.qexp")],
        vec!["eis".into(), "expand".into(), "--preset".into(), "zeta9".into(), "--side".into(), "base".into(), "--k".into(), "6".into(), "--bound".into(), "4".into(), "--out".into(), f("base.qexp")],
        vec!["eis".into(), "frobenius".into(), "--preset".into(), "zeta9".into(), "--input".into(), f("base.qexp"), "--out".into(), f("frob.qexp")],
    ];
    for s in &steps {
        let o = bin().args(s).output().unwrap();
        assert_eq!(o.status.code(), Some(0), "{s:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let res = read_qexp(&dir.path().join("res.qexp"));
    let frob = read_qexp(&dir.path().join("frob.qexp"));
    assert_eq!(res.order_id, frob.order_id);
    assert!(!res.is_empty());
    for xi in res.coeffs.keys().chain(frob.coeffs.keys()) {
        let d: Int = res.coefficient(xi) - frob.coefficient(xi);
        assert!((d % Int::from(3)).is_zero(), "at {xi}");
    }
    // a top-field expansion cannot be twisted by a preset it does not belong to
    let o = run(&["eis", "restrict", "--preset", "zeta7", "--input", &f("top.qexp")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_reports_are_stable_and_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = run(&["--json", p.to_str().unwrap(), "epsilon", "inductivity", "--preset", "zeta9"]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let r = Report::from_json(std::str::from_utf8(&ta).unwrap()).unwrap();
    assert_eq!(r.status, Status::Ok);
    assert_eq!(r.command, "epsilon inductivity");
    assert_eq!(r.to_json().as_bytes(), &ta[..]);
}

#[test]
fn report_directory_from_environment_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().env(REPORT_DIR_ENV, dir.path()).args(["euler", "identity", "--max-e", "2"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("euler-identity.json").exists());

    let cfg = dir.path().join("c.toml");
    let sub = dir.path().join("sub");
    std::fs::write(&cfg, format!("[settings]\nreport_dir = {:?}\n[characters.q5]\nmodulus = 5\norder = 2\n", sub)).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "epsilon", "gauss", "--modulus", "5", "--char", "q5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(sub.join("epsilon-gauss.json").exists());
}

#[test]
fn selftest_with_a_small_battery() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        "[presets.zeta9]\nbuiltin = \"zeta9\"\n\n[batteries.quick]\npreset = \"zeta9\"\nweights = [2]\nbound = 6\nselect = [0, 1]\n",
    )
    .unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "selftest", "all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("[zeta9: battery quick] ok"));
}
