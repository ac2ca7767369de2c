use std::process::{Command, Output};

use serde_json::Value;

fn invforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invforge"))
        .args(args)
        .env_remove("INVFORGE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn without_header(path: &std::path::Path) -> Value {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("header");
    v
}

#[test]
fn completeness_ae_prints_counts() {
    let o = invforge(&["completeness", "AE", "n=3", "--samples", "10"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("10 − 3 = 7, family 7, PASS"), "{}", stdout(&o));
}

#[test]
fn truncated_family_is_incomplete() {
    let o = invforge(&["completeness", "AE", "n=3", "truncate=2", "--samples", "10"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("family 5, FAIL"));
}

#[test]
fn rank_of_rotations() {
    let o = invforge(&["rank", "AO", "n=4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().next(), Some("6"));
}

#[test]
fn verify_targets_and_exit_codes() {
    let o = invforge(&["verify", "expression", "u_x1", "under", "AE", "--samples", "5"]);
    assert_eq!(code(&o), 1);
    let o = invforge(&["verify", "equation", "heat", "n=3", "mu=1", "--samples", "10"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = invforge(&["verify", "basis", "AE", "n=3", "--samples", "10"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("7/7 invariants PASS"));
}

#[test]
fn usage_and_config_errors_exit_2() {
    assert_eq!(code(&invforge(&["list", "widgets"])), 2);
    assert_eq!(code(&invforge(&["verify", "--algebra", "AX"])), 2);
    assert_eq!(code(&invforge(&["verify", "AE", "colour=red"])), 2);
    assert_eq!(code(&invforge(&["verify", "AE", "--field", "complex"])), 2);
    assert_eq!(code(&invforge(&["eval", "S(1"])), 2);
    assert_eq!(code(&invforge(&["eval", "u1_x9"])), 2);
    assert_eq!(code(&invforge(&["verify", "equation", "wave"])), 2);
    assert_eq!(code(&invforge(&["frobnicate"])), 2);
}

#[test]
fn evaluation_failure_exits_3() {
    let zeros = vec!["0"; 13].join(",");
    let o = invforge(&["eval", "log(u1)", "--point", &zeros]);
    assert_eq!(code(&o), 3);
}

#[test]
fn eval_from_u_uses_log_chart() {
    let mut point = vec!["0", "1", "2", "3", "2", "1"];
    point.extend(["1"; 13]);
    let o = invforge(&["eval", "u1 + u1_t", "--algebra", "AG2_I", "--mu", "1", "--from-u", "--point", &point.join(",")]);
    assert_eq!(code(&o), 0);
    let v: f64 = stdout(&o).lines().nth(1).unwrap().rsplit(' ').next().unwrap().parse().unwrap();
    assert!((v - (2f64.ln() + 0.5)).abs() < 1e-14);
}

#[test]
fn listings() {
    let bases = stdout(&invforge(&["list", "bases"]));
    assert!(bases.contains("AP(1,n) m-field basis"));
    assert!(stdout(&invforge(&["list", "equations"])).contains("born-infeld"));
    assert!(stdout(&invforge(&["list", "algebras"])).contains("AG2_II"));
    assert!(stdout(&invforge(&["list", "tensors"])).contains("theta"));
}

#[test]
fn reports_are_deterministic_and_reloadable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = invforge(&["verify", "--algebra", "AE", "--n", "3", "--seed", "42", "--samples", "10", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    let ta = std::fs::read_to_string(&a).unwrap();
    let strip = |t: &str| t.lines().filter(|l| !l.contains("generated_unix")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&ta), strip(&std::fs::read_to_string(&b).unwrap()));

    let v: Value = serde_json::from_str(&ta).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["verdict"], "PASS");
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    for c in v["checks"].as_array().unwrap() {
        assert!(c.get("paper_anchor").is_some() && c.get("residual_max").is_some());
    }
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(again, v);
}

#[test]
fn config_file_env_seed_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# AE run\nalgebra = AE\nn = 4\nsamples = 5\nseed = 11\n").unwrap();
    let out = dir.path().join("r.json");
    let o = invforge(&["verify", "--config", cfg.to_str().unwrap(), "n=3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = without_header(&out);
    assert_eq!((v["config"]["n"].as_u64(), v["config"]["seed"].as_u64()), (Some(3), Some(11)));

    let o = Command::new(env!("CARGO_BIN_EXE_invforge"))
        .args(["verify", "AE", "samples=5", "--out", out.to_str().unwrap()])
        .env("INVFORGE_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(without_header(&out)["config"]["seed"].as_u64(), Some(77));

    let o = Command::new(env!("CARGO_BIN_EXE_invforge"))
        .args(["verify", "AE", "samples=5", "--seed", "3", "--out", out.to_str().unwrap()])
        .env("INVFORGE_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(without_header(&out)["config"]["seed"].as_u64(), Some(3));
}

#[test]
fn equation_report_names_failing_operators() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bi.json");
    let o = invforge(&["verify", "equation", "born-infeld", "--samples", "10", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let v = without_header(&out);
    let failing = v["checks"][0]["failing"].as_array().unwrap();
    assert!(failing.iter().any(|f| f.as_str().unwrap().starts_with('J')));
    let o = invforge(&["verify", "equation", "born-infeld", "reading=corrected", "--samples", "10"]);
    assert_eq!(code(&o), 0);
}
