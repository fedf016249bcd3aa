use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn flagtri(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flagtri")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn fig8() -> String {
    data("fig8.json").display().to_string()
}

#[test]
fn missing_file_exits_2() {
    let out = flagtri(&["verify", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(flagtri(&["solve", "missing.json"]).status.code(), Some(2));
    assert_eq!(flagtri(&["verify", "--suite", "nz"]).status.code(), Some(2));
}

#[test]
fn bloch_suite_without_file() {
    let out = flagtri(&["verify", "--suite", "bloch", "--random", "30", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["verify"]["all_passed"], true);
    assert_eq!(r["schema_version"], 1);
}

#[test]
fn nz_suite_on_figure_eight() {
    let out = flagtri(&["verify", &fig8(), "--suite", "nz"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let checks = r["verify"]["checks"].as_array().unwrap();
    let m4 = checks.iter().find(|c| c["name"] == "mult_by_4").unwrap();
    assert_eq!(m4["passed"], true);
    assert!(m4["detail"].as_str().unwrap().contains("h̄*Ω = −4ω"));
}

#[test]
fn failing_suite_exits_4_and_names_the_check() {
    let out = flagtri(&["verify", data("sphere_torus.json").to_str().unwrap(), "--suite", "nz"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nz/homology_rank"));
    assert_eq!(json(&out)["verify"]["first_failure"], "nz/homology_rank");
}

#[test]
fn single_tetrahedron_solves_trivially() {
    let out = flagtri(&["solve", data("single_tet.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["solve"]["equations"], 0);
}

#[test]
fn no_convergence_exits_3() {
    let out = flagtri(&["solve", &fig8(), "--seeds", "3", "--max-iter", "0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn solve_is_reproducible_and_classified() {
    let args = ["solve", &fig8(), "--seeds", "300", "--seed", "11", "--snap"];
    let a = flagtri(&args);
    let b = flagtri(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    for s in r["solve"]["solutions"].as_array().unwrap() {
        assert!(s["standard_structure"].is_string());
        assert_eq!(s["exact"]["holds_exactly"], true);
    }
}

#[test]
fn json_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("flagtri-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.json");
    let out = flagtri(&["volume", &fig8(), "--standard", "hyperbolic", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((r["volume"]["volume"].as_f64().unwrap() - 2.029883212819307).abs() < 1e-10);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn volumes_of_standard_structures() {
    let vol = |extra: &[&str]| {
        let f = fig8();
        let mut args = vec!["volume", f.as_str()];
        args.extend_from_slice(extra);
        let out = flagtri(&args);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let r = json(&out);
        assert_eq!(r["volume"]["holds_exactly"], true);
        r["volume"]["volume"].as_f64().unwrap()
    };
    let hyp = vol(&["--standard", "hyperbolic"]);
    assert!((hyp - 2.029883212819307).abs() < 1e-10);
    assert!((vol(&["--standard", "hyperbolic", "--conj"]) + hyp).abs() < 1e-10);
    assert!(vol(&["--standard", "cr-omega"]).abs() < 1e-10);
    assert!(vol(&["--standard", "cr-sqrt7-a"]).abs() < 1e-10);
    let shapes = r#"[[{"exact":"0"},{"exact":"1"},{"exact":"1"},{"exact":"1"}]]"#;
    assert_eq!(flagtri(&["volume", &fig8(), "--shapes", shapes]).status.code(), Some(2));
}

#[test]
fn help_covers_every_flag() {
    let solve = String::from_utf8(flagtri(&["solve", "--help"]).stdout).unwrap();
    for f in ["--boundary", "--tol", "--max-iter", "--seeds", "--seed", "--continue", "--step", "--snap", "--json", "--require-ordered"] {
        assert!(solve.contains(f), "{f}");
    }
    let verify = String::from_utf8(flagtri(&["verify", "--help"]).stdout).unwrap();
    for f in ["--suite", "--random", "--seed", "--json"] {
        assert!(verify.contains(f), "{f}");
    }
}
