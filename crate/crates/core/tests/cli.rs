use std::path::Path;
use std::process::{Command, Output};

fn hamrep(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamrep")).args(args).arg("--out").arg(out).output().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn catalog_lists_examples() {
    let dir = tempfile::tempdir().unwrap();
    let o = hamrep(&["catalog"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["EX1", "EX2", "EX4", "ABS"] {
        assert!(text.contains(name));
    }
    let csv = std::fs::read_to_string(dir.path().join("catalog.csv")).unwrap();
    assert!(csv.starts_with("name,n,blc,autonomous,description\n"));
}

#[test]
fn ex4_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = hamrep(&["represent", "--example", "EX4"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("BLC_VIOLATED"));
    let v = json(&dir.path().join("audit.json"));
    assert_eq!(v["reason"], "BLC_VIOLATED");

    let o = hamrep(&["verify", "--example", "EX4", "--check", "BLC"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let v = json(&dir.path().join("verify.json"));
    assert_eq!(v["records"][0]["condition"], "BLC");
    assert_eq!(v["records"][0]["pass"], false);
}

#[test]
fn verify_single_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = hamrep(&["verify", "--example", "EX2", "--check", "hlc"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json(&dir.path().join("verify.json"));
    assert_eq!(v["records"].as_array().unwrap().len(), 1);
    assert_eq!(v["status"], "pass");
}

#[test]
fn represent_writes_trace_and_audit() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        hamrep(&["represent", "--example", "EX1", "--controls", "500", "--pairs", "100", "--mesh-x", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let trace = std::fs::read_to_string(dir.path().join("representation_trace.csv")).unwrap();
    assert!(trace.starts_with("a1,a2,omega,d,e_f,e_l\n"));
    let v = json(&dir.path().join("audit.json"));
    assert_eq!(v["status"], "pass");
    assert!(v["records"].as_array().unwrap().iter().any(|r| r["condition"] == "A1"));
}

#[test]
fn bolza_modes() {
    let dir = tempfile::tempdir().unwrap();
    let o = hamrep(&["bolza", "--example", "ABS", "--Nt", "8", "--Nx", "33", "--controls", "16"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("bolza.json"));
    assert_eq!(v["coarse"]["min_variational"], 0.0);
    assert!(dir.path().join("arc_control.csv").exists());

    let o = hamrep(
        &["bolza", "--example", "EX2", "--Nt", "8", "--Nx", "33", "--start", "free", "--terminal", "abs"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&dir.path().join("bolza.json"))["mode"], "value");

    let o = hamrep(&["bolza", "--example", "EX2D"], dir.path());
    assert_eq!(o.status.code(), Some(64));
    let o = hamrep(&["bolza", "--example", "EX2", "--Nx", "40"], dir.path());
    assert_eq!(o.status.code(), Some(64));
    let o = hamrep(&["bolza", "--example", "EX2", "--radius", "1"], dir.path());
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn usage_errors_and_config() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(hamrep(&["verify"], dir.path()).status.code(), Some(64));
    assert_eq!(hamrep(&["verify", "--example", "EX2", "--check", "H9"], dir.path()).status.code(), Some(64));
    assert_eq!(hamrep(&["stability", "--example", "EX2", "--rule", "wobble"], dir.path()).status.code(), Some(64));
    let both = ["verify", "--example", "EX2", "--model-file", "x.csv"];
    assert_eq!(hamrep(&both, dir.path()).status.code(), Some(64));

    let cfg = dir.path().join("c.cfg");
    std::fs::write(&cfg, "example = EX2\ncheck = H1\n").unwrap();
    let o = hamrep(&["verify", "--config", cfg.to_str().unwrap(), "--check", "H2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json(&dir.path().join("verify.json"));
    assert_eq!(v["records"][0]["condition"], "H2");

    std::fs::write(&cfg, "unknown-flag = 1\n").unwrap();
    assert_eq!(hamrep(&["verify", "--config", cfg.to_str().unwrap()], dir.path()).status.code(), Some(64));

    let o =
        Command::new(env!("CARGO_BIN_EXE_hamrep")).args(["catalog"]).env("HAMREP_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn model_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("model.csv");
    let mut s = String::from("x,p,H\n");
    for i in 0..=10 {
        let x = -1.0 + 0.2 * i as f64;
        for j in 0..=40 {
            let p = -4.0 + 0.2 * j as f64;
            s.push_str(&format!("{x},{p},{}\n", (1.0f64 + p * p).sqrt() - x.abs()));
        }
    }
    std::fs::write(&file, s).unwrap();
    let o = hamrep(&["verify", "--model-file", file.to_str().unwrap(), "--check", "H1"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&dir.path().join("verify.json"))["model"], "MODEL");
}

#[test]
fn stability_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = hamrep(
        &["stability", "--example", "EX2", "--rule", "shift", "--imax", "4", "--points", "3", "--tol-stab", "1"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let csv = std::fs::read_to_string(dir.path().join("stability.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    let v = json(&dir.path().join("stability.json"));
    assert_eq!(v["rule"], "shift");
    assert!(v["records"].as_array().unwrap().iter().any(|r| r["condition"] == "SET_LIMIT"));
}
