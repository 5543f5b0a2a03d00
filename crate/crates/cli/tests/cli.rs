use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_anseroid"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn anseroid")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn missing_config_exits_2() {
    let o = run(&["run", "missing.cfg"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.cfg"));
}

#[test]
fn invalid_override_exits_2() {
    let cfg = scenario("raven_pair.cfg");
    let o = run(&["run", cfg.to_str().unwrap(), "--set", "vehicle.gamma=-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("vehicle.gamma"));
}

#[test]
fn raven_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("raven_pair.cfg");
    let o = run(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("stable=true"));
    for f in ["trajectory.csv", "summary.json", "manifest.json", "plots/cost.csv", "plots/shape.csv"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["stable"], true);
    assert_eq!(summary["ticks"], 1001);
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,id,x,y,theta,v,omega,mode,W,M,E");
    assert_eq!(lines.count(), 2 * 1001);
}

#[test]
fn overrides_and_determinism() {
    let cfg = scenario("raven_pair.cfg");
    let go = |dir: &Path| {
        let o = run(&[
            "run",
            cfg.to_str().unwrap(),
            "--set",
            "scenario.duration=3.0",
            "--set",
            "analysis.stability_window=1.0",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(dir.join("trajectory.csv")).unwrap()
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = go(a.path());
    assert_eq!(first, go(b.path()));
    let manifest = std::fs::read_to_string(a.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("scenario.duration=3.0"));
    let rows = String::from_utf8(first).unwrap().lines().count();
    assert_eq!(rows, 1 + 2 * 151);
}

#[test]
fn derive_prints_raven_constants() {
    let o = run(&["derive", "18.7", "1.4", "12", "9", "1.2", "0.0771428571"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let value = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key} = ")))
            .unwrap_or_else(|| panic!("{key} missing in {text}"))
            .parse()
            .unwrap()
    };
    assert!((value("gamma") - 1.24).abs() < 0.005);
    assert!((value("c2") - 95.0).abs() < 0.5);
    assert!((value("c1") - 5e-3).abs() < 0.5e-3);
    assert!((value("omega") - 70.0).abs() < 3.0);
    assert!((value("# r_star") - 0.054).abs() < 1e-9);

    let heavy = stdout(&run(&["derive", "37.4", "1.4", "12", "9", "1.2", "0.0771428571"]));
    let g2: f64 = heavy.lines().find_map(|l| l.strip_prefix("gamma = ")).unwrap().parse().unwrap();
    assert!((g2 - 2.0 * value("gamma")).abs() < 1e-12);

    assert_eq!(run(&["derive", "0", "1.4", "12", "9", "1.2", "0.07"]).status.code(), Some(2));
}

#[test]
fn verify_filters() {
    let o = run(&["verify", "--only", "wake"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| l.contains(" PASS ") || l.contains(" FAIL ")).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|l| l.split_whitespace().nth(1) == Some("wake")));

    assert_eq!(run(&["verify", "--only", "nonsense"]).status.code(), Some(2));
}
