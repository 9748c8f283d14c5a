use std::process::{Command, Output};

use supervol::virasoro::{free_energy, Model};
use supervol::{Bounds, EvenPoly, PiScalar, TruncSeries};

fn supervol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supervol"))
        .args(args)
        .env_remove("SUPERVOL_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn volume_output() {
    let o = supervol(&["volume", "theta", "2", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "(3/256)·L1^2 + (9/64)·π^2");

    let o = supervol(&["volume", "theta", "1", "1", "--eval", "2pii"]);
    assert_eq!(stdout(&o), "1/8");
}

#[test]
fn brackets() {
    assert_eq!(stdout(&supervol(&["bracket", "theta", "1", "1"])), "63/512");
    assert_eq!(stdout(&supervol(&["bracket", "kw", "0", "0", "0"])), "1");
}

#[test]
fn tau_json_parses() {
    let o = supervol(&["--json", "tau", "kw", "--log", "--max-weight", "2"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let parsed = TruncSeries::<PiScalar>::from_json(&v).unwrap();
    let direct =
        free_energy(Model::KW, Bounds::new(2, 3, 2)).map(|r| PiScalar::from_rat(r.clone()));
    assert!(!parsed.is_zero());
    assert_eq!(parsed, direct);
}

#[test]
fn volume_json_parses() {
    let o = supervol(&["--json", "volume", "wp", "1", "2"]);
    let p: EvenPoly = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(p, supervol::volumes::vol_wp(1, 2).unwrap());
}

#[test]
fn specrec_bridge() {
    let o = supervol(&["specrec", "sine", "1", "2", "--check-bridge"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn exit_codes() {
    assert_eq!(
        supervol(&["volume", "theta", "0", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(supervol(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(
        supervol(&["verify", "kdv", "--bad-input"]).status.code(),
        Some(1)
    );
    assert_eq!(
        supervol(&["verify", "volumes", "--max-euler", "3"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn report_file() {
    let dir = std::env::temp_dir().join(format!("supervol-report-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.json");
    let o = supervol(&[
        "verify",
        "dilaton",
        "--max-euler",
        "3",
        "--report",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    std::fs::remove_dir_all(&dir).ok();
}
