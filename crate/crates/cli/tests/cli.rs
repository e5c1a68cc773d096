use std::process::{Command, Output};

fn irred(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irred")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn p2_is_irreducible() {
    let o = irred(&["p2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: IRREDUCIBLE"), "{}", stdout(&o));
}

#[test]
fn family_writes_a_replayable_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let o = irred(&["family", "--n", "2", "--P", "0", "--json", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: INCONCLUSIVE"));
    let text = std::fs::read_to_string(&path).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["verdict"], "INCONCLUSIVE");
    assert_eq!(json["input"]["command"], "family");
    let c = irred_core::verdict::Certificate::from_json(&text).unwrap();
    c.replay().unwrap();
}

#[test]
fn pole_shortcut_from_the_command_line() {
    let o = irred(&["family", "--n", "2", "--P", "1/x"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("applies") && out.contains("verdict: IRREDUCIBLE"), "{out}");
}

#[test]
fn input_errors_exit_with_one() {
    for args in [
        &["p3", "--mu", "2"][..],
        &["family", "--n", "2", "--P", "1/y"],
        &["family", "--n", "2", "--P", "x +"],
        &["ve", "--field", "x = 1; y = ", "--curve", "t; 0", "--order", "1"],
    ] {
        let o = irred(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = irred(&["p3", "--mu", "-1"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("exp"));
}

#[test]
fn ve_prints_the_linear_system() {
    let o = irred(&[
        "ve",
        "--field",
        "x = 1; y = z; z = x*y + 2*y^3",
        "--curve",
        "t; 0; 0",
        "--order",
        "1",
        "--normal",
        "--linearize",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("[0, 1]") && out.contains("[t, 0]"), "{out}");
}

#[test]
fn oracle_reports_small_residuals() {
    let o = irred(&["oracle", "--field", "x = 1; y = z; z = x*y + 2*y^3", "--order", "2", "--curve", "t; 0; 0"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let worst: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("max residual "))
        .and_then(|l| l.split_whitespace().next())
        .and_then(|v| v.parse().ok())
        .expect("residual line");
    assert!(worst < 1e-4, "{out}");
}
