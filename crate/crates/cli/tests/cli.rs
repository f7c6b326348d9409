use std::path::PathBuf;
use std::process::{Command, Output};

fn qsr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsr"))
        .args(args)
        .env_remove("QSR_QUAD_STEPS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qsr-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    let _ = std::fs::remove_file(&p);
    p
}

#[test]
fn phase_examples() {
    let o = qsr(&[
        "phase",
        "--state",
        "phi+:p0=0.3",
        "--eta",
        "pi/2",
        "--delta",
        "pi/4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for key in ["total ", "dynamic ", "geometric "] {
        let line = s.lines().find(|l| l.starts_with(key)).unwrap();
        assert!(line.ends_with("0.000000000000"), "{line}");
    }

    let o = qsr(&[
        "phase",
        "--state",
        "psi+:p0=0.5",
        "--eta",
        "pi",
        "--delta",
        "pi/2",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["geometric"]["angle"].as_f64(), Some(std::f64::consts::PI));
    assert_eq!(v["dynamic_oracle"].as_f64().map(f64::abs), Some(0.0));

    let o = qsr(&[
        "phase",
        "--state",
        "phi+:p0=1",
        "--eta",
        "0",
        "--delta",
        "0",
    ]);
    assert!(stdout(&o).contains("overlap            1.000000000000"));
}

#[test]
fn undefined_phase_exits_zero() {
    let o = qsr(&[
        "phase",
        "--state",
        "phi-:p0=0.4",
        "--eta",
        "3pi",
        "--delta",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("undefined (overlap="));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| qsr(args).status.code();
    assert_eq!(
        code(&[
            "phase",
            "--state",
            "phi+:p0=2",
            "--eta",
            "pi",
            "--delta",
            "0"
        ]),
        Some(2)
    );
    assert_eq!(
        code(&[
            "phase",
            "--state",
            "phi+:p0=0.5",
            "--eta",
            "pix",
            "--delta",
            "0"
        ]),
        Some(2)
    );
    assert_eq!(code(&["nonsense"]), Some(2));
    assert_eq!(
        code(&[
            "phase",
            "--state",
            "phi+:p0=0.5",
            "--eta",
            "pi/2",
            "--delta",
            "pi"
        ]),
        Some(3)
    );
    assert_eq!(code(&["table1", "--delta-points", "1"]), Some(3));
    assert_eq!(
        code(&[
            "table1",
            "--delta-points",
            "8",
            "--output",
            "/nonexistent-dir/x/t.txt"
        ]),
        Some(4)
    );
}

#[test]
fn contract_violation_writes_nothing() {
    let out = scratch("bad.csv");
    let o = qsr(&[
        "sweep",
        "--family",
        "psi",
        "--p0",
        "0.5,1.5",
        "--eta",
        "pi",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn sweep_is_deterministic() {
    let args = |p: &str| {
        vec![
            "sweep".to_string(),
            "--family".into(),
            "psi".into(),
            "--sign".into(),
            "-".into(),
            "--p0".into(),
            "0,0.25,0.5".into(),
            "--eta".into(),
            "pi/2,3pi/2,2.2".into(),
            "--delta-points".into(),
            "33".into(),
            "--engine".into(),
            "both".into(),
            "--output".into(),
            p.into(),
        ]
    };
    let (a, b) = (scratch("a.csv"), scratch("b.csv"));
    for p in [&a, &b] {
        let v = args(p.to_str().unwrap());
        let o = qsr(&v.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(o.status.code(), Some(0));
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    assert!(text.starts_with(
        "family,sign,p0,eta,delta,total,dynamic_oracle,dynamic_printed,geometric,defined,overlap"
    ));
    assert_eq!(text.lines().count(), 1 + 3 * 3 * 2 * 33);
}

#[test]
fn loci_json() {
    let o = qsr(&["loci", "--state", "psi+:p0=0.5", "--eta", "pi/2,2pi"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let first = &v["entries"][0]["loci"][0];
    assert_eq!(first["kind"], "sign-change");
    assert!((first["delta_star"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-9);
    let second = v["entries"][1]["loci"].as_array().unwrap();
    assert!(second.iter().all(|l| l["kind"] == "undefined-touch"));
}

#[test]
fn table1_text() {
    let o = qsr(&["table1", "--delta-points", "96"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("12 of 12 cells reproduced"), "{s}");
    assert!(s.contains("Discrete 0 or pi"));
}

#[test]
fn figure_full_turn_is_blue() {
    let out = scratch("ring.svg");
    let o = qsr(&[
        "figure",
        "--state",
        "psi+:p0=0.5",
        "--eta",
        "2pi",
        "--delta-points",
        "64",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(&out).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains(r#"viewBox="0 0 512 512""#));
    let lines: Vec<&str> = svg
        .lines()
        .filter(|l| l.contains("<line") && l.contains("x1=\"56"))
        .collect();
    assert!(!lines.is_empty());
    let arms: Vec<&str> = svg
        .lines()
        .take_while(|l| !l.contains("</g>"))
        .filter(|l| l.trim_start().starts_with("<line"))
        .collect();
    assert!(arms.iter().all(|l| l.contains("#1f77b4")), "{svg}");
}

#[test]
fn figure_half_turn_has_red_delta_arms() {
    let o = qsr(&[
        "figure",
        "--state",
        "psi+:p0=0.5",
        "--eta",
        "pi",
        "--delta-points",
        "64",
    ]);
    let svg = stdout(&o);
    assert_eq!(
        svg.matches("#d62728").count(),
        2 + 1,
        "two delta arms plus the legend"
    );
}

#[test]
fn verify_csv_and_env_steps() {
    let o = Command::new(env!("CARGO_BIN_EXE_qsr"))
        .args([
            "verify",
            "--family",
            "psi",
            "--p0",
            "1",
            "--eta-grid",
            "3",
            "--delta-grid",
            "3",
        ])
        .env("QSR_QUAD_STEPS", "16")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("16 quadrature steps"), "{s}");
    assert!(s.contains("agrees with the cone-energy sums"));

    let o = qsr(&[
        "verify",
        "--family",
        "phi",
        "--p0",
        "0.3",
        "--eta-grid",
        "2",
        "--delta-grid",
        "3",
        "--format",
        "csv",
    ]);
    let s = stdout(&o);
    assert!(s.starts_with("eq_id,delta,eta,p0,sign,printed,oracle,diff,verdict\n"));
    assert!(s.lines().skip(1).all(|l| l.starts_with("Eq8,")));
}
