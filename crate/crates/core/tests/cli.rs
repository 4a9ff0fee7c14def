//! Binary-level tests: exit codes, output formats, byte stability.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_godel-geo"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn verify_geometry_passes_and_exits_zero() {
    let out = run(&[
        "verify-geometry",
        "--profile",
        "class1(m=1.414,omega=1)",
        "--r",
        "0.5:2:16",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[PASS]"));
    assert!(!text.contains("[FAIL]"));
}

#[test]
fn bad_grammar_exits_two() {
    let out = run(&["verify-geometry", "--profile", "class9(m=1)", "--r", "0.5:2:8"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify-geometry", "--profile", "class1(m=1)", "--r", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn trivial_profile_rejected_with_message() {
    let out = run(&[
        "verify-geometry",
        "--profile",
        "custom(H=\"0\",D=\"1\")",
        "--r",
        "0.5:2:8",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("excluded trivial case"));
}

#[test]
fn certify_catalog_json_is_byte_stable() {
    let args = [
        "certify-catalog",
        "--profile",
        "class2(omega=1)",
        "--r",
        "0.9:1.5:6",
        "--grid-n",
        "3",
        "--seed",
        "7",
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout, "reports must be byte-stable for a fixed seed and config");
    let text = String::from_utf8_lossy(&a.stdout);
    assert!(text.contains("\"adjudications\""));
    assert!(text.contains("beta-form"));
}

#[test]
fn entries_filter_prefix_and_applicability_notes() {
    // PAR-3 needs a rotation constant; on a non-homogeneous custom profile
    // the entry is reported as not applicable and the run continues
    let out = run(&[
        "certify-catalog",
        "--profile",
        "custom(H=\"sin(r)\",D=\"2+0.5*sin(r)\")",
        "--r",
        "0.6:1.4:6",
        "--grid-n",
        "3",
        "--entries",
        "PAR-3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("not applicable"));
    assert!(text.contains("PAR-3"));
}

#[test]
fn scan_emits_csv_with_error_column() {
    let out = run(&[
        "scan",
        "--profile",
        "class2(omega=1)",
        "--r",
        "0.8:1.6:6",
        "--grid-n",
        "3",
        "--param",
        "c",
        "--range",
        "0.5:1.5:3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "entry,param,value,max_h,max_nabla_h,max_rm,tr_h_abs,tr_h_variation,mean_curvature,pass,error"
    );
    assert_eq!(text.lines().count(), 4); // header + 3 points
    // decimal points, not locale commas, in numeric fields
    assert!(text.contains("PAR-1,c,5.000000000e-1"));
}

#[test]
fn parallel_scan_is_deterministic() {
    // profile-level sweep across the limiting case, four workers: rows
    // must come back in parameter order and byte-identical across runs
    let args = [
        "scan",
        "--profile",
        "class1(m=1,omega=1)",
        "--r",
        "0.9:1.5:6",
        "--grid-n",
        "3",
        "--param",
        "omega",
        "--range",
        "0.4:0.6:3",
        "--jobs",
        "4",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8_lossy(&a.stdout);
    // omega = 0.5 hits the limiting case m^2 = 4 omega^2: the ruled and
    // product-decomposition entries must appear exactly there
    assert!(text.contains("TG-cT,omega,5.000000000e-1"));
    assert!(text.contains("VI-E2,omega,5.000000000e-1"));
    assert!(!text.contains("TG-cT,omega,4.000000000e-1"));
    // values ordered by parameter index
    let pos4 = text.find("omega,4.0").unwrap();
    let pos5 = text.find("omega,5.0").unwrap();
    let pos6 = text.find("omega,6.0").unwrap();
    assert!(pos4 < pos5 && pos5 < pos6);
}

#[test]
fn scan_empty_selection_is_header_only() {
    let out = run(&[
        "scan",
        "--profile",
        "class2(omega=1)",
        "--r",
        "0.8:1.6:6",
        "--param",
        "c",
        "--range",
        "0.9:1.1:2",
        "--entries",
        "NO-SUCH-ENTRY",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 1);
}

#[test]
fn classify_normal_cases() {
    let out = run(&[
        "classify-normal",
        "--profile",
        "class1(m=1.414,omega=1)",
        "--r",
        "0.6:1.4:10",
        "--coeffs",
        "0,0,0,1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("case I"));

    // non-unit tuple rejected
    let out = run(&[
        "classify-normal",
        "--profile",
        "class1(m=1.414,omega=1)",
        "--r",
        "0.6:1.4:10",
        "--coeffs",
        "0.5,0,0,0",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // valid unit tuple violating every case: exit 1 with the residual shown
    let out = run(&[
        "classify-normal",
        "--profile",
        "class1(m=1.414,omega=1)",
        "--r",
        "0.6:1.4:10",
        "--coeffs",
        "1.2,0,0.663,0",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("no case matched"));
}

#[test]
fn config_file_defaults_with_cli_override() {
    let dir = std::env::temp_dir().join(format!("godel-geo-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("cfg.json");
    std::fs::write(
        &cfg_path,
        r#"{"profile": "class2(omega=1)", "r": "0.8:1.6:6", "grid_n": 3, "seed": 5}"#,
    )
    .unwrap();
    let out = run(&[
        "verify-geometry",
        "--config",
        cfg_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("seed 5"));

    // command line wins over the file
    let out = run(&[
        "verify-geometry",
        "--config",
        cfg_path.to_str().unwrap(),
        "--seed",
        "9",
    ]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("seed 9"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn out_file_and_tol_scale_env() {
    let dir = std::env::temp_dir().join(format!("godel-geo-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("report.json");
    let out = Command::new(env!("CARGO_BIN_EXE_godel-geo"))
        .args([
            "verify-geometry",
            "--profile",
            "class2(omega=1)",
            "--r",
            "0.8:1.6:6",
            "--format",
            "json",
            "--out",
            out_path.to_str().unwrap(),
        ])
        .env("GODEL_GEO_TOL_SCALE", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.contains("\"tol_scale\": 10.0"));
    std::fs::remove_dir_all(&dir).ok();
}
