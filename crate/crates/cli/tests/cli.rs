use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rotspec::pseudospectra::read_cloud_csv;

fn rotspec(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotspec"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const U_PLUS_2V: &str = r#"{"canonical": {"a+": [1, 0], "a-": [0, 0], "b+": [2, 0], "b-": [0, 0]}}"#;

#[test]
fn expand_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = rotspec(dir.path(), &["expand", "--theta", "surd:(-1+1*sqrt(5))/2", "--terms", "8"]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("expand.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
    assert!(csv.lines().nth(8).unwrap().starts_with("8,1,21,34,"));

    let o = rotspec(dir.path(), &["expand", "--theta", "rational:7/10"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("terminates"));
    let csv = fs::read_to_string(dir.path().join("expand.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[2].starts_with("3,3,7,10,"));

    let o = rotspec(dir.path(), &["expand", "--theta", "decimal:0.5"]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("expand.csv")).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), "1,2,1,2,,,");

    let o = rotspec(dir.path(), &["expand", "--theta", "decimal:1.5"]);
    assert_eq!(code(&o), 3);
    let o = rotspec(dir.path(), &["expand", "--theta", "pi"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn spectrum_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = rotspec(dir.path(), &["spectrum", "--level", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let file = fs::File::open(dir.path().join("cloud.csv")).unwrap();
    let cloud = read_cloud_csv(std::io::BufReader::new(file), "cloud").unwrap();
    assert_eq!(cloud.len(), 13);
    let cert: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["q_pair"], serde_json::json!([5, 8]));
    assert_eq!(cert["mode"], "normal_hausdorff");
    assert!((cert["epsilon_sharp"].as_f64().unwrap() - 21.50).abs() < 0.01);
    let from_json: Vec<(f64, f64)> = cert["cloud"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p[0].as_f64().unwrap(), p[1].as_f64().unwrap()))
        .collect();
    let from_csv: Vec<(f64, f64)> = cloud.points.iter().map(|z| (z.re, z.im)).collect();
    assert_eq!(from_json, from_csv);

    let u_only = r#"{"terms": [{"u": 1, "v": 0, "re": 1.0}]}"#;
    let o = rotspec(dir.path(), &["spectrum", "--spec", u_only, "--level", "4"]);
    assert_eq!(code(&o), 0);
    let cloud = read_cloud_csv(fs::read_to_string(dir.path().join("cloud.csv")).unwrap().as_bytes(), "c").unwrap();
    assert!(cloud.points.iter().all(|z| (z.norm() - 1.0).abs() < 1e-14));

    let o = rotspec(dir.path(), &["spectrum", "--theta", "rational:7/10"]);
    assert_eq!(code(&o), 3);
    let o = rotspec(dir.path(), &["spectrum", "--spec", U_PLUS_2V]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("pseudospectrum"));
    let o = rotspec(dir.path(), &["spectrum", "--spec", "{not json"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn pseudospectrum_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = rotspec(
        dir.path(),
        &["pseudospectrum", "--spec", U_PLUS_2V, "--level", "4", "--resolution", "24", "--format", "csv,json,pgm"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["grid_k3_q3.csv", "grid_k4_q5.csv", "grid_k3_q3.pgm", "grid_k4_q5.pgm", "report.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let csv = fs::read_to_string(dir.path().join("grid_k4_q5.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 24 * 24);
    assert_eq!(csv.lines().next().unwrap(), "re,im,sigma_min");
    let pgm = fs::read(dir.path().join("grid_k4_q5.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n24 24\n65535\n"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["rate_only"], false);
    assert_eq!(report["inclusion"]["strict_violations"].as_array().unwrap().len(), 0);

    let general = r#"{"terms": [{"u": 1, "v": 1, "re": 1.0}, {"u": 0, "v": 1, "re": 2.0}]}"#;
    let o = rotspec(dir.path(), &["pseudospectrum", "--spec", general, "--level", "3", "--resolution", "16"]);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["rate_only"], true);

    assert_eq!(code(&rotspec(dir.path(), &["pseudospectrum", "--epsilon", "0"])), 2);
    assert_eq!(code(&rotspec(dir.path(), &["pseudospectrum", "--epsilon", "-0.5"])), 2);
    assert_eq!(code(&rotspec(dir.path(), &["pseudospectrum", "--region", "1,2,3"])), 2);
}

#[test]
fn butterfly_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = rotspec(dir.path(), &["butterfly", "--q-max", "20"]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("butterfly.csv")).unwrap();
    // Σ_{q ≤ 20} φ(q)·q
    let phi = |q: u64| (1..=q).filter(|&p| (1..=p).rev().find(|d| p % d == 0 && q % d == 0) == Some(1)).count() as u64;
    let want: u64 = (1..=20).map(|q| phi(q) * q).sum();
    assert_eq!(csv.lines().count() as u64, want + 1);
    for line in csv.lines().skip(1) {
        let x: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(x.abs() <= 4.0 + 1e-12);
    }

    let o = rotspec(dir.path(), &["butterfly", "--q-max", "1"]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("butterfly.csv")).unwrap();
    assert_eq!(csv, "p,q,eigenvalue\n0,1,4.0000000000000000e0\n");

    let o = rotspec(dir.path(), &["butterfly", "--q-max", "2"]);
    let csv = fs::read_to_string(dir.path().join("butterfly.csv")).unwrap();
    assert_eq!(code(&o), 0);
    let half: Vec<f64> = csv.lines().filter(|l| l.starts_with("1,2,")).map(|l| l[4..].parse().unwrap()).collect();
    assert_eq!(half.len(), 2);
    assert!((half[0] + 8f64.sqrt()).abs() < 1e-14 && (half[1] - 8f64.sqrt()).abs() < 1e-14);

    assert_eq!(code(&rotspec(dir.path(), &["butterfly", "--spec", U_PLUS_2V])), 3);
    assert_eq!(code(&rotspec(dir.path(), &["butterfly", "--q-max", "50", "--max-q", "10"])), 3);
}

#[test]
fn onesided_and_converge() {
    let dir = tempfile::tempdir().unwrap();
    let o = rotspec(dir.path(), &["onesided", "--denominators", "1,10,100"]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("onesided.csv")).unwrap();
    let radii: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(4).unwrap().parse().unwrap()).collect();
    let c1 = 36.0 * (3.0 * std::f64::consts::PI).sqrt();
    for (r, n) in radii.iter().zip([1.0f64, 10.0, 100.0]) {
        assert!((r - c1 / n.sqrt()).abs() < 1e-9);
    }
    assert!(dir.path().join("onesided_n10.csv").exists());

    let zero = r#"{"canonical": {"a+": [0, 0], "a-": [0, 0], "b+": [0, 0], "b-": [0, 0]}}"#;
    let o = rotspec(dir.path(), &["onesided", "--spec", zero, "--denominators", "5,50"]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("onesided.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(4) == Some("0.0000000000000000e0")));

    let o = rotspec(dir.path(), &["onesided", "--spec", U_PLUS_2V, "--denominators", "6", "--resolution", "12"]);
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("onesided_n6_grid.csv").exists());

    let o = rotspec(dir.path(), &["converge", "--levels", "3..9"]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("converge.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "n,q_n_minus_1,q_n,epsilon_sharp,epsilon_clean,empirical_dH");
    assert_eq!(csv.lines().count(), 8);

    let o = rotspec(dir.path(), &["converge", "--levels", "6..6"]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("converge.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with(",0.0000000000000000e0"));

    assert_eq!(code(&rotspec(dir.path(), &["converge", "--levels", "3..25", "--max-q", "500"])), 3);
    assert_eq!(code(&rotspec(dir.path(), &["converge", "--levels", "nine"])), 2);
}

#[test]
fn config_file_and_usage() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(&config, r#"{"theta": "rational:1/3", "terms": 2, "format": ["csv"]}"#).unwrap();
    let cfg = config.to_str().unwrap();
    let o = rotspec(dir.path(), &["expand", "--config", cfg]);
    assert_eq!(code(&o), 0);
    assert!(!dir.path().join("expand.json").exists());
    let csv = fs::read_to_string(dir.path().join("expand.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("1,3,1,3,"));
    // the flag wins over the file
    let o = rotspec(dir.path(), &["expand", "--config", cfg, "--theta", "rational:2/5"]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("expand.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("1,2,1,2,"));

    fs::write(&config, r#"{"colour": "blue"}"#).unwrap();
    assert_eq!(code(&rotspec(dir.path(), &["expand", "--config", cfg])), 3);
    assert_eq!(code(&rotspec(dir.path(), &["expand", "--jobs", "0"])), 2);
    assert_eq!(code(&rotspec(dir.path(), &["frobnicate"])), 2);
    assert_eq!(code(&rotspec(dir.path(), &["--help"])), 0);
}
