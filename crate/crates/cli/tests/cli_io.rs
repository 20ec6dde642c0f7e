//! Black-box checks of the binary: exit codes, region-file validation
//! messages, schema lines, and seeded reproducibility of CSV output.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polyrellich"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polyrellich-cli-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_region(name: &str, contents: &str) -> PathBuf {
    let path = tmp(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn malformed_region_exits_2_and_names_the_field() {
    let region = write_region(
        "bad.region.json",
        r#"{"dim": 2, "shape": {"type": "ball", "center": [0, 0]}}"#,
    );
    let out = bin()
        .args(["pseudo", "--region"])
        .arg(&region)
        .args(["--out"])
        .arg(tmp("never.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("radius"), "stderr: {stderr}");
}

#[test]
fn unknown_shape_exits_2() {
    let region = write_region(
        "wedge.region.json",
        r#"{"dim": 2, "shape": {"type": "wedge", "angle": 1.0}}"#,
    );
    let out = bin()
        .args(["whitney", "--region"])
        .arg(&region)
        .args(["--out"])
        .arg(tmp("never2.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("wedge"), "stderr: {stderr}");
}

#[test]
fn missing_kernel_constant_exits_2() {
    let region = write_region(
        "iv.region.json",
        r#"{"dim": 1, "shape": {"type": "interval_union", "intervals": [[0.0, 1.0]]}}"#,
    );
    let out = bin()
        .args(["trace", "--region"])
        .arg(&region)
        .args(["--m", "2", "--t", "0.1", "--out"])
        .arg(tmp("never3.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("kernel"), "stderr: {stderr}");
}

#[test]
fn pseudo_output_is_seeded_and_schemaed() {
    let region = write_region(
        "square.region.json",
        r#"{"dim": 2, "shape": {"type": "axis_box", "lower": [0.0, 0.0], "upper": [1.0, 1.0]}}"#,
    );
    let out_a = tmp("pseudo_a.csv");
    let out_b = tmp("pseudo_b.csv");
    for out in [&out_a, &out_b] {
        let status = bin()
            .args(["pseudo", "--region"])
            .arg(&region)
            .args(["--m", "2", "--samples", "200", "--seed", "7", "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "same config and seed must give identical bytes");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# schema: x1,x2,d,a_m,ratio\n"));
    assert_eq!(text.lines().count(), 201);
}

#[test]
fn eig_csv_has_sandwich_columns() {
    let out = tmp("eig6.csv");
    let status = bin()
        .args(["eig", "--m", "2", "--count", "6", "--basis", "200", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# schema: n,lambda,lower,upper,residual\n"));
    assert_eq!(text.lines().count(), 7);
    // Each row: lower <= lambda <= upper.
    for line in text.lines().skip(1) {
        let cells: Vec<f64> = line
            .split(',')
            .skip(1)
            .map(|c| c.parse::<f64>().unwrap())
            .collect();
        assert!(cells[1] <= cells[0] && cells[0] <= cells[2], "{line}");
    }
}

#[test]
fn whitney_emits_json_summary_mirroring_csv() {
    let region = write_region(
        "disk.region.json",
        r#"{"dim": 2, "shape": {"type": "ball", "center": [0.0, 0.0], "radius": 1.0}}"#,
    );
    let out = tmp("whit.csv");
    let status = bin()
        .args(["whitney", "--region"])
        .arg(&region)
        .args(["--level-cap", "5", "--samples", "500", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap())
            .unwrap();
    let cube_count = json["cube_count"].as_u64().unwrap() as usize;
    assert_eq!(csv.lines().count(), cube_count + 1);
    assert_eq!(json["disjoint_ok"], serde_json::Value::Bool(true));
}

#[test]
fn trace_rejects_nonpositive_times() {
    let region = write_region(
        "iv2.region.json",
        r#"{"dim": 1, "shape": {"type": "interval_union", "intervals": [[0.0, 1.0]]}}"#,
    );
    let out = bin()
        .args(["trace", "--region"])
        .arg(&region)
        .args(["--t", "0.0,0.1", "--out"])
        .arg(tmp("never4.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
