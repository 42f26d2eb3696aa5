//! End-to-end checks of the command-line interface: artifacts, provenance,
//! reproducibility, config precedence, and failure modes.

use std::path::Path;
use std::process::{Command, Output};

fn qperc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qperc"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

#[test]
fn walk_dumps_distribution_within_support() {
    let dir = tempfile::tempdir().unwrap();
    let out = qperc(
        &[
            "walk", "--geometry", "square", "--size", "201", "--steps", "100", "--theta",
            "0.7853981634", "--r", "2", "--seed", "7", "--output", "run",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dist = read(&dir.path().join("run.dist.csv"));
    assert!(dist.starts_with("# qperc "));
    let mut rows = 0;
    for line in dist.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let mut cols = line.split(',');
        let x: i64 = cols.next().unwrap().parse().unwrap();
        let y: i64 = cols.next().unwrap().parse().unwrap();
        let prob: f64 = cols.next().unwrap().parse().unwrap();
        if prob > 0.0 {
            assert!(x.abs() <= 100 && (0..=100).contains(&y), "support leak at ({x},{y})");
        }
        rows += 1;
    }
    assert_eq!(rows, 201 * 201);

    let pt = read(&dir.path().join("run.pt.csv"));
    let last = pt.lines().last().unwrap();
    assert!(last.starts_with("100,"));
    // Nothing reaches the boundary of a bond-counted 200 x 200 region in 100
    // steps, so the absorbed probability is still zero.
    let p100: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(p100, 0.0);
}

#[test]
fn walk_requires_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = qperc(&["walk", "--size", "10"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("\"error\""), "stderr: {err}");
}

#[test]
fn analytic_reports_transition_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = qperc(&["analytic", "--size", "50"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("0.9550"), "stdout: {stdout}");
    assert!(stdout.contains("p,zeta_y,zeta_x"));
}

#[test]
fn sweep_is_byte_identical_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let args = |jobs: &'static str, name: &'static str| {
        vec![
            "sweep", "--size", "14", "--p-start", "0.85", "--p-stop", "0.95", "--p-step",
            "0.05", "--trials", "12", "--seed", "99", "--jobs", jobs, "--output", name,
        ]
    };
    let a = qperc(&args("1", "a.csv"), dir.path());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = qperc(&args("4", "b.csv"), dir.path());
    assert!(b.status.success());
    let bytes_a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let bytes_b = std::fs::read(dir.path().join("b.csv")).unwrap();
    // The config echo records the requested job count and output name; the
    // data rows must match byte for byte.
    let data = |bytes: &[u8]| {
        String::from_utf8(bytes.to_vec())
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(data(&bytes_a), data(&bytes_b));

    // Re-running the exact same invocation reproduces the file byte for
    // byte, provenance included.
    let a2 = qperc(&args("1", "a.csv"), dir.path());
    assert!(a2.status.success());
    let bytes_a2 = std::fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(bytes_a, bytes_a2);
}

#[test]
fn config_file_yields_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.json"),
        r#"{ "size": 10, "trials": 5, "p": 0.9, "master_seed": 3 }"#,
    )
    .unwrap();
    let out = qperc(
        &["zeta", "--config", "run.json", "--trials", "7", "--dump-config"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dump: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("dump-config emits JSON");
    assert_eq!(dump["n_x"], 10);
    assert_eq!(dump["trials"], 7);
    assert_eq!(dump["p"], 0.9);
    assert_eq!(dump["master_seed"], 3);
}

#[test]
fn rejects_unknown_geometry_and_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = qperc(&["sweep", "--geometry", "kagome"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"error\""));

    std::fs::write(dir.path().join("bad.json"), r#"{ "sizes": 10 }"#).unwrap();
    let out = qperc(&["sweep", "--config", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"error\""));
}

#[test]
fn pa_prints_transition_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = qperc(
        &[
            "pa", "--size", "10", "--p-start", "0.5", "--p-stop", "1.0", "--p-step", "0.1",
            "--trials", "8", "--seed", "3",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("p_a = "), "stderr: {err}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("p,mean_zeta,stderr,trials"));
}

#[test]
fn compare_emits_annotated_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = qperc(
        &[
            "compare", "--geometry", "honeycomb", "--size", "50", "--p", "0.91", "--trials",
            "6", "--seed", "11",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("p,mean_zeta,stderr,analytic_zeta_y,reference_pa,classical_pc"));
    let data_line = stdout.lines().find(|l| l.starts_with("0.91,")).unwrap();
    assert!(data_line.ends_with(",0.91,0.652"), "line: {data_line}");
}

#[test]
fn sweep_json_format_embeds_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let out = qperc(
        &[
            "sweep", "--size", "10", "--p-start", "0.9", "--p-stop", "1.0", "--p-step", "0.1",
            "--trials", "4", "--seed", "2", "--format", "json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["provenance"]["command"], "sweep");
    assert_eq!(doc["result"]["trials"], 4);
    assert!(doc["result"]["mean_zeta"].is_array());
}
