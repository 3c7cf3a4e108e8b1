//! End-to-end tests of the `gardner-espline` binary: exit codes, file
//! formats, determinism, and the numbers the runs are expected to hit.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gardner-espline"))
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.cfg");
    fs::write(&path, text).unwrap();
    path
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Parses a CSV document into (header, data cells).
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .expect("csv has a header row")
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn cell(row: &[String], idx: usize) -> f64 {
    row[idx].parse().unwrap()
}

const EX1_CONFIG: &str = "experiment = example1\nN = 100\nt_end = 5\n\
                          report_times = 0, 2.5, 5\noutput_dir = out\n";

#[test]
fn run_on_the_pulse_matches_the_reference_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), EX1_CONFIG);
    let out = bin().current_dir(dir.path()).arg("run").arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));

    let errors = fs::read_to_string(dir.path().join("out/errors.csv")).unwrap();
    let (header, rows) = parse_csv(&errors);
    assert_eq!(header, ["t", "linf", "argmax_x"]);
    assert_eq!(rows.len(), 3);
    let final_linf = cell(rows.last().unwrap(), 1);
    let reference = 2.1665e-4;
    assert!(
        (final_linf - reference).abs() <= 0.05 * reference,
        "final linf {final_linf:e} not within 5% of {reference:e}"
    );

    let conservation = fs::read_to_string(dir.path().join("out/conservation.csv")).unwrap();
    let (header, rows) = parse_csv(&conservation);
    assert_eq!(header, ["t", "M", "E", "H", "C_M", "C_E", "C_H"]);
    assert_eq!(rows.len(), 3);
    // drifts vanish at the baseline and stay small at the end
    for idx in 4..7 {
        assert_eq!(cell(&rows[0], idx), 0.0);
        assert!(cell(&rows[2], idx) < 1e-4);
    }

    // default snapshot times are 0 and t_end; 50 x-units at density 5
    let snapshots = fs::read_to_string(dir.path().join("out/snapshots.csv")).unwrap();
    let (header, rows) = parse_csv(&snapshots);
    assert_eq!(header, ["t", "x", "u", "v"]);
    assert_eq!(rows.len(), 2 * 251);

    let summary = fs::read_to_string(dir.path().join("out/run_summary.txt")).unwrap();
    assert!(summary.contains("status = ok"), "{summary}");
    assert!(summary.contains("steps = 50"), "{summary}");
    assert!(stdout_of(&out).contains("final linf"), "{}", stdout_of(&out));
}

#[test]
fn reruns_are_byte_identical() {
    let mut outputs: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
    for _ in 0..2 {
        let dir = TempDir::new().unwrap();
        let cfg = write_config(dir.path(), EX1_CONFIG);
        let out = bin().current_dir(dir.path()).arg("run").arg(&cfg).output().unwrap();
        assert!(out.status.success(), "{}", stderr_of(&out));
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir.path().join("out"))
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        outputs.push(files);
    }
    assert_eq!(
        outputs[0].len(),
        4,
        "expected snapshots, conservation, errors, and the summary"
    );
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn zero_horizon_writes_only_initial_records() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "experiment = example1\nN = 100\nt_end = 0\noutput_dir = out\n",
    );
    let out = bin().current_dir(dir.path()).arg("run").arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));

    for (file, expected_rows) in [
        ("errors.csv", 1),
        ("conservation.csv", 1),
        ("snapshots.csv", 251),
    ] {
        let text = fs::read_to_string(dir.path().join("out").join(file)).unwrap();
        let (_, rows) = parse_csv(&text);
        assert_eq!(rows.len(), expected_rows, "{file}");
        for row in &rows {
            assert_eq!(cell(row, 0), 0.0, "{file} must only hold t = 0");
        }
    }
    let summary = fs::read_to_string(dir.path().join("out/run_summary.txt")).unwrap();
    assert!(summary.contains("steps = 0"), "{summary}");
}

#[test]
fn a_custom_profile_runs_without_a_reference_solution() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "experiment = custom\nN = 100\nt_end = 1\noutput_dir = out\n\
         custom.domain = -20, 30\ncustom.mu1 = 4\ncustom.mu2 = -3\ncustom.mu3 = 1\n\
         custom.initial = 0.5*sech(0.25*x)^2\n",
    );
    let out = bin().current_dir(dir.path()).arg("run").arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));

    assert!(!dir.path().join("out/errors.csv").exists());
    let conservation = fs::read_to_string(dir.path().join("out/conservation.csv")).unwrap();
    let (_, rows) = parse_csv(&conservation);
    assert_eq!(rows.len(), 2);
    let snapshots = fs::read_to_string(dir.path().join("out/snapshots.csv")).unwrap();
    let (_, rows) = parse_csv(&snapshots);
    for row in &rows {
        assert!(cell(row, 2).is_finite() && cell(row, 3).is_finite());
    }
}

#[test]
fn invalid_element_count_exits_one_naming_the_key() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "experiment = example1\nN = -5\nt_end = 5\n");
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr_of(&out);
    assert!(msg.contains("`N`") && msg.contains("line 2"), "{msg}");
}

#[test]
fn unknown_keys_exit_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "experiment = example1\nN = 100\nt_end = 5\nmystery = 1\n",
    );
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr_of(&out);
    assert!(msg.contains("`mystery`") && msg.contains("line 4"), "{msg}");
}

#[test]
fn unknown_table_id_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = bin()
        .arg("table")
        .arg("T9")
        .arg("--out")
        .arg(dir.path().join("t9.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr_of(&out);
    assert!(msg.contains("T9") && msg.contains("T2"), "{msg}");
}

#[test]
fn help_exits_zero() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("stability"));
}

#[test]
fn table_t6_reproduces_the_reference_columns() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("t6.csv");
    let out = bin().arg("table").arg("T6").arg("--out").arg(&path).output().unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));

    let text = fs::read_to_string(&path).unwrap();
    let (header, rows) = parse_csv(&text);
    assert_eq!(header[0], "t");
    assert_eq!(*header.last().unwrap(), "status");
    assert_eq!(rows.len(), 3);
    let ref_c_m = [1.2040e-6, 3.6819e-6, 8.9144e-6];
    for (row, (t, rcm)) in rows.iter().zip([5.0, 10.0, 15.0].into_iter().zip(ref_c_m)) {
        assert_eq!(row.last().unwrap(), "ok");
        assert_eq!(cell(row, 0), t);
        // invariants of the initial state agree with the bundled references
        assert!((cell(row, 1) - 5.2255).abs() < 1e-3 * 5.2255);
        assert!((cell(row, 2) - 1.5033).abs() < 1e-3 * 1.5033);
        assert!((cell(row, 3) - 1.5994).abs() < 1e-3 * 1.5994);
        // the reference column holds exactly the bundled value
        assert_eq!(cell(row, 10), rcm);
        // the measured mass drift is small at every report time
        assert!(cell(row, 4) < 1e-4);
    }
}

#[test]
fn scan_prefers_the_flat_limit_and_reports_every_point() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), EX1_CONFIG);
    let out = bin()
        .current_dir(dir.path())
        .arg("scan")
        .arg(&cfg)
        .args(["--zeta-min", "1e-6", "--zeta-max", "1", "--points", "3", "--log-spaced"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(
        stdout_of(&out).contains("best zeta = 1.00000000e-6"),
        "{}",
        stdout_of(&out)
    );

    let text = fs::read_to_string(dir.path().join("out/scan.csv")).unwrap();
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, ["zeta", "linf", "status"]);
    assert_eq!(rows.len(), 3);
    for row in &rows {
        assert_eq!(row[2], "ok");
    }
    // the flat near-cubic limit beats zeta = 1 on this problem
    assert!(cell(&rows[0], 1) < cell(&rows[2], 1));
}

#[test]
fn scan_without_a_reference_solution_fails_cleanly() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "experiment = example3\nN = 100\nt_end = 1\noutput_dir = out\n",
    );
    let out = bin()
        .current_dir(dir.path())
        .arg("scan")
        .arg(&cfg)
        .args(["--zeta-min", "0.5", "--zeta-max", "1.5", "--points", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("no analytical solution"), "{}", stderr_of(&out));
}

#[test]
fn stability_sweep_stays_on_the_unit_disk() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), EX1_CONFIG);
    let out = bin()
        .current_dir(dir.path())
        .arg("stability")
        .arg(&cfg)
        .args(["--phases", "16"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));

    let text = fs::read_to_string(dir.path().join("out/stability.csv")).unwrap();
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, ["phase", "rho_momentum", "rho_constraint", "epsilon"]);
    assert_eq!(rows.len(), 17);
    for row in &rows {
        assert!(cell(row, 1) <= 1.0 + 1e-12);
        assert!(cell(row, 2) <= 1.0 + 1e-12);
    }
    assert!(stdout_of(&out).contains("max modulus"), "{}", stdout_of(&out));
}
