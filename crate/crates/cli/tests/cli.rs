use std::fs;
use std::path::Path;
use std::process::Command;

use proptest::prelude::*;
use tripod_memory_cli::output::{read_csv, write_csv, Cell, Table};
use tripod_memory_cli::{parse_config, run_command, CliError, OUT_DIR_ENV};

fn run(dir: &Path, args: &[&str]) -> Result<tripod_memory_cli::Report, CliError> {
    let mut argv = vec!["tripod-memory"];
    argv.extend_from_slice(args);
    argv.extend(["--out", dir.to_str().unwrap()]);
    run_command(argv)
}

fn table(path: &Path) -> Table {
    read_csv(fs::read(path).unwrap().as_slice()).unwrap()
}

#[test]
fn fig5_analytic_has_requested_rows_and_columns() {
    let dir = tempfile::tempdir().unwrap();
    let report = run(dir.path(), &["fig5", "--points", "200", "--engine", "analytic"]).unwrap();
    assert!(report.passed());
    let t = table(&dir.path().join("fig5.csv"));
    assert_eq!(t.columns, ["t_us", "efficiency_uncomp", "efficiency_comp"]);
    assert_eq!(t.rows.len(), 200);
    let ts = t.numbers("t_us").unwrap();
    assert!((ts[0] - 0.38).abs() < 1e-12 && (ts[199] - 100.0).abs() < 1e-12);
    let comp = t.numbers("efficiency_comp").unwrap();
    for (t, e) in ts.iter().zip(&comp) {
        let expected = 0.1 * (-t / 90.0).exp();
        assert!((e - expected).abs() < 1e-12, "t = {t}: {e} vs {expected}");
    }
    assert!(dir.path().join("fig5.gp").exists());
}

#[test]
fn fig4_single_point_reads_full_scale() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["fig4", "--points", "1"]).unwrap();
    let t = table(&dir.path().join("fig4.csv"));
    assert_eq!(t.rows.len(), 1);
    let first = t.numbers("first_read").unwrap()[0];
    assert!((first - 2.0).abs() < 1e-9, "{first}");
    let second = t.numbers("second_read").unwrap()[0];
    assert!(second.abs() < 1e-9);
}

#[test]
fn oracle_check_reports_every_case_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let report = run(dir.path(), &["oracle-check"]).unwrap();
    assert!(report.passed(), "{:?}", report.failures);
    let t = table(&dir.path().join("oracle.csv"));
    assert!(t.rows.len() >= 20);
    let d = t.numbers("discrepancy").unwrap();
    assert!(d.iter().all(|&d| d <= 0.02), "{d:?}");
    let status = t.column("status").unwrap();
    assert!(t.rows.iter().all(|r| r[status] == Cell::from("pass")));
}

#[test]
fn repeated_runs_are_bit_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        run(dir.path(), &["fringe", "--engine", "both", "--points", "8"]).unwrap();
        run(dir.path(), &["fig3", "--engine", "both"]).unwrap();
    }
    for name in ["fringe.csv", "fringe.gp", "fringe_fit.csv", "fig3.csv", "fig3.gp"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
}

#[test]
fn every_file_starts_with_a_reparsable_config_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.toml");
    fs::write(&cfg_path, "[physics]\ndelta_w_pi = 0.25\nb_field_gauss = 0.3\n").unwrap();
    let report = run(dir.path(), &["fig2", "--config", cfg_path.to_str().unwrap()]).unwrap();
    assert_eq!(report.files.len(), 2);
    for f in &report.files {
        let text = fs::read_to_string(f).unwrap();
        assert!(text.starts_with("# tripod-memory "), "{}", f.display());
    }
    let t = table(&dir.path().join("fig2.csv"));
    let body: Vec<&str> = t.comments.iter().skip(2).map(String::as_str).collect();
    let resolved = parse_config(&body.join("\n")).unwrap();
    assert_eq!(resolved.values.delta_w_pi, 0.25);
    assert_eq!(resolved.values.b_field_gauss, Some(0.3));
    assert_eq!(resolved.values.scenario.as_deref(), Some("fig2"));
}

#[test]
fn config_errors_name_line_and_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.toml");
    fs::write(&cfg_path, "[physics]\nlarmor_mhz = 0\n\n[timing]\ntau_ns = -5\n").unwrap();
    let err = run(dir.path(), &["fig2", "--config", cfg_path.to_str().unwrap()]).unwrap_err();
    match err {
        CliError::Config { source, .. } => {
            assert_eq!(source.line, Some(5));
            assert_eq!(source.key.as_deref(), Some("tau_ns"));
        }
        other => panic!("unexpected {other}"),
    }
    fs::write(&cfg_path, "[run]\nsolver = \"fast\"\n").unwrap();
    let err = run(dir.path(), &["fig2", "--config", cfg_path.to_str().unwrap()]).unwrap_err();
    assert!(err.to_string().contains("`solver`"), "{err}");
}

#[test]
fn zero_field_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("still.toml");
    fs::write(&cfg_path, "larmor_mhz = 0\ndelta_r_pi = 0.5\n").unwrap();
    run(dir.path(), &["fig5", "--points", "5", "--config", cfg_path.to_str().unwrap()]).unwrap();
    let t = table(&dir.path().join("fig5.csv"));
    let (u, c) = (t.numbers("efficiency_uncomp").unwrap(), t.numbers("efficiency_comp").unwrap());
    for (u, c) in u.iter().zip(&c) {
        assert!((u - c).abs() < 1e-12);
    }
}

#[test]
fn unwritable_output_directory_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let err = run(&blocker.join("sub"), &["fig2"]).unwrap_err();
    assert!(matches!(err, CliError::Io { .. }), "{err}");
}

#[test]
fn bad_arguments_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["fig6"][..], &["fig2", "--engine", "fast"], &["fig5", "--points", "0"], &["fig2", "--points", "3"]] {
        assert!(matches!(run(dir.path(), args), Err(CliError::Usage(_))), "{args:?}");
    }
}

#[test]
fn engine_disagreement_fails_after_writing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("short.toml");
    fs::write(&cfg_path, "[numeric]\nread_duration_ns = 0.5\nread_ramp_ns = 0.5\n").unwrap();
    let report = run(dir.path(), &["isolation", "--engine", "both", "--config", cfg_path.to_str().unwrap()]);
    let report = report.unwrap();
    assert!(!report.passed());
    assert!(dir.path().join("isolation.csv").exists());
}

#[test]
fn binary_exit_status_and_env_output_dir() {
    let exe = env!("CARGO_BIN_EXE_tripod-memory");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("from-env");
    let status = Command::new(exe).arg("isolation").env(OUT_DIR_ENV, &out).status().unwrap();
    assert!(status.success());
    assert!(out.join("isolation.csv").exists());

    let status = Command::new(exe).arg("fig9").env(OUT_DIR_ENV, &out).output().unwrap().status;
    assert!(!status.success());
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "tau_ns = -5").unwrap();
    let output = Command::new(exe).args(["fig2", "--config"]).arg(&bad).env(OUT_DIR_ENV, &out).output().unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("tau_ns") && stderr.contains("line 1"), "{stderr}");
}

fn cell() -> impl Strategy<Value = Cell> {
    prop_oneof![
        any::<f64>().prop_filter("NaN never compares equal", |x| !x.is_nan()).prop_map(Cell::Num),
        "[a-z ,\"]{0,8}"
            .prop_filter("text must not read as a number", |s| s.parse::<f64>().is_err())
            .prop_map(Cell::Text),
    ]
}

proptest! {
    #[test]
    fn csv_round_trip(
        comments in proptest::collection::vec("[ -~]{0,20}", 0..4),
        width in 1usize..5,
        rows in proptest::collection::vec(proptest::collection::vec(cell(), 5), 0..6),
    ) {
        let columns: Vec<String> = (0..width).map(|k| format!("c{k}")).collect();
        let mut t = Table::new(comments, columns);
        for r in rows {
            t.push(r[..width].to_vec());
        }
        let mut buf = Vec::new();
        write_csv(&mut buf, &t).unwrap();
        prop_assert_eq!(read_csv(buf.as_slice()).unwrap(), t);
    }
}
