use std::path::Path;
use std::process::{Command, Output};

fn axiflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_axiflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn evolve_writes_series_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = axiflow(&[
        "evolve",
        "--J",
        "32",
        "--dt",
        "1e-3",
        "--T",
        "0.05",
        "--initial",
        "torus:r=0.5",
        "--scheme",
        "q",
        "--snapshot-every",
        "10",
        "--out",
        path(dir.path()),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("0 violations"));
    let series = std::fs::read_to_string(dir.path().join("timeseries.csv")).unwrap();
    assert_eq!(series.lines().count(), 1 + 51);
    assert!(dir.path().join("final.csv").exists());
    assert!(dir.path().join("snapshot_00000010.csv").exists());
}

#[test]
fn snapshot_feeds_goodness_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = axiflow(&["angenent", "--J", "128", "--out", path(dir.path())]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("F      = 1.85"));
    let curve = dir.path().join("angenent.csv");

    let out = axiflow(&["goodness", "--curve", path(&curve)]);
    assert!(out.status.success());
    let text = stdout(&out);
    let g: f64 = text
        .lines()
        .next()
        .unwrap()
        .trim_start_matches("G = ")
        .parse()
        .unwrap();
    assert!(g < 1e-10, "{text}");
    assert!(
        text.contains("alpha = 1.0") || text.contains("alpha = 0.99"),
        "{text}"
    );

    let obj = dir.path().join("torus.obj");
    let out = axiflow(&[
        "export-surface",
        "--curve",
        path(&curve),
        "--n-phi",
        "16",
        "--out",
        path(&obj),
    ]);
    assert!(out.status.success());
    let mesh = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(
        mesh.lines().filter(|l| l.starts_with("v ")).count(),
        128 * 16
    );
    assert_eq!(
        mesh.lines().filter(|l| l.starts_with("f ")).count(),
        2 * 128 * 16
    );
}

#[test]
fn converge_prints_and_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = axiflow(&[
        "converge",
        "--scheme",
        "p",
        "--J",
        "16,32",
        "--out",
        path(dir.path()),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().nth(1).unwrap().starts_with("16,"));
}

#[test]
fn bisect_writes_candidates() {
    let dir = tempfile::tempdir().unwrap();
    let out = axiflow(&[
        "bisect-r0",
        "--J",
        "64",
        "--dt",
        "5e-4",
        "--tol",
        "5e-2",
        "--out",
        path(dir.path()),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("critical radius in ["));
    let csv = std::fs::read_to_string(dir.path().join("bisection.csv")).unwrap();
    assert!(csv.starts_with("r,verdict,t\n"));
    assert!(csv.lines().count() >= 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // invalid parameters
    let bad = [
        vec![
            "evolve",
            "--J",
            "2",
            "--dt",
            "1e-3",
            "--T",
            "0.1",
            "--initial",
            "sphere",
            "--out",
            path(dir.path()),
        ],
        vec![
            "evolve",
            "--J",
            "32",
            "--dt",
            "-1",
            "--T",
            "0.1",
            "--initial",
            "sphere",
            "--out",
            path(dir.path()),
        ],
        vec![
            "evolve",
            "--J",
            "32",
            "--dt",
            "1e-3",
            "--T",
            "0.1",
            "--initial",
            "cube",
            "--out",
            path(dir.path()),
        ],
        vec!["bisect-r0", "--J", "64", "--bracket", "0.2,0.3"],
        vec!["goodness", "--curve", "/nonexistent/curve.csv"],
        vec!["angenent", "--J", "16", "--init-circle", "1,0.5"],
    ];
    for args in bad {
        let out = axiflow(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
    // Newton cannot reach a self-shrinker from a small far-away circle
    let out = axiflow(&["angenent", "--J", "16", "--init-circle", "0.1,5"]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
