//! End-to-end exercises of the binary: exit-code contract, file formats,
//! error messages with line numbers, and byte determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_decolemma"))
}

fn write_ones(path: &Path, count: usize) {
    let mut text = String::from("# constant function\n");
    for _ in 0..count {
        text.push_str("1.0\n");
    }
    fs::write(path, text).unwrap();
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn sum_emits_decaying_curve() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.csv");
    let output = dir.path().join("curve.csv");
    write_ones(&input, 1001);
    let out = bin()
        .args(["sum", "--input"])
        .arg(&input)
        .args(["--output"])
        .arg(&output)
        .args(["--t-min", "1", "--t-max", "3141.592653589793", "--t-samples", "512", "--log-times"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let text = fs::read_to_string(&output).unwrap();
    let mut rows = 0;
    for line in text.lines() {
        if line.starts_with('#') || line.starts_with("t,") {
            continue;
        }
        let fields: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(fields.len(), 4);
        let (t, abs) = (fields[0], fields[3]);
        if t > 10.0 * std::f64::consts::PI {
            assert!(abs <= 0.1 + 1e-12, "curve not below 0.1 at t = {t}: {abs}");
        }
        rows += 1;
    }
    assert_eq!(rows, 512);
}

#[test]
fn sum_degenerate_range_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.csv");
    write_ones(&input, 5);
    let out = bin()
        .args(["sum", "--input"])
        .arg(&input)
        .args(["--t-min", "0", "--t-max", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let data: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("t,"))
        .collect();
    assert_eq!(data.len(), 1);
    // abs at t=0 is (1/N)|sum f| = 5/4.
    let abs: f64 = data[0].split(',').nth(3).unwrap().parse().unwrap();
    assert!((abs - 1.25).abs() < 1e-12);
}

#[test]
fn sum_rejects_empty_and_missing_input() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "# nothing here\n").unwrap();
    let out = bin()
        .args(["sum", "--input"])
        .arg(&empty)
        .args(["--t-max", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["sum", "--input", "/nonexistent/f.csv", "--t-max", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_input_reports_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    fs::write(&input, "1.0\n2.0\nnot-a-number\n").unwrap();
    let out = bin()
        .args(["sum", "--input"])
        .arg(&input)
        .args(["--t-max", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":3:"), "missing line number in: {err}");
}

#[test]
fn analyze_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // Gaussian on 1024 points: decoheres, exit 0.
    let gaussian = dir.path().join("gaussian.csv");
    let mut text = String::new();
    for i in 0..=1023 {
        let x = i as f64 / 1023.0;
        text.push_str(&format!("{}\n", (-(x - 0.5f64).powi(2) / 0.125).exp()));
    }
    fs::write(&gaussian, text).unwrap();
    let out = bin().args(["analyze", "--input"]).arg(&gaussian).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = stdout(&out);
    assert!(report.contains("status: decoheres"));
    assert!(report.contains("g: 32"));
    assert!(report.contains("p: 31"));

    // Alternating signs: not in the admissible class, exit 3.
    let alternating = dir.path().join("alt.csv");
    let mut text = String::new();
    for i in 0..=1023 {
        text.push_str(if i % 2 == 0 { "1\n" } else { "-1\n" });
    }
    fs::write(&alternating, text).unwrap();
    let out = bin().args(["analyze", "--input"]).arg(&alternating).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("reason: not-in-l1-class"));

    // Nine points (N = 8) with default kappa = 10: empty window, exit 3.
    let tiny = dir.path().join("tiny.csv");
    write_ones(&tiny, 9);
    let out = bin().args(["analyze", "--input"]).arg(&tiny).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("reason: window-empty"));

    // Sign-alternating square wave: admissible partition but the bound is
    // blown inside the window, exit 4.
    let square = dir.path().join("square.csv");
    let mut text = String::new();
    for i in 0..=1023 {
        text.push_str(if (i / 64) % 2 == 0 { "1\n" } else { "-1\n" });
    }
    fs::write(&square, text).unwrap();
    let out = bin().args(["analyze", "--input"]).arg(&square).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).contains("reason: bound-exceeded"));
}

#[test]
fn pairs_commensurate_and_figure_tail() {
    // t = 2 pi: every pair is offset by 8, points 9..16 lack partners.
    let out = bin().args(["pairs", "--n", "16", "--t", "6.283185307179586"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("0,0.0000000000000000e0,1.0000000000000000e0,8,"));
    assert!(text.contains("uncancelled: 9,10,11,12,13,14,15,16"));

    // t = 4 pi: the four last points are the uncancelled tail.
    let out = bin().args(["pairs", "--n", "16", "--t", "12.566370614359172"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("uncancelled: 13,14,15,16"));

    // Nonpositive time is an input error.
    let out = bin().args(["pairs", "--n", "16", "--t", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["pairs", "--n", "16", "--t", "-2.0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn model_generator_exit_codes() {
    let out = bin().args(["model", "--generate", "diagonal", "--levels", "64"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("status: decoheres"));
    assert!(text.contains("off_diagonal_mass: 0.0000000000000000e0"));

    let out = bin().args(["model", "--generate", "two-level"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));

    let out = bin().args(["model", "--generate", "no-such-generator"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn model_evolve_writes_oscillation_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("evolution.csv");
    let out = bin()
        .args(["model", "--generate", "two-level", "--evolve", "--t-max", "12.566370614359172"])
        .args(["--evolve-samples", "256", "--output"])
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut max_dev = 0.0f64;
    for line in text.lines() {
        if line.starts_with('#') || line.starts_with("t_phys") {
            continue;
        }
        let dev: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        max_dev = max_dev.max(dev);
    }
    // cos(t) oscillates at full amplitude.
    assert!(max_dev > 0.99, "max deviation {max_dev}");

    // --evolve without --output is an input error.
    let out = bin()
        .args(["model", "--generate", "two-level", "--evolve", "--t-max", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn model_file_ingestion() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.txt");
    fs::write(
        &path,
        "# two-level test model\n\
         hbar: 1.0\n\
         energies:\n0.0\n1.0\n\
         rho:\n0.5,0,0.5,0\n0.5,0,0.5,0\n\
         observable:\n0,0,1,0\n1,0,0,0\n",
    )
    .unwrap();
    let out = bin().args(["model", "--input"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("levels: 2"));
    assert!(text.contains("reason: spectrum-too-small"));

    // Malformed matrix row: line-numbered complaint, exit 2.
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "energies:\n0.0\n1.0\nrho:\n0.5,0,0.5\n").unwrap();
    let out = bin().args(["model", "--input"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":5:"));
}

#[test]
fn dft_canonical_matches_sum_values() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.csv");
    let mut text = String::new();
    for i in 0..=127 {
        text.push_str(&format!("{},{}\n", (i as f64 * 0.3).sin(), (i as f64 * 0.7).cos()));
    }
    fs::write(&input, text).unwrap();
    let out = bin().args(["dft", "--input"]).arg(&input).arg("--canonical").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<String> = stdout(&out)
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("t,"))
        .map(String::from)
        .collect();
    assert_eq!(rows.len(), 128);

    // Missing range without --canonical is an input error.
    let out = bin().args(["dft", "--input"]).arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn outputs_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        bin()
            .args(["model", "--generate", "gaussian-offdiag", "--levels", "51", "--seed", "9"])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let input = dir.path().join("f.csv");
    write_ones(&input, 101);
    let run_sum = |path: &Path| {
        bin()
            .args(["sum", "--input"])
            .arg(&input)
            .args(["--output"])
            .arg(path)
            .args(["--t-min", "1", "--t-max", "100", "--t-samples", "64", "--log-times"])
            .output()
            .unwrap()
    };
    let f1 = dir.path().join("a.csv");
    let f2 = dir.path().join("b.csv");
    assert_eq!(run_sum(&f1).status.code(), Some(0));
    assert_eq!(run_sum(&f2).status.code(), Some(0));
    assert_eq!(fs::read(&f1).unwrap(), fs::read(&f2).unwrap());
}

#[test]
fn thread_cap_env_var() {
    let out = bin()
        .env("DECOLEMMA_THREADS", "2")
        .args(["model", "--generate", "diagonal", "--levels", "32"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    let out = bin()
        .env("DECOLEMMA_THREADS", "zero")
        .args(["model", "--generate", "diagonal", "--levels", "32"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
