use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use d4qms::commands::{ExactModels, Report, ThermalRow};
use d4qms::manifest::RunManifest;
use d4qms::records::read_records;

fn d4qms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_d4qms")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = d4qms(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exact_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("exact");
    ok(&["exact", "--out", s(&out)]);

    let spectrum = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
    let total: usize = spectrum
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(total, 176);

    let thermal: Vec<ThermalRow> =
        serde_json::from_str(&std::fs::read_to_string(out.join("thermal.json")).unwrap()).unwrap();
    let expected = [
        (1e-7, [0.15909, 0.68182, 0.15909]),
        (0.1, [0.12331, 0.67295, 0.20374]),
        (0.5, [0.04349, 0.49712, 0.45940]),
    ];
    assert_eq!(thermal.len(), 3);
    for (row, (beta, probs)) in thermal.iter().zip(expected) {
        assert_eq!(row.beta, beta);
        for p in &row.plaquettes {
            for (a, b) in p.probs.iter().zip(probs) {
                assert!((a - b).abs() < 1e-4, "beta {beta} {}: {a} vs {b}", p.plaquette);
            }
        }
    }

    let models = ExactModels::load(&out).unwrap();
    assert_eq!(models.models.len(), 15);
    for m in &models.models {
        assert!((m.masses.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert_eq!(m.masses.len(), 1 << m.qubits);
    }
    let gd = |q: usize| {
        models
            .models
            .iter()
            .find(|m| m.qubits == q && m.beta == 0.5)
            .unwrap()
            .grid_dist
    };
    assert!(gd(5) > gd(4) && gd(5) > gd(6));

    let circuits: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("circuits.json")).unwrap()).unwrap();
    assert!(!circuits["trotter_step"].as_array().unwrap().is_empty());
    let manifest = RunManifest::load(&out).unwrap();
    assert!(manifest.complete);
    assert!(manifest.outputs.contains(&"models.json".to_string()));
}

#[test]
fn config_errors_exit_with_code_2() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.cfg");
    let out = d4qms(&["run", "--config", s(&missing), "--out", s(&tmp.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));

    let bad = write_config(tmp.path(), "bad.cfg", "beta = 0.1\nbogus = 3\n");
    let out = d4qms(&["run", "--config", s(&bad), "--out", s(&tmp.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`bogus`"));

    let wide = write_config(tmp.path(), "q8.cfg", "qubits = 8\nsamples = 1\n");
    let out = d4qms(&["run", "--config", s(&wide), "--out", s(&tmp.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("3..=7"));

    assert_eq!(d4qms(&["frobnicate"]).status.code(), Some(2));
}

const SMALL_RUN: &str = "beta = 1e-7\nqubits = 3\nchains = 6\nsamples = 40\ntherm_steps = 10\nseed = 5\n";

#[test]
fn run_is_reproducible_across_workers() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "run.cfg", SMALL_RUN);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let c = tmp.path().join("c");
    ok(&["run", "--config", s(&cfg), "--out", s(&a), "--workers", "1"]);
    ok(&["run", "--config", s(&cfg), "--out", s(&b), "--workers", "1"]);
    ok(&["run", "--config", s(&cfg), "--out", s(&c), "--workers", "4"]);
    let bytes = |d: &Path| std::fs::read(d.join("samples.csv")).unwrap();
    assert_eq!(bytes(&a), bytes(&b));
    assert_eq!(bytes(&a), bytes(&c));

    let records = read_records(&a.join("samples.csv")).unwrap();
    let samples = records.iter().filter(|r| !r.aborted).count();
    assert_eq!(samples, 240);
    let m = RunManifest::load(&a).unwrap();
    assert!(m.complete);
    assert_eq!(m.chains.len(), 6);
    assert_eq!(m.totals().samples, 240);
    assert_eq!(m.totals().aborts as usize, records.len() - samples);

    let d = tmp.path().join("d");
    ok(&["run", "--config", s(&cfg), "--out", s(&d), "--seed", "6"]);
    assert_ne!(bytes(&a), bytes(&d));
}

#[test]
fn exhausted_restart_budget_exits_with_code_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "abort.cfg",
        "beta = 5\nqubits = 3\nsamples = 200\nmax_revert_iters = 1\nmax_restarts = 0\nchains = 2\n",
    );
    let out_dir = tmp.path().join("o");
    let out = d4qms(&["run", "--config", s(&cfg), "--out", s(&out_dir)]);
    assert_eq!(out.status.code(), Some(3));
    let m = RunManifest::load(&out_dir).unwrap();
    assert!(!m.complete);
    assert!(m.error.unwrap().contains("aborted"));
    // the CSV stays readable
    read_records(&out_dir.join("samples.csv")).unwrap();
}

fn analyze(tmp: &Path, run: &Path, exact: &Path, name: &str) -> (Output, PathBuf) {
    let out = tmp.join(name);
    let o = d4qms(&["analyze", "--run", s(run), "--exact", s(exact), "--out", s(&out), "--seed", "1"]);
    (o, out)
}

#[test]
fn analyze_report() {
    let tmp = tempfile::tempdir().unwrap();
    let exact = tmp.path().join("exact");
    ok(&["exact", "--out", s(&exact)]);
    let cfg = write_config(
        tmp.path(),
        "run.cfg",
        "beta = 1e-7\nqubits = 3\nchains = 10\nsamples = 300\ntherm_steps = 20\nseed = 2\nplaquette = left\nretherm_steps = 2\n",
    );
    let run = tmp.path().join("run");
    ok(&["run", "--config", s(&cfg), "--out", s(&run)]);

    let (o, out) = analyze(tmp.path(), &run, &exact, "an1");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out.join("report.json")).unwrap();
    let r: Report = serde_json::from_str(&text).unwrap();
    for d in [r.d_sup.exact_vs_distorted, r.d_sup.exact_vs_qms, r.d_sup.distorted_vs_qms] {
        assert!((0.0..=1.0).contains(&d));
    }
    // near beta = 0 the sampled distribution follows the QPE-distorted prediction
    assert!(r.d_sup.distorted_vs_qms < r.d_sup.exact_vs_qms, "{:?}", r.d_sup);
    assert_eq!(r.samples, 3000);
    assert!((r.histogram.masses.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    let p = r.plaquette.as_ref().unwrap();
    assert_eq!(p.samples, 3000);
    assert!((p.probs.iter().map(|e| e.mean).sum::<f64>() - 1.0).abs() < 1e-12);
    for f in ["histogram.csv", "kde.csv", "cdf.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let kde_rows = std::fs::read_to_string(out.join("kde.csv")).unwrap().lines().count();
    assert_eq!(kde_rows, 513);

    let (_, again) = analyze(tmp.path(), &run, &exact, "an2");
    assert_eq!(text, std::fs::read_to_string(again.join("report.json")).unwrap());
}

#[test]
fn analyze_input_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let exact_cfg = write_config(tmp.path(), "exact.cfg", "exact_qubits = 4\nbetas = 1e-7\n");
    let exact = tmp.path().join("exact");
    ok(&["exact", "--config", s(&exact_cfg), "--out", s(&exact)]);
    let cfg = write_config(tmp.path(), "run.cfg", SMALL_RUN);
    let run = tmp.path().join("run");
    ok(&["run", "--config", s(&cfg), "--out", s(&run)]);

    let (o, _) = analyze(tmp.path(), &run, &exact, "mismatch");
    assert!(!o.status.success());
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("q_e=3") && msg.contains("q_e=4"), "{msg}");

    // keep the header, drop every record
    let samples = run.join("samples.csv");
    let header = std::fs::read_to_string(&samples).unwrap().lines().next().unwrap().to_string();
    std::fs::write(&samples, header + "\n").unwrap();
    let exact3 = tmp.path().join("exact3");
    ok(&["exact", "--out", s(&exact3)]);
    let (o, out) = analyze(tmp.path(), &run, &exact3, "empty");
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("no samples"));
    assert!(!out.join("report.json").exists());
}
