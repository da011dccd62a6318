use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pthamil_cli::batch::{batch_exit_code, run_batch, BatchEntry};
use pthamil_cli::config::{BuiltinModel, InputSource, OperatorSpec};
use pthamil_cli::report::Section;
use pthamil_cli::{run_analyze, AnalysisConfig, AnalysisReport, CliError};
use pthamil_core::spectra::SpectrumKind;
use pthamil_core::{c64, ComplexMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn pthamil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pthamil"))
        .args(args)
        .env_remove("PTHAMIL_TOL")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn random_real_file(dir: &Path, name: &str, rng: &mut ChaCha8Rng, n: usize) -> PathBuf {
    let data = (0..n * n).map(|_| c64(StandardNormal.sample(rng), 0.0)).collect();
    write(dir, name, &ComplexMatrix::from_vec(n, data).unwrap().to_json_string())
}

fn builtin(model: BuiltinModel) -> AnalysisConfig {
    AnalysisConfig::new(InputSource::Builtin(model))
}

#[test]
fn json_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut configs = vec![
        builtin(BuiltinModel::TwoLevel { alpha: 5.0, beta: 3.0 }),
        builtin(BuiltinModel::TwoLevel { alpha: 3.0, beta: 5.0 }),
        builtin(BuiltinModel::FockX { dim: 7 }),
    ];
    for cfg in configs.iter_mut().take(2) {
        cfg.parity = Some(OperatorSpec::parse("sigma1"));
    }
    for k in 0..5 {
        let path = random_real_file(dir.path(), &format!("h{k}.json"), &mut rng, 2 + k);
        configs.push(AnalysisConfig::new(InputSource::File(path)));
    }
    for cfg in &configs {
        let report = run_analyze(cfg).unwrap();
        let parsed = AnalysisReport::from_json(&report.to_json()).unwrap();
        assert_eq!(parsed, report, "{:?}", cfg.input);
    }
}

#[test]
fn binary_json_output_parses_back() {
    let out = pthamil(&[
        "analyze",
        "--model",
        "two-level",
        "--alpha",
        "5",
        "--beta",
        "3",
        "--p",
        "sigma1",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let report = AnalysisReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(report.spectrum.kind, SpectrumKind::AllReal);
    assert!(report.gram.flags.vnorm_identity);
    let pv = &report.pv.done().unwrap().matrix;
    assert!(report.c.done().unwrap().matrix.approx_eq(pv, 1e-12));
    assert_eq!(
        report.diagnostic.done().unwrap().verdict,
        pthamil_core::cpt::Diagnostic::RealSpectrum
    );
}

#[test]
fn complex_phase_report() {
    let out = pthamil(&[
        "analyze",
        "--model",
        "two-level",
        "--alpha",
        "3",
        "--beta",
        "5",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let report = AnalysisReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(report.spectrum.pairs, vec![(0, 1)]);
    assert!(report.metric.hermitian && !report.metric.positive_definite);
    assert!(matches!(report.pv, Section::Skipped { .. }));
    assert_eq!(
        report.diagnostic.done().unwrap().verdict,
        pthamil_core::cpt::Diagnostic::ComplexPairs
    );
    assert!(report.pair_completeness.done().unwrap().passed);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unpaired = write(dir.path(), "unpaired.json", r#"[[1, 0], [0, "2+i"]]"#);
    let jordan = write(dir.path(), "jordan.csv", "0,4\n0,0\n");
    let garbage = write(dir.path(), "garbage.json", "{not json");
    let ok = write(dir.path(), "ok.csv", "1,2\n0.5,1\n");
    let cases: [(&[&str], i32); 9] = [
        (&["analyze", "--file", ok.to_str().unwrap()], 0),
        (&["analyze", "--file", unpaired.to_str().unwrap()], 3),
        (&["analyze", "--file", jordan.to_str().unwrap()], 4),
        (&["analyze", "--file", garbage.to_str().unwrap()], 2),
        (&["analyze", "--file", "/definitely/missing.json"], 2),
        (&["analyze", "--model", "two-level", "--tol", "-1"], 2),
        (&["analyze", "--bogus-flag"], 2),
        (&["two-level", "--alpha", "2", "--beta", "2"], 4),
        (&["evolve", "--model", "two-level", "--state", "1,2,3"], 2),
    ];
    for (args, expected) in cases {
        let out = pthamil(args);
        assert_eq!(
            code(&out),
            expected,
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let out = pthamil(&["analyze", "--file", unpaired.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no antilinear symmetry"));
}

#[test]
fn tolerance_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_pthamil"))
        .args(["analyze", "--model", "fock-x", "--dim", "4", "--format", "json"])
        .env("PTHAMIL_TOL", "1e-7")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let report = AnalysisReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(report.provenance.config.tol, 1e-7);
    assert_eq!(report.spectrum.condition.threshold, 1e7);

    let bad = Command::new(env!("CARGO_BIN_EXE_pthamil"))
        .args(["analyze", "--model", "fock-x"])
        .env("PTHAMIL_TOL", "soon")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn batch_keeps_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let paths: Vec<PathBuf> = (0..24)
        .map(|k| random_real_file(dir.path(), &format!("h{k:02}.json"), &mut rng, 2 + k % 5))
        .collect();
    let base = AnalysisConfig::new(InputSource::File(PathBuf::new()));
    let parallel = run_batch(&paths, &base, Some(4)).unwrap();
    let serial = run_batch(&paths, &base, Some(1)).unwrap();
    assert_eq!(parallel, serial);
    for (entry, path) in parallel.iter().zip(&paths) {
        assert_eq!(&entry.path, path);
        let report = entry.report().expect("valid file");
        assert_eq!(report.provenance.config.input, InputSource::File(path.clone()));
    }
}

#[test]
fn batch_collects_errors_per_file() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "a.csv", "0,8\n2,0\n");
    let bad = write(dir.path(), "b.csv", "1,0\n0,2+i\n");
    let also_good = write(dir.path(), "c.csv", "2,0\n0,1\n");
    let mut base = AnalysisConfig::new(InputSource::File(PathBuf::new()));
    base.format = pthamil_cli::OutputFormat::Json;
    let entries = run_batch(&[good.clone(), bad.clone(), also_good.clone()], &base, None).unwrap();
    assert_eq!(entries.len(), 3);
    assert!(entries[0].report().is_some());
    assert!(matches!(
        entries[1].error(),
        Some(CliError::NoAntilinearSymmetry { .. })
    ));
    assert!(entries[2].report().is_some());
    assert_eq!(batch_exit_code(&entries), 3);

    let out = pthamil(&[
        "batch",
        good.to_str().unwrap(),
        bad.to_str().unwrap(),
        also_good.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 3);
    let parsed: Vec<BatchEntry> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed, entries);
}

#[test]
fn empty_batch_succeeds_with_no_output() {
    assert!(
        run_batch(&[], &AnalysisConfig::new(InputSource::File(PathBuf::new())), None)
            .unwrap()
            .is_empty()
    );
    let out = pthamil(&["batch"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    let out = pthamil(&["batch", "--format", "json"]);
    assert_eq!(stdout(&out).trim(), "[]");
}

#[test]
fn text_output_uses_twelve_significant_digits() {
    let out = pthamil(&["analyze", "--model", "two-level", "--alpha", "1", "--beta", "0.5"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    // E = ±√(1 − 1/4) = ±0.866025403784…
    assert!(text.contains("E[0] = 0.866025403784\n"), "{text}");
    assert!(text.contains("residual "), "{text}");
}

#[test]
fn csv_eigen_table() {
    let out = pthamil(&[
        "analyze",
        "--model",
        "two-level",
        "--alpha",
        "3",
        "--beta",
        "5",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0);
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "n");
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][3], "1");
    assert_eq!(&rows[1][3], "0");
}

#[test]
fn fock_demo_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fock.csv");
    let out = pthamil(&[
        "fock-demo",
        "--x",
        "0",
        "--nmax",
        "100",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("diverges"));
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(
        reader.headers().unwrap(),
        vec!["n", "coefficient", "squared", "partial_norm", "harmonic"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 101);
    assert!((rows[2][2].parse::<f64>().unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn evolve_conserves_the_metric_norm() {
    let out = pthamil(&[
        "evolve",
        "--model",
        "two-level",
        "--alpha",
        "5",
        "--beta",
        "3",
        "--state",
        "1,-i",
        "--times",
        "0,1,10",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["steps"].as_array().unwrap().len(), 3);
    assert!(report["v_norm_drift"].as_f64().unwrap() < 1e-12);
}

#[test]
fn shipped_schema_lists_every_report_key() {
    let schema_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    let required: Vec<&str> = schema["required"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    let report = run_analyze(&builtin(BuiltinModel::TwoLevel { alpha: 5.0, beta: 3.0 })).unwrap();
    let value = serde_json::to_value(&report).unwrap();
    let mut keys: Vec<&str> = value.as_object().unwrap().keys().map(String::as_str).collect();
    let mut listed = required.clone();
    keys.sort_unstable();
    listed.sort_unstable();
    assert_eq!(keys, listed);
}
