//! End-to-end tests that drive the compiled `skewconf` binary.
//!
//! Every invocation passes an explicit `--seed` and `--out-dir`, so runs
//! are reproducible and nothing leaks outside the per-test temp
//! directories. The checks cover the artifact contract (which files
//! appear, their headers, byte-identical reruns), the exit-code contract,
//! and the pass/fail wiring of `validate`.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::{tempdir, TempDir};

fn skewconf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skewconf"))
        .args(args)
        .output()
        .expect("failed to spawn the skewconf binary")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is utf-8")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is utf-8")
}

fn assert_code(output: &Output, expected: i32) {
    let got = output.status.code().expect("process was not signalled");
    assert_eq!(
        got,
        expected,
        "wrong exit code\nstdout:\n{}\nstderr:\n{}",
        stdout(output),
        stderr(output)
    );
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|err| panic!("reading {}: {err}", path.display()))
}

/// Generates a small synthetic CSV and returns the holding directory plus
/// the dataset path.
fn synth_dataset(n: &str, d: &str, seed: &str) -> (TempDir, std::path::PathBuf) {
    let dir = tempdir().expect("tempdir");
    let path = dir.path().join("data.csv");
    let out = skewconf(&[
        "synth",
        "--n",
        n,
        "--d",
        d,
        "--seed",
        seed,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    (dir, path)
}

#[test]
fn synth_writes_the_dataset_and_a_config_sidecar() {
    let dir = tempdir().unwrap();
    let first = dir.path().join("pts.csv");
    let out = skewconf(&[
        "synth",
        "--n",
        "60",
        "--d",
        "2",
        "--seed",
        "5",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    assert!(stdout(&out).contains("wrote 60 rows of 2 features"));

    let body = read(&first);
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("x1,x2,y"));
    assert_eq!(lines.count(), 60);

    let sidecar = read(&dir.path().join("pts.config.json"));
    assert!(sidecar.contains("\"command\": \"synth\""));
    assert!(sidecar.contains("\"seed\": 5"));

    let second = dir.path().join("again.csv");
    let rerun = skewconf(&[
        "synth",
        "--n",
        "60",
        "--d",
        "2",
        "--seed",
        "5",
        "--out",
        second.to_str().unwrap(),
    ]);
    assert_code(&rerun, 0);
    assert_eq!(body, read(&second), "same seed must give identical bytes");
}

#[test]
fn bench_writes_artifacts_and_reruns_are_byte_identical() {
    let (dir, data) = synth_dataset("240", "2", "3");
    let out1 = dir.path().join("out1");
    let out2 = dir.path().join("out2");
    let run = |out_dir: &Path| {
        skewconf(&[
            "bench",
            "--input",
            data.to_str().unwrap(),
            "--trees",
            "8",
            "--alphas",
            "0.1,0.2",
            "--methods",
            "skew,scaled",
            "--seed",
            "9",
            "--json",
            "--markdown",
            "--plot-data",
            "--out-dir",
            out_dir.to_str().unwrap(),
        ])
    };

    let first = run(&out1);
    assert_code(&first, 0);
    let text = stdout(&first);
    assert!(text.contains("240 rows, 2 features"));
    assert!(text.contains("efficiency at alpha=0.1"));
    assert!(text.contains("wrote "));

    let results = read(&out1.join("results.csv"));
    let mut lines = results.lines();
    assert_eq!(
        lines.next(),
        Some("dataset_id,method,alpha,empirical_coverage,avg_length,r_hat,n_calib,k_index,n_test,seed")
    );
    assert_eq!(lines.count(), 4, "two methods at two levels");

    let efficiency = read(&out1.join("efficiency.csv"));
    let mut lines = efficiency.lines();
    assert_eq!(
        lines.next(),
        Some("alpha,phi_hat,test_avg_ratio,abs_difference,r_hat_skew,r_hat_scaled,n_calib,n_test")
    );
    assert_eq!(lines.count(), 2, "one efficiency row per level");

    assert!(read(&out1.join("config.json")).contains("\"command\": \"bench\""));
    assert!(out1.join("results.json").is_file());
    assert!(out1.join("report.md").is_file());
    assert!(out1.join("plot_points.csv").is_file());

    assert_code(&run(&out2), 0);
    for name in [
        "results.csv",
        "efficiency.csv",
        "config.json",
        "results.json",
        "report.md",
        "plot_points.csv",
    ] {
        assert_eq!(
            read(&out1.join(name)),
            read(&out2.join(name)),
            "{name} changed between identical runs"
        );
    }
}

#[test]
fn bench_resolves_the_target_column_and_categorical_encoding() {
    let dir = tempdir().unwrap();
    let data = dir.path().join("mixed.csv");
    let mut body = String::from("size,price,city\n");
    for row in 0..60 {
        let city = ["ada", "bec", "cor"][row % 3];
        body.push_str(&format!("{row},{},{city}\n", row % 3 + row));
    }
    fs::write(&data, body).unwrap();

    let run = |encoding: &str, out_name: &str| {
        let out = skewconf(&[
            "bench",
            "--input",
            data.to_str().unwrap(),
            "--target",
            "price",
            "--categorical",
            encoding,
            "--split",
            "0.5,0.3,0.2",
            "--alphas",
            "0.2",
            "--trees",
            "5",
            "--seed",
            "21",
            "--out-dir",
            dir.path().join(out_name).to_str().unwrap(),
        ]);
        assert_code(&out, 0);
        stdout(&out)
    };

    // One-hot drops the first of three city levels: size + two indicators.
    assert!(run("one-hot", "oh").contains("60 rows, 3 features"));
    // Ordinal keeps city as a single coded column.
    assert!(run("ordinal", "ord").contains("60 rows, 2 features"));
}

#[test]
fn missing_input_exits_with_the_data_code_and_writes_nothing() {
    let dir = tempdir().unwrap();
    let out_dir = dir.path().join("never");
    let out = skewconf(&[
        "bench",
        "--input",
        dir.path().join("absent.csv").to_str().unwrap(),
        "--seed",
        "1",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_code(&out, 3);
    assert!(stderr(&out).starts_with("error: "));
    assert!(!out_dir.exists(), "failed runs must not create the out dir");
}

#[test]
fn bad_split_fractions_exit_with_the_config_code() {
    let (dir, data) = synth_dataset("50", "1", "2");
    let out = skewconf(&[
        "bench",
        "--input",
        data.to_str().unwrap(),
        "--split",
        "0.5,0.4,0.3",
        "--seed",
        "1",
        "--out-dir",
        dir.path().join("never").to_str().unwrap(),
    ]);
    assert_code(&out, 2);

    let two = skewconf(&[
        "bench",
        "--input",
        data.to_str().unwrap(),
        "--split",
        "0.5,0.5",
        "--seed",
        "1",
    ]);
    assert_code(&two, 2);
}

#[test]
fn inadmissible_calibration_exits_with_code_4_before_writing() {
    // With 40 rows the default split leaves 4 calibration rows, too few
    // for the default levels.
    let (dir, data) = synth_dataset("40", "1", "2");
    let out_dir = dir.path().join("never");
    let out = skewconf(&[
        "bench",
        "--input",
        data.to_str().unwrap(),
        "--seed",
        "1",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_code(&out, 4);
    assert!(stderr(&out).contains("calibration"));
    assert!(!out_dir.exists(), "failed runs must not create the out dir");
}

#[test]
fn parse_errors_exit_with_the_usage_code() {
    let unknown_method = skewconf(&[
        "bench", "--input", "x.csv", "--seed", "1", "--methods", "magic",
    ]);
    assert_code(&unknown_method, 2);

    let missing_seed = skewconf(&["bench", "--input", "x.csv"]);
    assert_code(&missing_seed, 2);
}

#[test]
fn phi_prints_the_report_and_writes_artifacts() {
    let (dir, data) = synth_dataset("240", "1", "6");
    let out_dir = dir.path().join("phi");
    let out = skewconf(&[
        "phi",
        "--input",
        data.to_str().unwrap(),
        "--trees",
        "8",
        "--seed",
        "4",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let text = stdout(&out);
    for field in [
        "r_hat_skew",
        "r_hat_scaled",
        "phi_hat",
        "test_avg_ratio",
        "abs_difference",
    ] {
        assert!(text.contains(field), "missing {field} in:\n{text}");
    }

    let efficiency = read(&out_dir.join("efficiency.csv"));
    assert!(efficiency.starts_with("alpha,phi_hat,test_avg_ratio,"));
    assert!(read(&out_dir.join("config.json")).contains("\"command\": \"phi\""));
}

/// Shared arguments sized so a full validate run takes well under a
/// second.
const QUICK_VALIDATE: &[&str] = &[
    "--seed",
    "11",
    "--trees",
    "15",
    "--train-size",
    "400",
    "--n-calib",
    "99",
    "--test-size",
    "300",
    "--coverage-reps",
    "20",
    "--probe-reps",
    "6",
];

#[test]
fn validate_passes_and_repeats_its_output_exactly() {
    let run = || {
        let mut args = vec!["validate"];
        args.extend_from_slice(QUICK_VALIDATE);
        args.extend_from_slice(&["--grid", "60,200"]);
        skewconf(&args)
    };
    let first = run();
    assert_code(&first, 0);
    let text = stdout(&first);
    assert!(text.contains("[coverage] skew"));
    assert!(text.contains("[convergence] n_calib"));
    assert!(text.contains("overall: PASS"));

    let second = run();
    assert_code(&second, 0);
    assert_eq!(text, stdout(&second), "validate must be deterministic");
}

#[test]
fn validate_suite_flag_selects_the_checks_and_saves_tables() {
    let dir = tempdir().unwrap();
    let out_dir = dir.path().join("cov");
    let mut args = vec!["validate", "--suite", "coverage"];
    args.extend_from_slice(QUICK_VALIDATE);
    args.extend_from_slice(&["--out-dir", out_dir.to_str().unwrap()]);
    let coverage_only = skewconf(&args);
    assert_code(&coverage_only, 0);
    let text = stdout(&coverage_only);
    assert!(text.contains("[coverage]"));
    assert!(!text.contains("[convergence]"));

    let table = read(&out_dir.join("coverage.csv"));
    let mut lines = table.lines();
    assert_eq!(
        lines.next(),
        Some("method,alpha,mean_coverage,mc_std_error,band_lo,band_hi,replications,pass")
    );
    assert_eq!(lines.count(), 3, "one row per method");
    assert!(!out_dir.join("convergence.csv").exists());
    assert!(read(&out_dir.join("config.json")).contains("\"suite\": \"coverage\""));

    let mut args = vec!["validate", "--suite", "convergence"];
    args.extend_from_slice(QUICK_VALIDATE);
    args.extend_from_slice(&["--grid", "60,200"]);
    let convergence_only = skewconf(&args);
    assert_code(&convergence_only, 0);
    let text = stdout(&convergence_only);
    assert!(!text.contains("[coverage]"));
    assert!(text.contains("[convergence]"));
}

#[test]
fn validate_reports_failing_checks_with_exit_code_1() {
    // Listing the grid largest-first makes the final gap sit above the
    // first one, which the convergence check must flag.
    let mut args = vec!["validate", "--suite", "convergence"];
    args.extend_from_slice(QUICK_VALIDATE);
    args.extend_from_slice(&["--grid", "200,60"]);
    let out = skewconf(&args);
    assert_code(&out, 1);
    assert!(stdout(&out).contains("overall: FAIL"));
    assert!(stderr(&out).contains("statistical checks"));
}
