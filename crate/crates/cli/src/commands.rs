//! Subcommand implementations.
//!
//! Every subcommand takes one master `--seed`. Derived streams keep the
//! pieces independent: the split permutation uses stream 1 and the forests
//! stream 2; `validate` additionally draws its two synthetic populations
//! from streams 1 and 3 and their forests from streams 2 and 4.

use std::path::Path;

use serde::Serialize;

use skewconf_core::conformal::{calibrate, fit_skew, Method};
use skewconf_core::data::{load_csv, Dataset, SplitSpec, ThreeWaySplit};
use skewconf_core::efficiency::{convergence_probe, efficiency_report, ProbeConfig};
use skewconf_core::eval::{
    efficiency_csv, markdown_tables, plot_points_csv, results_csv, results_json, run_benchmark,
    BenchConfig,
};
use skewconf_core::learners::ForestParams;
use skewconf_core::seeding::derive_seed;
use skewconf_core::synth::{generate, MeanFn, Noise, ScaleFn, SynthSpec};
use skewconf_core::validate::{convergence_check, coverage_suite, CoverageProtocol};

use crate::args::{
    BenchArgs, Cli, Command, InputArgs, PhiArgs, SplitArgs, SynthArgs, ValidateArgs,
};
use crate::error::AppError;
use crate::output::{dataset_label, dataset_to_csv, ensure_dir, write_atomic};

const SPLIT_STREAM: u64 = 1;
const FOREST_STREAM: u64 = 2;
const PROBE_POPULATION_STREAM: u64 = 3;
const PROBE_FOREST_STREAM: u64 = 4;

pub fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Bench(args) => bench(args),
        Command::Synth(args) => synth(args),
        Command::Phi(args) => phi(args),
        Command::Validate(args) => validate(args),
    }
}

fn split_spec(args: &SplitArgs, master_seed: u64) -> Result<SplitSpec, AppError> {
    let fractions = &args.split;
    if fractions.len() != 3 {
        return Err(AppError::Config(format!(
            "--split needs exactly three comma-separated fractions, got {}",
            fractions.len()
        )));
    }
    Ok(SplitSpec::new(
        fractions[0],
        fractions[1],
        fractions[2],
        derive_seed(master_seed, SPLIT_STREAM),
    )?)
}

fn load_input(args: &InputArgs) -> Result<Dataset, AppError> {
    Ok(load_csv(
        &args.input,
        args.target.as_deref(),
        args.categorical.policy(),
    )?)
}

fn to_json(value: &impl Serialize) -> Result<String, AppError> {
    let mut out = serde_json::to_string_pretty(value)?;
    out.push('\n');
    Ok(out)
}

fn rows_to_csv<T: Serialize>(rows: &[T]) -> Result<String, AppError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer.into_inner().expect("writing to a Vec cannot fail");
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Serialize)]
struct BenchRunConfig {
    command: &'static str,
    input: String,
    target: Option<String>,
    categorical: &'static str,
    split: SplitSpec,
    alphas: Vec<f64>,
    methods: Vec<Method>,
    forest: ForestParams,
    zero_tilt: bool,
    seed: u64,
    outputs: Vec<String>,
}

fn bench(args: BenchArgs) -> Result<(), AppError> {
    let split = split_spec(&args.split, args.seed)?;
    let data = load_input(&args.input)?;
    let config = BenchConfig {
        dataset_id: dataset_label(&args.input.input),
        alphas: args.alphas.clone(),
        methods: args.methods.clone(),
        forest: args
            .forest
            .to_params(derive_seed(args.seed, FOREST_STREAM)),
        zero_tilt: args.zero_tilt,
    };
    let output = run_benchmark(&config, &data, &split)?;

    let mut artifacts = vec!["results.csv".to_string(), "config.json".to_string()];
    if !output.efficiency.is_empty() {
        artifacts.push("efficiency.csv".to_string());
    }
    if args.json {
        artifacts.push("results.json".to_string());
    }
    if args.markdown {
        artifacts.push("report.md".to_string());
    }
    if args.plot_data {
        artifacts.push("plot_points.csv".to_string());
    }
    artifacts.sort();

    ensure_dir(&args.out_dir)?;
    write_atomic(
        &args.out_dir.join("results.csv"),
        &results_csv(&output.results)?,
    )?;
    if !output.efficiency.is_empty() {
        write_atomic(
            &args.out_dir.join("efficiency.csv"),
            &efficiency_csv(&output.efficiency)?,
        )?;
    }
    if args.json {
        write_atomic(
            &args.out_dir.join("results.json"),
            &results_json(&output.results, &output.efficiency)?,
        )?;
    }
    if args.markdown {
        write_atomic(
            &args.out_dir.join("report.md"),
            &markdown_tables(&output.results, &output.efficiency),
        )?;
    }
    if args.plot_data {
        write_atomic(
            &args.out_dir.join("plot_points.csv"),
            &plot_points_csv(&output.plot_points)?,
        )?;
    }
    let run_config = BenchRunConfig {
        command: "bench",
        input: args.input.input.display().to_string(),
        target: args.input.target.clone(),
        categorical: args.input.categorical.label(),
        split,
        alphas: config.alphas.clone(),
        methods: config.methods.clone(),
        forest: config.forest,
        zero_tilt: config.zero_tilt,
        seed: args.seed,
        outputs: artifacts.clone(),
    };
    write_atomic(&args.out_dir.join("config.json"), &to_json(&run_config)?)?;

    println!(
        "dataset {}: {} rows, {} features",
        config.dataset_id,
        data.n_rows(),
        data.n_features()
    );
    println!("{:<8} {:<6} {:>9} {:>10} {:>10}", "method", "alpha", "coverage", "avg_width", "r_hat");
    for result in &output.results {
        println!(
            "{:<8} {:<6} {:>9.4} {:>10.4} {:>10.4}",
            result.method.to_string(),
            result.alpha,
            result.empirical_coverage,
            result.avg_length,
            result.r_hat
        );
    }
    for report in &output.efficiency {
        println!(
            "efficiency at alpha={}: phi_hat {:.4}, test ratio {:.4}, |diff| {:.4}",
            report.alpha, report.phi_hat, report.test_avg_ratio, report.abs_difference
        );
    }
    println!("wrote {} to {}", artifacts.join(", "), args.out_dir.display());
    Ok(())
}

#[derive(Serialize)]
struct SynthRunConfig {
    command: &'static str,
    spec: SynthSpec,
    out: String,
}

fn synth(args: SynthArgs) -> Result<(), AppError> {
    let spec = SynthSpec {
        mean_fn: args.mean,
        scale_fn: args.scale,
        noise: args.noise,
        d: args.d,
        n: args.n,
        seed: args.seed,
    };
    let data = generate(&spec)?;
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            ensure_dir(parent)?;
        }
    }
    write_atomic(&args.out, &dataset_to_csv(&data)?)?;
    let config_path = sibling_config_path(&args.out);
    let run_config = SynthRunConfig {
        command: "synth",
        spec,
        out: args.out.display().to_string(),
    };
    write_atomic(&config_path, &to_json(&run_config)?)?;
    println!(
        "wrote {} rows of {} features to {} (spec in {})",
        data.n_rows(),
        data.n_features(),
        args.out.display(),
        config_path.display()
    );
    Ok(())
}

fn sibling_config_path(out: &Path) -> std::path::PathBuf {
    let mut name = out
        .file_stem()
        .map(|stem| stem.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    name.push_str(".config.json");
    out.with_file_name(name)
}

#[derive(Serialize)]
struct PhiRunConfig {
    command: &'static str,
    input: String,
    target: Option<String>,
    categorical: &'static str,
    split: SplitSpec,
    alpha: f64,
    forest: ForestParams,
    seed: u64,
}

fn phi(args: PhiArgs) -> Result<(), AppError> {
    let split = split_spec(&args.split, args.seed)?;
    let data = load_input(&args.input)?;
    let parts: ThreeWaySplit = skewconf_core::data::split_three_way(&data, &split)?;
    let forest = args
        .forest
        .to_params(derive_seed(args.seed, FOREST_STREAM));
    let model = fit_skew(&parts.train, &forest)?;
    let scaled = model.as_scaled();
    let thr_skew = calibrate(&model, &parts.calibration, args.alpha)?;
    let thr_scaled = calibrate(&scaled, &parts.calibration, args.alpha)?;
    let report = efficiency_report(
        &model,
        &thr_skew,
        &thr_scaled,
        parts.calibration.features().view(),
        parts.test.features().view(),
    )?;

    println!(
        "n_train {}  n_calib {}  n_test {}  alpha {}",
        parts.train.n_rows(),
        report.n_calib,
        report.n_test,
        args.alpha
    );
    println!("r_hat_skew      {:.6}", report.r_hat_skew);
    println!("r_hat_scaled    {:.6}", report.r_hat_scaled);
    println!("phi_hat         {:.6}", report.phi_hat);
    println!("test_avg_ratio  {:.6}", report.test_avg_ratio);
    println!("abs_difference  {:.6}", report.abs_difference);

    if let Some(out_dir) = &args.out_dir {
        ensure_dir(out_dir)?;
        write_atomic(&out_dir.join("efficiency.csv"), &efficiency_csv(&[report])?)?;
        let run_config = PhiRunConfig {
            command: "phi",
            input: args.input.input.display().to_string(),
            target: args.input.target.clone(),
            categorical: args.input.categorical.label(),
            split,
            alpha: args.alpha,
            forest,
            seed: args.seed,
        };
        write_atomic(&out_dir.join("config.json"), &to_json(&run_config)?)?;
        println!(
            "wrote efficiency.csv, config.json to {}",
            out_dir.display()
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct ValidateRunConfig {
    command: &'static str,
    suite: &'static str,
    alpha: f64,
    trees: usize,
    train_size: usize,
    n_calib: usize,
    test_size: usize,
    coverage_reps: usize,
    probe_reps: usize,
    grid: Vec<usize>,
    seed: u64,
}

fn validate(args: ValidateArgs) -> Result<(), AppError> {
    let forest_for = |stream: u64| ForestParams {
        n_trees: args.trees,
        min_leaf: 5,
        ..ForestParams::defaults(derive_seed(args.seed, stream))
    };
    let mut all_pass = true;
    let mut coverage_rows = Vec::new();
    let mut probe_rows = Vec::new();

    if args.suite.runs_coverage() {
        // Symmetric noise exercises the band check without favoring any
        // method; coverage is distribution-free, so one population suffices.
        let population = SynthSpec {
            mean_fn: MeanFn::Linear,
            scale_fn: ScaleFn::Constant(1.0),
            noise: Noise::Gaussian,
            d: 1,
            n: 0,
            seed: derive_seed(args.seed, SPLIT_STREAM),
        };
        let protocol = CoverageProtocol {
            alpha: args.alpha,
            methods: Method::ALL.to_vec(),
            forest: forest_for(FOREST_STREAM),
            train_size: args.train_size,
            n_calib: args.n_calib,
            test_size: args.test_size,
            replications: args.coverage_reps,
        };
        let checks = coverage_suite(&population, &protocol)?;
        for check in &checks {
            println!(
                "[coverage] {:<6} mean {:.5} (se {:.5}) vs band [{:.5}, {:.5}] => {}",
                check.method.to_string(),
                check.mean_coverage,
                check.mc_std_error,
                check.band_lo,
                check.band_hi,
                verdict(check.pass)
            );
            all_pass &= check.pass;
        }
        coverage_rows = checks;
    }

    if args.suite.runs_convergence() {
        // Skewed noise keeps the tilt (and hence the estimate) nontrivial.
        let population = SynthSpec {
            mean_fn: MeanFn::Linear,
            scale_fn: ScaleFn::Constant(1.0),
            noise: Noise::LognormalStd,
            d: 1,
            n: 0,
            seed: derive_seed(args.seed, PROBE_POPULATION_STREAM),
        };
        let config = ProbeConfig {
            alpha: args.alpha,
            forest: forest_for(PROBE_FOREST_STREAM),
            train_size: args.train_size,
            test_size: args.test_size,
        };
        let rows = convergence_probe(&population, &args.grid, args.probe_reps, &config)?;
        for row in &rows {
            println!(
                "[convergence] n_calib {:>6}: mean |gap| {:.5} (se {:.5}, mean phi {:.4})",
                row.n_calib, row.mean_abs_gap, row.std_error, row.mean_phi
            );
        }
        let check = convergence_check(&rows)?;
        println!(
            "[convergence] monotone within noise: {}; final below first: {} => {}",
            check.monotone_within_noise,
            check.final_below_first,
            verdict(check.pass)
        );
        all_pass &= check.pass;
        probe_rows = rows;
    }

    if let Some(out_dir) = &args.out_dir {
        ensure_dir(out_dir)?;
        let mut artifacts = vec!["config.json"];
        if !coverage_rows.is_empty() {
            write_atomic(&out_dir.join("coverage.csv"), &rows_to_csv(&coverage_rows)?)?;
            artifacts.push("coverage.csv");
        }
        if !probe_rows.is_empty() {
            write_atomic(
                &out_dir.join("convergence.csv"),
                &rows_to_csv(&probe_rows)?,
            )?;
            artifacts.push("convergence.csv");
        }
        let run_config = ValidateRunConfig {
            command: "validate",
            suite: args.suite.label(),
            alpha: args.alpha,
            trees: args.trees,
            train_size: args.train_size,
            n_calib: args.n_calib,
            test_size: args.test_size,
            coverage_reps: args.coverage_reps,
            probe_reps: args.probe_reps,
            grid: args.grid.clone(),
            seed: args.seed,
        };
        write_atomic(&out_dir.join("config.json"), &to_json(&run_config)?)?;
        artifacts.sort_unstable();
        println!("wrote {} to {}", artifacts.join(", "), out_dir.display());
    }

    println!("overall: {}", verdict(all_pass));
    if all_pass {
        Ok(())
    } else {
        Err(AppError::ChecksFailed)
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}
