//! Experiment driver behind the `negsym` binary.
//!
//! Every subcommand writes its resolved arguments to `run.json` in its
//! output directory before doing any work. Files are written to a temporary
//! name and renamed into place. Exit codes: 0 success, 1 verification
//! failure, 2 usage or data error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::baseline::{mlp_train, MlpConfig, MlpModel};
use crate::data::{
    build_digit_task, build_drawback_task, dataset_to_csv, label_counts, load_mnist, mnist_dir, read_dataset_csv, subsample,
    synthetic_dataset, BinaryPattern, DigitTaskOptions, DownsampleKernel, LabeledDataset, SyntheticRule,
};
use crate::qnn::{ArchitectureSpec, Backend, QnnModel};
use crate::statevec::Pauli;
use crate::symmetry::{
    self, check_cell, check_model, feature_pair_stats, logit_claim, logit_pair_stats, render_table, CellSpec, Evaluator,
    InjectedBias, Quantity, SymmetryReport,
};
use crate::train::{self, init_model, write_metrics_csv, AdamConfig, Checkpoint, EvalMode, ModelKind, TrainConfig};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const RUN_FILE: &str = "run.json";

#[derive(Debug, Parser, Serialize)]
#[command(name = "negsym", version, about = "Parity-gate quantum classifier experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Build the binarized datasets and write CSV caches.
    PrepareData(PrepareArgs),
    /// Train a QNN (--arch) or the MLP baseline (--model mlp).
    Train(TrainArgs),
    /// Score a checkpoint on a dataset and on its negation.
    Eval(EvalArgs),
    /// Run the symmetry grids and Bell checks.
    Verify(VerifyArgs),
    /// Export data-qubit feature vectors.
    Features(FeaturesArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct PrepareArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Directory holding the four MNIST IDX files (default: $NEGSYM_MNIST_DIR).
    #[arg(long)]
    pub mnist_dir: Option<PathBuf>,
    /// Positive then negative digit.
    #[arg(long, num_args = 2, default_values_t = [3u8, 6])]
    pub digits: Vec<u8>,
    #[arg(long, default_value_t = 4)]
    pub side: usize,
    #[arg(long, default_value_t = 128)]
    pub threshold: u8,
    #[arg(long, default_value = "bilinear")]
    pub kernel: String,
    #[arg(long)]
    pub invert: bool,
    /// Generate a labelled random-pattern task instead of reading MNIST.
    #[arg(long)]
    pub synthetic: bool,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Synthetic training-set size; the test split gets a quarter of it.
    #[arg(long, default_value_t = 200)]
    pub size: usize,
    #[arg(long, default_value = "mask-parity")]
    pub rule: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Qnn,
    Mlp,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = ModelChoice::Qnn)]
    pub model: ModelChoice,
    #[arg(long, default_value = "XX-ZZ")]
    pub arch: String,
    #[arg(long, default_value = "Z")]
    pub measurement: String,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long, default_value_t = 1e-4)]
    pub lr: f64,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Epochs without test improvement before stopping; 0 disables.
    #[arg(long, default_value_t = 5)]
    pub patience: usize,
    /// Finite-shot gradient estimates instead of exact expectations.
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long, default_value = "branch")]
    pub backend: String,
    /// Train on a seeded subset of this many examples.
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub hidden: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "branch")]
    pub backend: String,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Check a single architecture instead of the full grids.
    #[arg(long)]
    pub arch: Option<String>,
    /// Measurement for --arch (default: all three).
    #[arg(long)]
    pub measurement: Option<String>,
    /// Check a trained model on --data instead of random models.
    #[arg(long, requires = "data")]
    pub checkpoint: Option<PathBuf>,
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 8])]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = symmetry::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Test fixture: bias every output by this much times the first bit.
    #[arg(long, hide = true)]
    pub inject_bug: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct FeaturesArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Export features of the negated patterns.
    #[arg(long)]
    pub negate: bool,
    /// Override the checkpoint's measurement basis.
    #[arg(long)]
    pub measurement: Option<String>,
    #[arg(long, default_value = "branch")]
    pub backend: String,
}

/// Writes `bytes` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::arg(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn prepare_out(dir: &Path, cli: &Cli) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    #[derive(Serialize)]
    struct RunEcho<'a> {
        version: &'a str,
        #[serde(flatten)]
        command: &'a Command,
    }
    write_json(
        &dir.join(RUN_FILE),
        &RunEcho {
            version: env!("CARGO_PKG_VERSION"),
            command: &cli.command,
        },
    )
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::PrepareData(a) => prepare_data(cli, a),
        Command::Train(a) => cmd_train(cli, a),
        Command::Eval(a) => cmd_eval(cli, a),
        Command::Verify(a) => cmd_verify(cli, a),
        Command::Features(a) => cmd_features(cli, a),
    }
}

fn save_dataset(dir: &Path, file: &str, ds: &LabeledDataset) -> Result<()> {
    write_atomic(&dir.join(file), &dataset_to_csv(ds)?)
}

fn prepare_data(cli: &Cli, a: &PrepareArgs) -> Result<i32> {
    prepare_out(&a.out, cli)?;
    let (train, test) = if a.synthetic {
        let rule: SyntheticRule = a.rule.parse()?;
        let test_size = (a.size / 4).max(1);
        // one draw so both splits share the seeded mask
        let all = synthetic_dataset(a.n, a.size + test_size, rule, a.seed)?;
        let idx: Vec<usize> = (0..all.len()).collect();
        let mut train = all.select(&idx[..a.size]);
        let mut test = all.select(&idx[a.size..]);
        train.name = format!("{}-train", all.name);
        test.name = format!("{}-test", all.name);
        (train, test)
    } else {
        let dir = mnist_dir(a.mnist_dir.as_deref())
            .ok_or_else(|| Error::arg(format!("no MNIST directory: pass --mnist-dir or set {}", crate::data::MNIST_DIR_ENV)))?;
        let opts = DigitTaskOptions {
            positive_digit: a.digits[0],
            negative_digit: a.digits[1],
            side: a.side,
            threshold: a.threshold,
            kernel: a.kernel.parse::<DownsampleKernel>()?,
            invert: a.invert,
        };
        let raw = load_mnist(&dir)?;
        let tag = format!("{}v{}", a.digits[0], a.digits[1]);
        (
            build_digit_task(&raw.train, &format!("{tag}-train"), &opts)?,
            build_digit_task(&raw.test, &format!("{tag}-test"), &opts)?,
        )
    };
    let negated = test.negated();
    let drawback_train = build_drawback_task(&train);
    let drawback_test = build_drawback_task(&test);
    save_dataset(&a.out, "train.csv", &train)?;
    save_dataset(&a.out, "test.csv", &test)?;
    save_dataset(&a.out, "test_negated.csv", &negated)?;
    save_dataset(&a.out, "drawback_train.csv", &drawback_train)?;
    save_dataset(&a.out, "drawback_test.csv", &drawback_test)?;
    let counts: std::collections::BTreeMap<_, _> = label_counts(&[&train, &test, &drawback_train, &drawback_test])
        .into_iter()
        .map(|(name, (pos, neg))| (name, serde_json::json!({"positive": pos, "negative": neg, "total": pos + neg})))
        .collect();
    write_json(&a.out.join("counts.json"), &counts)?;
    println!(
        "train {} ({} +1 / {} -1), test {} ({} / {})",
        train.len(),
        train.count_label(1),
        train.count_label(-1),
        test.len(),
        test.count_label(1),
        test.count_label(-1)
    );
    Ok(EXIT_OK)
}

fn load_pair(train: &Path, test: Option<&Path>) -> Result<(LabeledDataset, Option<LabeledDataset>)> {
    let train = read_dataset_csv(train)?;
    let test = test.map(read_dataset_csv).transpose()?;
    if let Some(t) = &test {
        if t.width() != train.width() {
            return Err(Error::Data(format!(
                "train width {} differs from test width {}",
                train.width(),
                t.width()
            )));
        }
    }
    Ok((train, test))
}

fn cmd_train(cli: &Cli, a: &TrainArgs) -> Result<i32> {
    let (mut train_set, test_set) = load_pair(&a.train, a.test.as_deref())?;
    if let Some(k) = a.limit {
        train_set = subsample(&train_set, k, a.seed);
    }
    let n = train_set.width();
    let adam = AdamConfig {
        learning_rate: a.lr,
        ..AdamConfig::default()
    };
    let (checkpoint, history) = match a.model {
        ModelChoice::Qnn => {
            let arch = ArchitectureSpec::parse(&a.arch, n)?;
            let measurement: Pauli = a.measurement.parse()?;
            let mode = match a.shots {
                Some(shots) => EvalMode::Shots { shots, seed: a.seed },
                None => EvalMode::Exact {
                    backend: a.backend.parse()?,
                },
            };
            let config = TrainConfig {
                batch_size: a.batch_size,
                adam,
                epochs: a.epochs.unwrap_or(30),
                seed: a.seed,
                mode,
                patience: (a.patience > 0).then_some(a.patience),
                ..TrainConfig::default()
            };
            config.validate()?;
            prepare_out(&a.out, cli)?;
            let start = init_model(&QnnModel::zeros(arch).with_measurement(measurement), &config);
            let outcome = train::train(&start, &train_set, test_set.as_ref(), &config)?;
            let best = outcome.history[outcome.best_epoch].clone();
            let ck = Checkpoint::for_qnn(&outcome.model, serde_json::to_value(&config)?, outcome.best_epoch, Some(best), a.seed);
            (ck, outcome.history)
        }
        ModelChoice::Mlp => {
            let config = MlpConfig {
                hidden: a.hidden,
                batch_size: a.batch_size,
                adam,
                epochs: a.epochs.unwrap_or(200),
                seed: a.seed,
            };
            config.adam.validate()?;
            prepare_out(&a.out, cli)?;
            let start = MlpModel::kaiming_uniform(n, a.hidden, a.seed);
            let outcome = mlp_train(&start, &train_set, test_set.as_ref(), &config)?;
            let last = outcome.history.last().cloned();
            let epoch = last.as_ref().map_or(0, |m| m.epoch);
            let ck = Checkpoint::for_mlp(&outcome.model, serde_json::to_value(&config)?, epoch, last, a.seed);
            (ck, outcome.history)
        }
    };
    write_atomic(&a.out.join("checkpoint.json"), checkpoint.to_json()?.as_bytes())?;
    write_atomic(&a.out.join("metrics.csv"), &write_metrics_csv(&history)?)?;
    if let Some(m) = &checkpoint.metrics {
        println!(
            "epoch {}: train_acc {:.4} test_acc {} test_acc_negated {}",
            checkpoint.epoch,
            m.train_acc,
            fmt_opt(m.test_acc),
            fmt_opt(m.test_acc_negated)
        );
    }
    Ok(EXIT_OK)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.4}"))
}

/// Scalar scores of a checkpoint on a dataset.
#[derive(Debug, Serialize)]
pub struct EvalSummary {
    pub model_kind: ModelKind,
    pub examples: usize,
    pub accuracy: f64,
    pub accuracy_negated: f64,
    pub max_logit_pair_diff: f64,
}

fn score(ck: &Checkpoint, ds: &LabeledDataset, backend: Backend) -> Result<EvalSummary> {
    if ds.is_empty() {
        return Err(Error::Data("dataset is empty".into()));
    }
    if ds.width() != ck.n {
        return Err(Error::Data(format!("dataset width {} does not match model width {}", ds.width(), ck.n)));
    }
    let outputs: Box<dyn Fn(&BinaryPattern) -> Result<(f64, i8)>> = match ck.model_kind {
        ModelKind::Qnn => {
            let m = ck.qnn()?;
            Box::new(move |x| {
                let f = backend.forward(&m, x)?;
                Ok((f, crate::qnn::threshold(f)))
            })
        }
        ModelKind::Mlp => {
            let m = ck.mlp()?;
            Box::new(move |x| {
                let p = m.forward(x)?;
                Ok((p, if p >= 0.5 { 1 } else { -1 }))
            })
        }
    };
    let (mut hits, mut hits_neg, mut worst) = (0usize, 0usize, 0.0f64);
    for (x, y) in ds.iter() {
        let (f, c) = outputs(x)?;
        let (fn_, cn) = outputs(&x.negate())?;
        hits += usize::from(c == y);
        hits_neg += usize::from(cn == y);
        worst = worst.max((f - fn_).abs());
    }
    Ok(EvalSummary {
        model_kind: ck.model_kind,
        examples: ds.len(),
        accuracy: hits as f64 / ds.len() as f64,
        accuracy_negated: hits_neg as f64 / ds.len() as f64,
        max_logit_pair_diff: worst,
    })
}

fn cmd_eval(cli: &Cli, a: &EvalArgs) -> Result<i32> {
    let ck = Checkpoint::load(&a.checkpoint)?;
    let ds = read_dataset_csv(&a.data)?;
    let backend: Backend = a.backend.parse()?;
    prepare_out(&a.out, cli)?;
    let summary = score(&ck, &ds, backend)?;
    write_json(&a.out.join("eval.json"), &summary)?;
    println!(
        "accuracy {:.4}, negated {:.4}, max |f(x)-f(x~)| {:.3e}",
        summary.accuracy, summary.accuracy_negated, summary.max_logit_pair_diff
    );
    Ok(EXIT_OK)
}

fn verify_reports(a: &VerifyArgs, eval: &dyn Evaluator) -> Result<Vec<SymmetryReport>> {
    if let Some(path) = &a.checkpoint {
        let ck = Checkpoint::load(path)?;
        let mut model = ck.qnn()?;
        let ds = read_dataset_csv(a.data.as_deref().expect("clap enforces --data"))?;
        if ds.width() != model.arch.n_data_qubits() {
            return Err(Error::Data(format!(
                "dataset width {} does not match {} data qubits",
                ds.width(),
                model.arch.n_data_qubits()
            )));
        }
        let bases = match &a.measurement {
            Some(m) => vec![m.parse::<Pauli>()?],
            None => vec![Pauli::Z, Pauli::X, Pauli::Y],
        };
        let mut out = Vec::new();
        for m in bases {
            model.measurement = m;
            out.push(check_model(eval, &model, ds.patterns(), Quantity::Logit, a.tolerance)?);
            out.push(check_model(eval, &model, ds.patterns(), Quantity::Features, a.tolerance)?);
        }
        return Ok(out);
    }
    if let Some(layers) = &a.arch {
        let arch = ArchitectureSpec::parse(layers, 1)?;
        let bases = match &a.measurement {
            Some(m) => vec![m.parse::<Pauli>()?],
            None => vec![Pauli::Z, Pauli::X, Pauli::Y],
        };
        let mut out = Vec::new();
        for (i, m) in bases.into_iter().enumerate() {
            for (q, quantity) in [Quantity::Logit, Quantity::Features].into_iter().enumerate() {
                let claim = match quantity {
                    Quantity::Logit => logit_claim(&arch, m),
                    _ => symmetry::feature_claim(m),
                };
                out.push(check_cell(
                    eval,
                    &CellSpec {
                        layers,
                        measurement: m,
                        quantity,
                        claim,
                        sizes: &a.n,
                        trials: a.trials,
                        seed: a.seed.wrapping_add((2 * i + q) as u64),
                        tolerance: a.tolerance,
                    },
                )?);
            }
        }
        return Ok(out);
    }
    symmetry::full_verification(eval, &a.n, a.trials, a.seed, a.tolerance)
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> Result<i32> {
    prepare_out(&a.out, cli)?;
    let exact = Backend::StateVector;
    let reports = match a.inject_bug {
        Some(bias) => verify_reports(a, &InjectedBias { inner: exact, bias })?,
        None => verify_reports(a, &exact)?,
    };
    write_json(&a.out.join("report.json"), &reports)?;
    print!("{}", render_table(&reports));
    let failing: Vec<&SymmetryReport> = reports.iter().filter(|r| !r.pass).collect();
    if failing.is_empty() {
        println!("{} records, all pass", reports.len());
        Ok(EXIT_OK)
    } else {
        for r in &failing {
            eprintln!(
                "FAIL {} {} {:?}: max deviation {:.3e} > {:.1e}",
                r.architecture, r.measurement, r.quantity, r.max_deviation, r.tolerance
            );
        }
        Ok(EXIT_VERIFY_FAILED)
    }
}

fn cmd_features(cli: &Cli, a: &FeaturesArgs) -> Result<i32> {
    let ck = Checkpoint::load(&a.checkpoint)?;
    let mut model = ck.qnn()?;
    if let Some(m) = &a.measurement {
        model.measurement = m.parse()?;
    }
    let ds = read_dataset_csv(&a.data)?;
    let n = model.arch.n_data_qubits();
    if ds.width() != n {
        return Err(Error::Data(format!("dataset width {} does not match {n} data qubits", ds.width())));
    }
    let backend: Backend = a.backend.parse()?;
    prepare_out(&a.out, cli)?;
    let ds = if a.negate { ds.negated() } else { ds };
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["bits".to_string(), "label".to_string()];
    header.extend((1..=n).map(|k| format!("g_{k}")));
    w.write_record(&header)?;
    for (x, y) in ds.iter() {
        let g = Evaluator::features(&backend, &model, x)?;
        let mut row = vec![x.to_string(), y.to_string()];
        row.extend(g.iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::arg(e.to_string()))?;
    write_atomic(&a.out.join("features.csv"), &bytes)?;
    let feats = feature_pair_stats(&backend, &model, ds.patterns())?;
    let stats = serde_json::json!({
        "features": &feats,
        "logits": logit_pair_stats(&backend, &model, ds.patterns())?,
    });
    write_json(&a.out.join("pair_stats.json"), &stats)?;
    println!(
        "{} rows; max |g(x)+g(x~)| {:.3e}, mean cosine {:.6}",
        ds.len(),
        feats.max_pair_norm,
        feats.mean_cosine
    );
    Ok(EXIT_OK)
}
