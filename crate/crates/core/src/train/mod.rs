//! Hinge-loss training with parameter-shift gradients and Adam.

mod adam;
mod checkpoint;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use checkpoint::{read_metrics_csv, write_metrics_csv, Checkpoint, ModelKind, METRICS_HEADER};

use std::f64::consts::FRAC_PI_2;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{check_label, BinaryPattern, LabeledDataset};
use crate::qnn::{threshold, Backend, QnnModel};
use crate::{Error, Result};

/// max(0, 1 - y·f)
pub fn hinge_loss(logit: f64, label: i8) -> Result<f64> {
    check_label(label)?;
    Ok((1.0 - label as f64 * logit).max(0.0))
}

/// How logits are obtained during gradient estimation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum EvalMode {
    /// Exact expectation values.
    Exact { backend: Backend },
    /// Finite-shot estimates on the statevector, seeded per evaluation.
    Shots { shots: usize, seed: u64 },
}

impl Default for EvalMode {
    fn default() -> Self {
        EvalMode::Exact {
            backend: Backend::ProductBranch,
        }
    }
}

impl EvalMode {
    fn logit_with_angle(self, model: &QnnModel, x: &BinaryPattern, index: usize, value: f64, salt: u64) -> Result<f64> {
        match self {
            EvalMode::Exact { backend } => backend.forward_with_angle(model, x, index, value),
            EvalMode::Shots { shots, seed } => {
                let mut shifted = model.clone();
                shifted.params.as_mut_slice()[index] = value;
                shifted.forward_sampled(x, shots, seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
            }
        }
    }
}

fn check_index(model: &QnnModel, layer: usize, qubit: usize) -> Result<usize> {
    let (rows, cols) = model.params.shape();
    if layer >= rows || qubit >= cols {
        return Err(Error::arg(format!(
            "parameter ({layer}, {qubit}) out of range for shape ({rows}, {cols})"
        )));
    }
    Ok(layer * cols + qubit)
}

/// [L(f at θ+π/2) - L(f at θ-π/2)] / 2 for the angle at `(layer, qubit)`,
/// computed with exact statevector expectations.
pub fn param_shift_grad(model: &QnnModel, pattern: &BinaryPattern, label: i8, layer: usize, qubit: usize) -> Result<f64> {
    param_shift_grad_with(
        model,
        pattern,
        label,
        layer,
        qubit,
        EvalMode::Exact {
            backend: Backend::StateVector,
        },
    )
}

pub fn param_shift_grad_with(
    model: &QnnModel,
    pattern: &BinaryPattern,
    label: i8,
    layer: usize,
    qubit: usize,
    mode: EvalMode,
) -> Result<f64> {
    check_label(label)?;
    let index = check_index(model, layer, qubit)?;
    shifted_grad(model, pattern, label, index, mode, 0)
}

fn shifted_grad(model: &QnnModel, x: &BinaryPattern, label: i8, index: usize, mode: EvalMode, salt: u64) -> Result<f64> {
    let theta = model.params.as_slice()[index];
    let plus = mode.logit_with_angle(model, x, index, theta + FRAC_PI_2, 2 * salt)?;
    let minus = mode.logit_with_angle(model, x, index, theta - FRAC_PI_2, 2 * salt + 1)?;
    Ok((hinge_loss(plus, label)? - hinge_loss(minus, label)?) / 2.0)
}

/// Mean parameter-shift gradient over `batch`, flat in row-major parameter order.
pub fn grad_full(model: &QnnModel, batch: &[(&BinaryPattern, i8)], mode: EvalMode) -> Result<Vec<f64>> {
    if batch.is_empty() {
        return Err(Error::arg("gradient of an empty batch"));
    }
    let n = model.params.len();
    let mut acc = vec![0.0; n];
    for (e, (x, y)) in batch.iter().enumerate() {
        check_label(*y)?;
        for (i, slot) in acc.iter_mut().enumerate() {
            *slot += shifted_grad(model, x, *y, i, mode, (e * n + i) as u64)?;
        }
    }
    let scale = 1.0 / batch.len() as f64;
    Ok(acc.into_iter().map(|g| g * scale).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub adam: AdamConfig,
    pub epochs: usize,
    pub seed: u64,
    pub mode: EvalMode,
    /// Stop after this many epochs without test-accuracy improvement.
    pub patience: Option<usize>,
    /// Initial angles are drawn from Uniform(-init_range, init_range).
    pub init_range: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 32,
            adam: AdamConfig::default(),
            epochs: 30,
            seed: 0,
            mode: EvalMode::default(),
            patience: Some(5),
            init_range: 0.1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::arg("batch size must be at least 1"));
        }
        if !(self.init_range >= 0.0) {
            return Err(Error::arg("init range must be non-negative"));
        }
        if let EvalMode::Shots { shots: 0, .. } = self.mode {
            return Err(Error::arg("shots must be at least 1"));
        }
        self.adam.validate()
    }
}

/// One row of the metrics file. Epoch 0 describes the initial model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub test_acc: Option<f64>,
    pub test_acc_negated: Option<f64>,
    /// max |f(x) - f(x̃)| over the test set.
    pub max_logit_pair_diff: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub model: QnnModel,
    pub history: Vec<EpochMetrics>,
    /// Epoch whose parameters were kept (best test accuracy, else the last).
    pub best_epoch: usize,
    pub adam: AdamState,
}

pub fn init_model(model: &QnnModel, config: &TrainConfig) -> QnnModel {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let r = config.init_range;
    QnnModel::random(model.arch.clone(), -r, r, &mut rng).with_measurement(model.measurement)
}

pub fn logits(model: &QnnModel, ds: &LabeledDataset, backend: Backend) -> Result<Vec<f64>> {
    ds.patterns().iter().map(|x| backend.forward(model, x)).collect()
}

fn accuracy_of(logits: &[f64], labels: &[i8]) -> f64 {
    let hits = logits
        .iter()
        .zip(labels)
        .filter(|(&f, &y)| threshold(f) == y)
        .count();
    hits as f64 / labels.len() as f64
}

/// Fraction of examples where the predicted class matches the label.
pub fn evaluate(model: &QnnModel, ds: &LabeledDataset, backend: Backend) -> Result<f64> {
    if ds.is_empty() {
        return Err(Error::arg("evaluate on an empty dataset"));
    }
    Ok(accuracy_of(&logits(model, ds, backend)?, ds.labels()))
}

fn epoch_metrics(
    model: &QnnModel,
    epoch: usize,
    train: &LabeledDataset,
    test: Option<&LabeledDataset>,
    backend: Backend,
) -> Result<EpochMetrics> {
    let train_logits = logits(model, train, backend)?;
    let mut loss = 0.0;
    for (&f, &y) in train_logits.iter().zip(train.labels()) {
        loss += hinge_loss(f, y)?;
    }
    let mut m = EpochMetrics {
        epoch,
        train_loss: loss / train.len() as f64,
        train_acc: accuracy_of(&train_logits, train.labels()),
        test_acc: None,
        test_acc_negated: None,
        max_logit_pair_diff: None,
    };
    if let Some(test) = test.filter(|t| !t.is_empty()) {
        let plain = logits(model, test, backend)?;
        let negated = logits(model, &test.negated(), backend)?;
        m.test_acc = Some(accuracy_of(&plain, test.labels()));
        m.test_acc_negated = Some(accuracy_of(&negated, test.labels()));
        m.max_logit_pair_diff = Some(
            plain
                .iter()
                .zip(&negated)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        );
    }
    Ok(m)
}

/// Mini-batch training from `model`'s current parameters.
///
/// Each epoch reshuffles with a generator seeded from `config.seed`, walks
/// batches of `config.batch_size` (keeping the short tail batch) and applies
/// one Adam step per batch. Exact modes are bit-reproducible.
pub fn train(model: &QnnModel, train_set: &LabeledDataset, test_set: Option<&LabeledDataset>, config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    if train_set.is_empty() {
        return Err(Error::arg("training set is empty"));
    }
    if train_set.width() != model.arch.n_data_qubits() {
        return Err(Error::arg(format!(
            "dataset width {} does not match {} data qubits",
            train_set.width(),
            model.arch.n_data_qubits()
        )));
    }
    let metric_backend = match config.mode {
        EvalMode::Exact { backend } => backend,
        EvalMode::Shots { .. } => Backend::StateVector,
    };
    let mut model = model.clone();
    let mut adam = AdamState::new(model.params.len());
    let mut history = vec![epoch_metrics(&model, 0, train_set, test_set, metric_backend)?];
    let mut best = (history[0].test_acc.unwrap_or(f64::NEG_INFINITY), 0usize, model.clone());
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut step_mode = config.mode;

    for epoch in 1..=config.epochs {
        order.shuffle(&mut shuffle_rng);
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<(&BinaryPattern, i8)> = chunk
                .iter()
                .map(|&i| (&train_set.patterns()[i], train_set.labels()[i]))
                .collect();
            if let EvalMode::Shots { shots, seed } = step_mode {
                step_mode = EvalMode::Shots {
                    shots,
                    seed: seed.wrapping_add(0x5851_F42D_4C95_7F2D),
                };
            }
            let grads = grad_full(&model, &batch, step_mode)?;
            adam_step(model.params.as_mut_slice(), &grads, &mut adam, &config.adam)?;
        }
        let m = epoch_metrics(&model, epoch, train_set, test_set, metric_backend)?;
        let score = m.test_acc.unwrap_or(f64::NEG_INFINITY);
        history.push(m);
        if test_set.is_none() || score > best.0 {
            best = (score, epoch, model.clone());
        } else if let Some(patience) = config.patience {
            if epoch - best.1 >= patience {
                break;
            }
        }
    }
    let (_, best_epoch, model) = best;
    Ok(TrainOutcome {
        model,
        history,
        best_epoch,
        adam,
    })
}
