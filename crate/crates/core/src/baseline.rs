//! Two-layer perceptron baseline (`d → h → 1`, ReLU then sigmoid) trained
//! with binary cross-entropy and Adam. Labels cross the boundary as ±1 and
//! are mapped to {1, 0} internally; the decision threshold is 0.5.

use rand::distributions::{Distribution, Uniform};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{BinaryPattern, LabeledDataset};
use crate::train::{adam_step, AdamConfig, AdamState, EpochMetrics};
use crate::{Error, Result};

/// Flat parameters laid out as `[w1 (h×d, row-major), b1 (h), w2 (h), b2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub inputs: usize,
    pub hidden: usize,
    pub params: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn target(label: i8) -> f64 {
    if label > 0 {
        1.0
    } else {
        0.0
    }
}

impl MlpModel {
    pub fn n_params(inputs: usize, hidden: usize) -> usize {
        hidden * inputs + 2 * hidden + 1
    }

    pub fn zeros(inputs: usize, hidden: usize) -> Self {
        MlpModel {
            inputs,
            hidden,
            params: vec![0.0; Self::n_params(inputs, hidden)],
        }
    }

    /// The 16-2-1 network.
    pub fn d1() -> Self {
        Self::zeros(16, 2)
    }

    /// Weights ~ U(±√(6/fan_in)), biases ~ U(±1/√fan_in).
    pub fn kaiming_uniform(inputs: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Self::zeros(inputs, hidden);
        let w1 = Uniform::new_inclusive(-(6.0 / inputs as f64).sqrt(), (6.0 / inputs as f64).sqrt());
        let b1 = Uniform::new_inclusive(-1.0 / (inputs as f64).sqrt(), 1.0 / (inputs as f64).sqrt());
        let w2 = Uniform::new_inclusive(-(6.0 / hidden as f64).sqrt(), (6.0 / hidden as f64).sqrt());
        let b2 = Uniform::new_inclusive(-1.0 / (hidden as f64).sqrt(), 1.0 / (hidden as f64).sqrt());
        let (hd, h) = (hidden * inputs, hidden);
        for (i, p) in m.params.iter_mut().enumerate() {
            *p = if i < hd {
                w1.sample(&mut rng)
            } else if i < hd + h {
                b1.sample(&mut rng)
            } else if i < hd + 2 * h {
                w2.sample(&mut rng)
            } else {
                b2.sample(&mut rng)
            };
        }
        m
    }

    fn split(&self) -> (&[f64], &[f64], &[f64], f64) {
        let (hd, h) = (self.hidden * self.inputs, self.hidden);
        (
            &self.params[..hd],
            &self.params[hd..hd + h],
            &self.params[hd + h..hd + 2 * h],
            self.params[hd + 2 * h],
        )
    }

    fn check(&self, pattern: &BinaryPattern) -> Result<()> {
        if pattern.len() != self.inputs {
            return Err(Error::arg(format!(
                "pattern has {} bits, MLP expects {}",
                pattern.len(),
                self.inputs
            )));
        }
        Ok(())
    }

    fn hidden_pre(&self, x: &[f64]) -> Vec<f64> {
        let (w1, b1, _, _) = self.split();
        (0..self.hidden)
            .map(|j| b1[j] + w1[j * self.inputs..(j + 1) * self.inputs].iter().zip(x).map(|(w, v)| w * v).sum::<f64>())
            .collect()
    }

    /// P(label = +1).
    pub fn forward(&self, pattern: &BinaryPattern) -> Result<f64> {
        self.check(pattern)?;
        let (_, _, w2, b2) = self.split();
        let z1 = self.hidden_pre(&pattern.as_f64());
        let z2 = b2 + z1.iter().zip(w2).map(|(z, w)| z.max(0.0) * w).sum::<f64>();
        Ok(sigmoid(z2))
    }

    pub fn predict(&self, pattern: &BinaryPattern) -> Result<i8> {
        Ok(if self.forward(pattern)? >= 0.5 { 1 } else { -1 })
    }

    /// Binary cross-entropy of one example.
    pub fn loss(&self, pattern: &BinaryPattern, label: i8) -> Result<f64> {
        let p = self.forward(pattern)?.clamp(1e-15, 1.0 - 1e-15);
        let t = target(label);
        Ok(-(t * p.ln() + (1.0 - t) * (1.0 - p).ln()))
    }

    /// Analytic gradient of the BCE loss, same layout as `params`.
    pub fn gradient(&self, pattern: &BinaryPattern, label: i8) -> Result<Vec<f64>> {
        self.check(pattern)?;
        let x = pattern.as_f64();
        let (_, _, w2, b2) = self.split();
        let z1 = self.hidden_pre(&x);
        let a1: Vec<f64> = z1.iter().map(|z| z.max(0.0)).collect();
        let z2 = b2 + a1.iter().zip(w2).map(|(a, w)| a * w).sum::<f64>();
        // d(BCE)/d(z2) for a sigmoid output
        let dz2 = sigmoid(z2) - target(label);
        let (hd, h) = (self.hidden * self.inputs, self.hidden);
        let mut g = vec![0.0; self.params.len()];
        g[hd + 2 * h] = dz2;
        for j in 0..h {
            g[hd + h + j] = dz2 * a1[j];
            let dz1 = if z1[j] > 0.0 { dz2 * w2[j] } else { 0.0 };
            g[hd + j] = dz1;
            for (i, xi) in x.iter().enumerate() {
                g[j * self.inputs + i] = dz1 * xi;
            }
        }
        Ok(g)
    }

    pub fn accuracy(&self, ds: &LabeledDataset) -> Result<f64> {
        if ds.is_empty() {
            return Err(Error::arg("accuracy of an empty dataset"));
        }
        let mut hits = 0;
        for (x, y) in ds.iter() {
            if self.predict(x)? == y {
                hits += 1;
            }
        }
        Ok(hits as f64 / ds.len() as f64)
    }

    pub fn mean_loss(&self, ds: &LabeledDataset) -> Result<f64> {
        let mut total = 0.0;
        for (x, y) in ds.iter() {
            total += self.loss(x, y)?;
        }
        Ok(total / ds.len().max(1) as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden: usize,
    pub batch_size: usize,
    pub adam: AdamConfig,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: 2,
            batch_size: 32,
            adam: AdamConfig::default(),
            epochs: 200,
            seed: 0,
        }
    }
}

pub struct MlpOutcome {
    pub model: MlpModel,
    pub history: Vec<EpochMetrics>,
}

fn metrics(model: &MlpModel, epoch: usize, train: &LabeledDataset, test: Option<&LabeledDataset>) -> Result<EpochMetrics> {
    let mut m = EpochMetrics {
        epoch,
        train_loss: model.mean_loss(train)?,
        train_acc: model.accuracy(train)?,
        test_acc: None,
        test_acc_negated: None,
        max_logit_pair_diff: None,
    };
    if let Some(test) = test.filter(|t| !t.is_empty()) {
        m.test_acc = Some(model.accuracy(test)?);
        m.test_acc_negated = Some(model.accuracy(&test.negated())?);
        let mut worst = 0.0f64;
        for x in test.patterns() {
            worst = worst.max((model.forward(x)? - model.forward(&x.negate())?).abs());
        }
        m.max_logit_pair_diff = Some(worst);
    }
    Ok(m)
}

/// Mini-batch Adam on the mean BCE, starting from `model`.
pub fn mlp_train(model: &MlpModel, train: &LabeledDataset, test: Option<&LabeledDataset>, cfg: &MlpConfig) -> Result<MlpOutcome> {
    cfg.adam.validate()?;
    if cfg.batch_size == 0 {
        return Err(Error::arg("batch size must be at least 1"));
    }
    if train.is_empty() {
        return Err(Error::arg("training set is empty"));
    }
    let mut model = model.clone();
    let mut state = AdamState::new(model.params.len());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut history = vec![metrics(&model, 0, train, test)?];
    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size) {
            let mut grad = vec![0.0; model.params.len()];
            for &i in chunk {
                let g = model.gradient(&train.patterns()[i], train.labels()[i])?;
                for (a, b) in grad.iter_mut().zip(g) {
                    *a += b;
                }
            }
            let scale = 1.0 / chunk.len() as f64;
            grad.iter_mut().for_each(|g| *g *= scale);
            adam_step(&mut model.params, &grad, &mut state, &cfg.adam)?;
        }
        history.push(metrics(&model, epoch, train, test)?);
    }
    Ok(MlpOutcome { model, history })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(s: &str) -> BinaryPattern {
        s.parse().unwrap()
    }

    #[test]
    fn d1_has_37_parameters() {
        assert_eq!(MlpModel::d1().params.len(), 37);
    }

    #[test]
    fn zero_weights_give_one_half() {
        let m = MlpModel::d1();
        assert_eq!(m.forward(&BinaryPattern::zeros(16)).unwrap(), 0.5);
        assert!(m.forward(&BinaryPattern::zeros(15)).is_err());
    }

    #[test]
    fn hand_computed_forward() {
        // 2 inputs, 1 hidden: z1 = 0.5·1 + 1.5·1 - 1 = 1, z2 = 2·1 - 1 = 1
        let m = MlpModel {
            inputs: 2,
            hidden: 1,
            params: vec![0.5, 1.5, -1.0, 2.0, -1.0],
        };
        let want = 1.0 / (1.0 + (-1.0f64).exp());
        assert!((m.forward(&pat("11")).unwrap() - want).abs() < 1e-15);
        // z1 = 0.5 - 1 < 0 so the ReLU closes and z2 = -1
        let want = 1.0 / (1.0 + 1.0f64.exp());
        assert!((m.forward(&pat("10")).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn output_strictly_inside_unit_interval() {
        let m = MlpModel::kaiming_uniform(16, 2, 4);
        for v in [0u64, 1, 0xffff, 0x1234] {
            let p = m.forward(&BinaryPattern::from_index(v, 16)).unwrap();
            assert!(p > 0.0 && p < 1.0);
        }
    }

    #[test]
    fn backprop_matches_finite_differences() {
        let m = MlpModel::kaiming_uniform(16, 2, 9);
        for (v, y) in [(0x0f0fu64, 1i8), (0x3c01, -1), (0xffff, 1)] {
            let x = BinaryPattern::from_index(v, 16);
            let g = m.gradient(&x, y).unwrap();
            for i in 0..m.params.len() {
                let h = 1e-6;
                let mut up = m.clone();
                up.params[i] += h;
                let mut dn = m.clone();
                dn.params[i] -= h;
                let fd = (up.loss(&x, y).unwrap() - dn.loss(&x, y).unwrap()) / (2.0 * h);
                assert!((g[i] - fd).abs() <= 1e-6 * fd.abs().max(1.0), "param {i}: {} vs {fd}", g[i]);
            }
        }
    }
}
