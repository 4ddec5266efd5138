use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EpochMetrics;
use crate::baseline::MlpModel;
use crate::qnn::{ArchitectureSpec, ParameterSet, QnnModel};
use crate::statevec::Pauli;
use crate::{Error, Result};

pub const METRICS_HEADER: &str = "epoch,train_loss,train_acc,test_acc,test_acc_negated";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Qnn,
    Mlp,
}

/// Serialized trained model plus the run that produced it.
///
/// Floats are written in shortest round-trip form, so angles reload
/// bit-for-bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub model_kind: ModelKind,
    pub arch: String,
    pub n: usize,
    #[serde(default)]
    pub theta: Vec<Vec<f64>>,
    pub measurement: Pauli,
    /// Flat MLP parameters when `model_kind` is `mlp`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mlp: Option<Vec<f64>>,
    pub config: serde_json::Value,
    pub epoch: usize,
    pub metrics: Option<EpochMetrics>,
    pub seed: u64,
}

impl Checkpoint {
    pub fn for_qnn(model: &QnnModel, config: serde_json::Value, epoch: usize, metrics: Option<EpochMetrics>, seed: u64) -> Self {
        Checkpoint {
            model_kind: ModelKind::Qnn,
            arch: model.arch.layer_string(),
            n: model.arch.n_data_qubits(),
            theta: model.params.rows(),
            measurement: model.measurement,
            mlp: None,
            config,
            epoch,
            metrics,
            seed,
        }
    }

    pub fn qnn(&self) -> Result<QnnModel> {
        if self.model_kind != ModelKind::Qnn {
            return Err(Error::arg("checkpoint does not hold a QNN"));
        }
        let arch = ArchitectureSpec::parse(&self.arch, self.n)?;
        QnnModel::new(arch, ParameterSet::from_rows(self.theta.clone())?, self.measurement)
    }

    /// `arch` holds the layer widths, e.g. `16-2-1`.
    pub fn for_mlp(model: &MlpModel, config: serde_json::Value, epoch: usize, metrics: Option<EpochMetrics>, seed: u64) -> Self {
        Checkpoint {
            model_kind: ModelKind::Mlp,
            arch: format!("{}-{}-1", model.inputs, model.hidden),
            n: model.inputs,
            theta: Vec::new(),
            measurement: Pauli::Z,
            mlp: Some(model.params.clone()),
            config,
            epoch,
            metrics,
            seed,
        }
    }

    pub fn mlp(&self) -> Result<MlpModel> {
        if self.model_kind != ModelKind::Mlp {
            return Err(Error::arg("checkpoint does not hold an MLP"));
        }
        let widths: Vec<usize> = self
            .arch
            .split('-')
            .map(|w| w.parse().map_err(|_| Error::arg(format!("bad MLP shape `{}`", self.arch))))
            .collect::<Result<_>>()?;
        let params = self.mlp.clone().ok_or_else(|| Error::arg("MLP checkpoint has no parameters"))?;
        match widths[..] {
            [inputs, hidden, 1] if params.len() == MlpModel::n_params(inputs, hidden) => Ok(MlpModel { inputs, hidden, params }),
            _ => Err(Error::arg(format!("MLP shape `{}` does not match {} parameters", self.arch, params.len()))),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `epoch,train_loss,train_acc,test_acc,test_acc_negated`; absent test
/// metrics are left empty.
pub fn write_metrics_csv(history: &[EpochMetrics]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(METRICS_HEADER.split(','))?;
    for m in history {
        w.write_record([
            m.epoch.to_string(),
            m.train_loss.to_string(),
            m.train_acc.to_string(),
            opt(m.test_acc),
            opt(m.test_acc_negated),
        ])?;
    }
    w.into_inner().map_err(|e| Error::arg(e.to_string()))
}

pub fn read_metrics_csv(path: &Path) -> Result<Vec<EpochMetrics>> {
    let mut r = csv::Reader::from_path(path)?;
    let parse_opt = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| Error::Data(format!("bad number `{s}`")))
        }
    };
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i].parse().map_err(|_| Error::Data(format!("bad number `{}`", &rec[i])))
        };
        out.push(EpochMetrics {
            epoch: rec[0].parse().map_err(|_| Error::Data(format!("bad epoch `{}`", &rec[0])))?,
            train_loss: num(1)?,
            train_acc: num(2)?,
            test_acc: parse_opt(&rec[3])?,
            test_acc_negated: parse_opt(&rec[4])?,
            max_logit_pair_diff: None,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn theta_round_trips_bit_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let model = QnnModel::random(ArchitectureSpec::parse("XX-ZZ-XX", 5).unwrap(), -3.3, 3.3, &mut rng)
            .with_measurement(Pauli::Y);
        let ck = Checkpoint::for_qnn(&model, serde_json::json!({"lr": 1e-4}), 3, None, 42);
        let back = Checkpoint::from_json(&ck.to_json().unwrap()).unwrap();
        let reloaded = back.qnn().unwrap();
        for (a, b) in reloaded.params.as_slice().iter().zip(model.params.as_slice()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(reloaded, model);
        assert_eq!(back, ck);
    }

    #[test]
    fn mlp_round_trip() {
        let m = MlpModel::kaiming_uniform(16, 2, 3);
        let ck = Checkpoint::for_mlp(&m, serde_json::Value::Null, 0, None, 3);
        let back = Checkpoint::from_json(&ck.to_json().unwrap()).unwrap();
        assert_eq!(back.mlp().unwrap(), m);
        assert!(back.qnn().is_err());
    }

    #[test]
    fn metrics_csv_layout() {
        let rows = vec![
            EpochMetrics {
                epoch: 0,
                train_loss: 1.5,
                train_acc: 0.5,
                test_acc: Some(0.25),
                test_acc_negated: Some(0.25),
                max_logit_pair_diff: Some(0.0),
            },
            EpochMetrics {
                epoch: 1,
                train_loss: 1.0,
                train_acc: 0.75,
                test_acc: None,
                test_acc_negated: None,
                max_logit_pair_diff: None,
            },
        ];
        let bytes = write_metrics_csv(&rows).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), METRICS_HEADER);
        assert_eq!(text.lines().nth(2).unwrap(), "1,1,0.75,,");
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        std::fs::write(&p, bytes).unwrap();
        let back = read_metrics_csv(&p).unwrap();
        assert_eq!(back[0].test_acc, Some(0.25));
        assert_eq!(back[1].test_acc, None);
    }
}
