//! Each image paired with its negation under opposite labels. A parity-gate
//! classifier gives both the same logit and sits at chance; the MLP does not.
use negsym::baseline::{mlp_train, MlpConfig, MlpModel};
use negsym::data::{build_drawback_task, synthetic_dataset, SyntheticRule};
use negsym::qnn::{ArchitectureSpec, Backend, QnnModel};
use negsym::train::{evaluate, init_model, train, AdamConfig, TrainConfig};

fn main() -> negsym::Result<()> {
    let base = synthetic_dataset(8, 400, SyntheticRule::MaskMajority, 2)?;
    let task = build_drawback_task(&base);
    let cfg = TrainConfig {
        epochs: 10,
        adam: AdamConfig {
            learning_rate: 1e-2,
            ..AdamConfig::default()
        },
        ..TrainConfig::default()
    };
    let q = train(&init_model(&QnnModel::zeros(ArchitectureSpec::parse("XX-ZZ", 8)?), &cfg), &task, None, &cfg)?;
    println!("QNN accuracy {:.4}", evaluate(&q.model, &task, Backend::ProductBranch)?);
    let mcfg = MlpConfig {
        hidden: 8,
        epochs: 400,
        adam: AdamConfig {
            learning_rate: 1e-2,
            ..Default::default()
        },
        ..MlpConfig::default()
    };
    let m = mlp_train(&MlpModel::kaiming_uniform(8, 8, 0), &task, None, &mcfg)?;
    println!("MLP accuracy {:.4}", m.model.accuracy(&task)?);
    Ok(())
}
