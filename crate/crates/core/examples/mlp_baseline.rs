//! Trains the 16-2-1 MLP on a majority task and measures how far its
//! output moves when the input is negated.
use negsym::baseline::{mlp_train, MlpConfig, MlpModel};
use negsym::data::{synthetic_dataset, SyntheticRule};

fn main() -> negsym::Result<()> {
    let data = synthetic_dataset(16, 1000, SyntheticRule::MaskMajority, 4)?;
    let cfg = MlpConfig {
        adam: negsym::train::AdamConfig {
            learning_rate: 1e-2,
            ..Default::default()
        },
        epochs: 100,
        ..MlpConfig::default()
    };
    let out = mlp_train(&MlpModel::kaiming_uniform(16, 2, 0), &data, Some(&data), &cfg)?;
    let m = &out.model;
    println!("accuracy {:.4}, negated {:.4}", m.accuracy(&data)?, m.accuracy(&data.negated())?);
    let worst = data
        .patterns()
        .iter()
        .map(|x| Ok((m.forward(x)? - m.forward(&x.negate())?).abs()))
        .collect::<negsym::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    println!("max |p(x) - p(neg x)| = {worst:.4}");
    Ok(())
}
