//! 3-vs-6 MNIST on 4x4 binarized images with the XX-ZZ classifier, using a
//! 1000-example subsample for speed. Needs the IDX files in
//! $NEGSYM_MNIST_DIR or ./data/mnist.
use negsym::data::{build_digit_task, load_mnist, mnist_dir, subsample, DigitTaskOptions};
use negsym::qnn::{ArchitectureSpec, Backend, QnnModel};
use negsym::train::{evaluate, init_model, train, AdamConfig, TrainConfig};

fn main() -> negsym::Result<()> {
    let dir = mnist_dir(None).unwrap_or_else(|| "data/mnist".into());
    let raw = load_mnist(&dir)?;
    let opts = DigitTaskOptions::default();
    let train_set = build_digit_task(&raw.train, "3v6-train", &opts)?;
    let test_set = build_digit_task(&raw.test, "3v6-test", &opts)?;
    println!("train {} test {}", train_set.len(), test_set.len());
    let cfg = TrainConfig {
        epochs: 10,
        adam: AdamConfig {
            learning_rate: 1e-2,
            ..AdamConfig::default()
        },
        ..TrainConfig::default()
    };
    let model = init_model(&QnnModel::zeros(ArchitectureSpec::parse("XX-ZZ", 16)?), &cfg);
    let out = train(&model, &subsample(&train_set, 1000, 0), Some(&test_set), &cfg)?;
    let acc = evaluate(&out.model, &test_set, Backend::ProductBranch)?;
    let neg = evaluate(&out.model, &test_set.negated(), Backend::ProductBranch)?;
    println!("test accuracy {acc:.4}, on negated images {neg:.4}");
    Ok(())
}
