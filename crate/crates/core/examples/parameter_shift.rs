//! Compares parameter-shift gradients of the hinge loss with central
//! finite differences on a small random model.
use negsym::data::BinaryPattern;
use negsym::qnn::{ArchitectureSpec, QnnModel};
use negsym::train::{hinge_loss, param_shift_grad};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> negsym::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let model = QnnModel::random(ArchitectureSpec::parse("XX-ZZ", 4)?, -1.0, 1.0, &mut rng);
    let x = BinaryPattern::new(vec![1, 0, 1, 1])?;
    let y = 1;
    println!("f(x) = {:.6}", model.forward(&x)?);
    let h = 1e-5;
    for layer in 0..model.arch.n_layers() {
        for q in 0..model.arch.n_data_qubits() {
            let ps = param_shift_grad(&model, &x, y, layer, q)?;
            let (mut up, mut dn) = (model.clone(), model.clone());
            up.params.set(layer, q, model.params.get(layer, q) + h);
            dn.params.set(layer, q, model.params.get(layer, q) - h);
            let fd = (hinge_loss(up.forward(&x)?, y)? - hinge_loss(dn.forward(&x)?, y)?) / (2.0 * h);
            println!("layer {layer} qubit {} shift {ps:+.8} fd {fd:+.8}", q + 1);
        }
    }
    Ok(())
}
