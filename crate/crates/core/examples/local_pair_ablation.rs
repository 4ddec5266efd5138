//! Replaces every parity gate with a local rotation pair R(t) x R(t). The
//! readout never becomes entangled with the data qubits, so the logit does
//! not depend on the input at all and f(x) = f(neg x) trivially.
use negsym::data::BinaryPattern;
use negsym::qnn::{ArchitectureSpec, QnnModel};
use negsym::symmetry::{check_local_pair_ablation, local_pair_forward};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> negsym::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let model = QnnModel::random(ArchitectureSpec::parse("XX-ZZ", 4)?, -3.0, 3.0, &mut rng);
    let x = BinaryPattern::new(vec![1, 1, 0, 1])?;
    println!("parity gates: f(x) {:+.6}  f(neg x) {:+.6}", model.forward(&x)?, model.forward(&x.negate())?);
    println!("local pairs:  f(x) {:+.6}  f(neg x) {:+.6}", local_pair_forward(&model, &x)?, local_pair_forward(&model, &x.negate())?);
    let r = check_local_pair_ablation("XX-ZZ", 4, 500, 1)?;
    println!("max |f(x) - f(neg x)| over {} draws: {:.2e}", r.trials, r.max_deviation);
    Ok(())
}
