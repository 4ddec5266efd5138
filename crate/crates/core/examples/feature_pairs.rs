//! Data-qubit expectation vectors for patterns and their negations, with
//! the pair statistics the CLI writes to pair_stats.json.
use negsym::data::BinaryPattern;
use negsym::qnn::{ArchitectureSpec, Backend, QnnModel};
use negsym::statevec::Pauli;
use negsym::symmetry::{feature_pair_stats, logit_pair_stats};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> negsym::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let model = QnnModel::random(ArchitectureSpec::parse("XX-ZZ", 5)?, -3.0, 3.0, &mut rng).with_measurement(Pauli::Y);
    let patterns: Vec<BinaryPattern> = (0..64).map(|_| BinaryPattern::from_index(rng.gen_range(0..32), 5)).collect();
    let x = &patterns[0];
    println!("g({x})  = {:?}", model.features(x)?);
    println!("g({}) = {:?}", x.negate(), model.features(&x.negate())?);
    let f = feature_pair_stats(&Backend::StateVector, &model, &patterns)?;
    // the Z-measured logit is the one that is negation invariant
    let l = logit_pair_stats(&Backend::StateVector, &model.clone().with_measurement(Pauli::Z), &patterns)?;
    println!("features: max ||g+g~|| {:.2e}, mean cosine {:.6}", f.max_pair_norm, f.mean_cosine);
    println!("Z logits: max |f-f~| {:.2e}", l.max_pair_norm);
    Ok(())
}
