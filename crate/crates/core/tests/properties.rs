mod common;

use std::f64::consts::PI;

use common::*;
use negsym::data::{dataset_to_csv, BinaryPattern, LabeledDataset};
use negsym::qnn::{ArchitectureSpec, Backend, ParameterSet, QnnModel, READOUT};
use negsym::statevec::{Gate1Q, Gate2Q, Observable, Pauli, StateVector};
use negsym::symmetry::{feature_claim, logit_claim};
use negsym::train::{param_shift_grad, train, Checkpoint, TrainConfig};
use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn layers_strategy(require_zz: bool) -> impl Strategy<Value = String> {
    prop::collection::vec(any::<bool>(), 1..=4).prop_filter_map("needs a ZZ layer", move |v| {
        if require_zz && !v.iter().any(|&z| z) {
            return None;
        }
        Some(v.iter().map(|&z| if z { "ZZ" } else { "XX" }).collect::<Vec<_>>().join("-"))
    })
}

fn pauli_strategy() -> impl Strategy<Value = Pauli> {
    prop::sample::select(vec![Pauli::X, Pauli::Y, Pauli::Z])
}

fn model_from(layers: &str, n: usize, seed: u64, measurement: Pauli) -> QnnModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    QnnModel::random(ArchitectureSpec::parse(layers, n).unwrap(), -PI, PI, &mut rng).with_measurement(measurement)
}

fn pattern(bits: &[bool]) -> BinaryPattern {
    BinaryPattern::new(bits.iter().map(|&b| b as u8).collect()).unwrap()
}

fn max_dev(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_qubit_kernel_matches_kronecker(n in 1usize..=4, t in 0usize..4, seed in any::<u64>()) {
        let t = t % n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary_2(&mut rng);
        let psi = random_state(n, &mut rng);
        let want = matvec(&embed_1q(&u, t, n), &psi);
        let mut s = StateVector::from_amplitudes(psi).unwrap();
        s.apply_1q(&Gate1Q::new("u", to_arr2(&u)), t).unwrap();
        prop_assert!(max_dev(s.amplitudes(), &want) <= 1e-12);
    }

    #[test]
    fn two_qubit_kernel_matches_kronecker(n in 2usize..=4, a in 0usize..4, b in 0usize..4, seed in any::<u64>(), kind in 0u8..4) {
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta = rand::Rng::gen_range(&mut rng, -PI..PI);
        let gate = match kind {
            0 => Gate2Q::xx(theta),
            1 => Gate2Q::zz(theta),
            2 => Gate2Q::cnot(),
            _ => Gate2Q::new("u", to_arr4(&random_unitary_4(&mut rng))),
        };
        let psi = random_state(n, &mut rng);
        let want = matvec(&embed_2q(&from4(&gate.matrix), a, b, n), &psi);
        let mut s = StateVector::from_amplitudes(psi).unwrap();
        s.apply_2q(&gate, a, b).unwrap();
        prop_assert!(max_dev(s.amplitudes(), &want) <= 1e-12);
    }

    #[test]
    fn gates_preserve_norm(n in 2usize..=6, seed in any::<u64>(), steps in 1usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = StateVector::from_amplitudes(random_state(n, &mut rng)).unwrap();
        for _ in 0..steps {
            let a = rand::Rng::gen_range(&mut rng, 0..n);
            let b = (a + rand::Rng::gen_range(&mut rng, 1..n)) % n;
            s.apply_1q(&Gate1Q::new("u", to_arr2(&random_unitary_2(&mut rng))), a).unwrap();
            s.apply_2q(&Gate2Q::new("v", to_arr4(&random_unitary_4(&mut rng))), a, b).unwrap();
        }
        prop_assert!((s.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn expectations_lie_in_unit_interval(n in 1usize..=5, seed in any::<u64>(), p in pauli_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = StateVector::from_amplitudes(random_state(n, &mut rng)).unwrap();
        for t in 0..n {
            let e = s.expectation(&Observable::single(p, t)).unwrap();
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&e));
        }
    }

    #[test]
    fn forward_matches_dense_circuit(layers in layers_strategy(false), n in 1usize..=3, seed in any::<u64>(), bits in prop::collection::vec(any::<bool>(), 3), p in pauli_strategy()) {
        let model = model_from(&layers, n, seed, p);
        let x = pattern(&bits[..n]);
        let q = n + 1;
        let h = from2(&Gate1Q::hadamard().matrix);
        let mut u = embed_1q(&h, READOUT, q);
        for (j, layer) in model.arch.layers().iter().enumerate() {
            for k in 0..n {
                let g = from4(&layer.gate(model.params.get(j, k)).matrix);
                u = matmul(&embed_2q(&g, READOUT, k + 1, q), &u);
            }
        }
        u = matmul(&embed_1q(&h, READOUT, q), &u);
        let mut index = 1 << n;
        for (k, &b) in bits[..n].iter().enumerate() {
            index |= (b as usize) << (n - 1 - k);
        }
        let psi: Vec<C> = u.iter().map(|row| row[index]).collect();
        let obs = embed_1q(&from2(&p.matrix()), READOUT, q);
        let opsi = matvec(&obs, &psi);
        let want: f64 = psi.iter().zip(&opsi).map(|(a, b)| (a.conj() * b).re).sum();
        prop_assert!((model.forward(&x).unwrap() - want).abs() <= 1e-12);
    }

    #[test]
    fn theorem1_holds_for_any_zz_architecture(layers in layers_strategy(true), n in 1usize..=6, seed in any::<u64>(), bits in prop::collection::vec(any::<bool>(), 6)) {
        let model = model_from(&layers, n, seed, Pauli::Z);
        let x = pattern(&bits[..n]);
        prop_assert!((model.forward(&x).unwrap() - model.forward(&x.negate()).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn theorem2_holds_for_any_architecture(layers in layers_strategy(false), n in 1usize..=6, seed in any::<u64>(), bits in prop::collection::vec(any::<bool>(), 6), p in pauli_strategy()) {
        let model = model_from(&layers, n, seed, p);
        let x = pattern(&bits[..n]);
        let dev = feature_claim(p).deviation(&model.features(&x).unwrap(), &model.features(&x.negate()).unwrap());
        prop_assert!(dev <= 1e-9, "{layers} {p}: {dev}");
    }

    #[test]
    fn logit_claims_hold_for_any_architecture(layers in layers_strategy(false), n in 1usize..=6, seed in any::<u64>(), bits in prop::collection::vec(any::<bool>(), 6), p in pauli_strategy()) {
        let model = model_from(&layers, n, seed, p);
        let x = pattern(&bits[..n]);
        let claim = logit_claim(&model.arch, p);
        let dev = claim.deviation(&[model.forward(&x).unwrap()], &[model.forward(&x.negate()).unwrap()]);
        prop_assert!(dev <= 1e-9, "{layers} {p} {claim:?}: {dev}");
    }

    #[test]
    fn branch_backend_matches_statevector(layers in layers_strategy(false), n in 1usize..=7, seed in any::<u64>(), bits in prop::collection::vec(any::<bool>(), 7), p in pauli_strategy()) {
        let model = model_from(&layers, n, seed, p);
        let x = pattern(&bits[..n]);
        let a = Backend::StateVector.forward(&model, &x).unwrap();
        let b = Backend::ProductBranch.forward(&model, &x).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
        let fa = Backend::StateVector.features(&model, &x).unwrap();
        let fb = Backend::ProductBranch.features(&model, &x).unwrap();
        for (u, v) in fa.iter().zip(&fb) {
            prop_assert!((u - v).abs() <= 1e-12);
        }
    }

    #[test]
    fn parameter_shift_matches_finite_difference(layers in layers_strategy(false), n in 1usize..=4, seed in any::<u64>(), bits in prop::collection::vec(any::<bool>(), 4), positive in any::<bool>(), idx in any::<prop::sample::Index>()) {
        let model = model_from(&layers, n, seed, Pauli::Z);
        let x = pattern(&bits[..n]);
        let y = if positive { 1 } else { -1 };
        prop_assume!((1.0 - y as f64 * model.forward(&x).unwrap()).abs() > 1e-2);
        let i = idx.index(model.params.len());
        let ps = param_shift_grad(&model, &x, y, i / n, i % n).unwrap();
        let fd = finite_difference(&model, &x, y, i, 1e-4);
        prop_assert!((ps - fd).abs() <= 1e-5, "{ps} vs {fd}");
    }

    #[test]
    fn negation_is_an_involution(v in any::<u64>(), n in 1usize..=20) {
        let x = BinaryPattern::from_index(v & ((1 << n) - 1), n);
        prop_assert_eq!(x.negate().negate(), x.clone());
        prop_assert_eq!(x.count_ones() + x.negate().count_ones(), n);
        prop_assert_eq!(x.to_string().parse::<BinaryPattern>().unwrap(), x);
    }

    #[test]
    fn checkpoint_round_trip_is_bit_exact(layers in layers_strategy(false), n in 1usize..=8, values in prop::collection::vec(-1e3f64..1e3, 32)) {
        let arch = ArchitectureSpec::parse(&layers, n).unwrap();
        let rows: Vec<Vec<f64>> = (0..arch.n_layers()).map(|j| (0..n).map(|k| values[(j * n + k) % 32] * 1.000_000_1f64.powi(k as i32)).collect()).collect();
        let model = QnnModel::new(arch, ParameterSet::from_rows(rows).unwrap(), Pauli::Y).unwrap();
        let ck = Checkpoint::for_qnn(&model, serde_json::Value::Null, 1, None, 3);
        let back = Checkpoint::from_json(&ck.to_json().unwrap()).unwrap().qnn().unwrap();
        for (a, b) in back.params.as_slice().iter().zip(model.params.as_slice()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn dataset_csv_round_trip(rows in prop::collection::vec((any::<u16>(), any::<bool>()), 1..40)) {
        let patterns: Vec<_> = rows.iter().map(|(v, _)| BinaryPattern::from_index(*v as u64, 16)).collect();
        let labels: Vec<i8> = rows.iter().map(|(_, p)| if *p { 1 } else { -1 }).collect();
        let ds = LabeledDataset::new("p", patterns, labels).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::write(&path, dataset_to_csv(&ds).unwrap()).unwrap();
        let back = negsym::data::read_dataset_csv(&path).unwrap();
        prop_assert_eq!(back.patterns(), ds.patterns());
        prop_assert_eq!(back.labels(), ds.labels());
    }
}

#[test]
fn symmetry_holds_after_every_training_epoch() {
    let ds = negsym::data::synthetic_dataset(5, 120, negsym::data::SyntheticRule::MaskParity, 3).unwrap();
    let cfg = TrainConfig {
        epochs: 8,
        patience: None,
        adam: negsym::train::AdamConfig {
            learning_rate: 0.05,
            ..Default::default()
        },
        ..Default::default()
    };
    let start = negsym::train::init_model(&QnnModel::zeros(ArchitectureSpec::parse("XX-ZZ-XX", 5).unwrap()), &cfg);
    let out = train(&start, &ds, Some(&ds), &cfg).unwrap();
    assert_eq!(out.history.len(), 9);
    for m in &out.history {
        assert!(m.max_logit_pair_diff.unwrap() <= 1e-9, "epoch {}", m.epoch);
        assert_eq!(m.test_acc, m.test_acc_negated);
    }
}
