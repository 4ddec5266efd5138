//! Executable negation-symmetry checks.
//!
//! Each check samples random angles and patterns, evaluates the logit or the
//! data-qubit features on `x` and on its complement `x̃`, and records the
//! worst violation of a [`Claim`] as a [`SymmetryReport`].

mod stats;

pub use stats::{feature_pair_stats, logit_pair_stats, PairStats};

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::BinaryPattern;
use crate::qnn::{ArchitectureSpec, Backend, QnnModel, READOUT};
use crate::statevec::{Gate1Q, Gate2Q, Observable, Pauli, StateVector};
use crate::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const BELL_TOLERANCE: f64 = 1e-12;

/// The four architectures of the block-wise table.
pub const TABLE1_ARCHITECTURES: [&str; 4] = ["XX", "ZZ", "XX-ZZ", "ZZ-XX"];
/// Architecture used for the representation grid.
pub const TABLE2_ARCHITECTURE: &str = "XX-ZZ";

/// Relation asserted between the value on `x` and on `x̃`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Claim {
    /// v(x) = v(x̃)
    Equal,
    /// v(x) = -v(x̃)
    Antisymmetric,
    /// v(x) = v(x̃) = c
    Constant(f64),
    /// v(x) = v(x̃) = 0
    Zero,
}

impl Claim {
    /// Worst componentwise violation for one pair.
    pub fn deviation(self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(&u, &v)| match self {
                Claim::Equal => (u - v).abs(),
                Claim::Antisymmetric => (u + v).abs(),
                Claim::Constant(c) => (u - c).abs().max((v - c).abs()),
                Claim::Zero => u.abs().max(v.abs()),
            })
            .fold(0.0, f64::max)
    }

    pub fn describe(self, symbol: &str) -> String {
        match self {
            Claim::Equal => format!("{symbol}(x) = {symbol}(x~)"),
            Claim::Antisymmetric => format!("{symbol}(x) = -{symbol}(x~)"),
            Claim::Constant(c) => format!("{symbol}(x) = {symbol}(x~) = {c}"),
            Claim::Zero => format!("{symbol}(x) = {symbol}(x~) = 0"),
        }
    }
}

/// What a report measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    /// Readout expectation f.
    Logit,
    /// Data-qubit expectation vector g.
    Features,
    /// Joint outcome distribution of a Bell pair, compared to (1/2, 0, 0, 1/2).
    Bell,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub architecture: String,
    pub measurement: Pauli,
    pub quantity: Quantity,
    pub claim: Claim,
    /// Data-qubit counts sampled.
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl SymmetryReport {
    fn new(
        architecture: String,
        measurement: Pauli,
        quantity: Quantity,
        claim: Claim,
        sizes: Vec<usize>,
        trials: usize,
        max_deviation: f64,
        tolerance: f64,
    ) -> Self {
        SymmetryReport {
            architecture,
            measurement,
            quantity,
            claim,
            sizes,
            trials,
            max_deviation,
            tolerance,
            // NaN deviations fail
            pass: max_deviation <= tolerance,
        }
    }
}

/// Source of logits and features. [`Backend`] is the real one; tests swap
/// in faulty evaluators to confirm the checks can fail.
pub trait Evaluator {
    fn logit(&self, model: &QnnModel, x: &BinaryPattern) -> Result<f64>;
    fn features(&self, model: &QnnModel, x: &BinaryPattern) -> Result<Vec<f64>>;
}

impl Evaluator for Backend {
    fn logit(&self, model: &QnnModel, x: &BinaryPattern) -> Result<f64> {
        self.forward(model, x)
    }

    fn features(&self, model: &QnnModel, x: &BinaryPattern) -> Result<Vec<f64>> {
        Backend::features(*self, model, x)
    }
}

/// Adds `bias · x₀` to every output. Breaks both theorems whenever the bias
/// is nonzero; exists only to exercise failure paths.
#[derive(Clone, Copy, Debug)]
pub struct InjectedBias<E> {
    pub inner: E,
    pub bias: f64,
}

impl<E: Evaluator> Evaluator for InjectedBias<E> {
    fn logit(&self, model: &QnnModel, x: &BinaryPattern) -> Result<f64> {
        Ok(self.inner.logit(model, x)? + self.bias * x.bits()[0] as f64)
    }

    fn features(&self, model: &QnnModel, x: &BinaryPattern) -> Result<Vec<f64>> {
        let shift = self.bias * x.bits()[0] as f64;
        Ok(self.inner.features(model, x)?.into_iter().map(|g| g + shift).collect())
    }
}

/// Block-wise claim for the readout logit.
pub fn logit_claim(arch: &ArchitectureSpec, measurement: Pauli) -> Claim {
    match (measurement, arch.has_zz()) {
        (Pauli::Z, true) => Claim::Equal,
        (Pauli::Z, false) => Claim::Constant(-1.0),
        (Pauli::X, _) => Claim::Zero,
        (Pauli::Y, true) => Claim::Antisymmetric,
        (Pauli::Y, false) => Claim::Zero,
    }
}

/// Claim for the data-qubit feature vector.
pub fn feature_claim(measurement: Pauli) -> Claim {
    match measurement {
        Pauli::X => Claim::Zero,
        Pauli::Y | Pauli::Z => Claim::Antisymmetric,
    }
}

fn random_pattern<R: Rng>(n: usize, rng: &mut R) -> BinaryPattern {
    BinaryPattern::new((0..n).map(|_| rng.gen_range(0..=1u8)).collect()).expect("bits are 0/1")
}

/// A cell of a verification grid.
#[derive(Clone, Debug)]
pub struct CellSpec<'a> {
    pub layers: &'a str,
    pub measurement: Pauli,
    pub quantity: Quantity,
    pub claim: Claim,
    pub sizes: &'a [usize],
    /// Trials per size.
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
}

/// Samples θ ~ U(-π, π) elementwise and x uniform on {0,1}^N, fresh for
/// every trial, and reports the worst violation of `cell.claim`.
pub fn check_cell(eval: &dyn Evaluator, cell: &CellSpec) -> Result<SymmetryReport> {
    if cell.trials == 0 {
        return Err(Error::arg("trials must be at least 1"));
    }
    if cell.sizes.is_empty() {
        return Err(Error::arg("no qubit counts given"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cell.seed);
    let mut worst = 0.0f64;
    for &n in cell.sizes {
        let arch = ArchitectureSpec::parse(cell.layers, n)?;
        for _ in 0..cell.trials {
            let model = QnnModel::random(arch.clone(), -PI, PI, &mut rng).with_measurement(cell.measurement);
            let x = random_pattern(n, &mut rng);
            let xn = x.negate();
            let dev = match cell.quantity {
                Quantity::Logit => cell.claim.deviation(&[eval.logit(&model, &x)?], &[eval.logit(&model, &xn)?]),
                Quantity::Features => cell.claim.deviation(&eval.features(&model, &x)?, &eval.features(&model, &xn)?),
                Quantity::Bell => return Err(Error::arg("Bell records are produced by bell_report")),
            };
            // propagate NaN rather than letting max() swallow it
            worst = if dev.is_nan() { f64::NAN } else { worst.max(dev) };
        }
    }
    let arch_name = ArchitectureSpec::parse(cell.layers, cell.sizes[0])?.layer_string();
    Ok(SymmetryReport::new(
        arch_name,
        cell.measurement,
        cell.quantity,
        cell.claim,
        cell.sizes.to_vec(),
        cell.trials * cell.sizes.len(),
        worst,
        cell.tolerance,
    ))
}

fn cell_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Z-measured logit symmetry, f(x) = f(x̃). Architectures without a ZZ
/// layer are checked against their table row instead (constant -1).
pub fn check_theorem1(layers: &str, n: usize, trials: usize, seed: u64, tol: f64) -> Result<SymmetryReport> {
    let arch = ArchitectureSpec::parse(layers, n)?;
    check_cell(
        &Backend::StateVector,
        &CellSpec {
            layers,
            measurement: Pauli::Z,
            quantity: Quantity::Logit,
            claim: logit_claim(&arch, Pauli::Z),
            sizes: &[n],
            trials,
            seed,
            tolerance: tol,
        },
    )
}

/// Z-measured feature antisymmetry, g(x) = -g(x̃), checked in the ∞-norm.
pub fn check_theorem2(layers: &str, n: usize, trials: usize, seed: u64, tol: f64) -> Result<SymmetryReport> {
    check_theorem2_with(layers, n, Pauli::Z, trials, seed, tol)
}

/// Feature claim for any measurement basis.
pub fn check_theorem2_with(
    layers: &str,
    n: usize,
    measurement: Pauli,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<SymmetryReport> {
    check_cell(
        &Backend::StateVector,
        &CellSpec {
            layers,
            measurement,
            quantity: Quantity::Features,
            claim: feature_claim(measurement),
            sizes: &[n],
            trials,
            seed,
            tolerance: tol,
        },
    )
}

/// The 12 cells (architecture × measurement) of the block-wise logit table,
/// in table order.
pub fn check_table1_grid(eval: &dyn Evaluator, sizes: &[usize], trials: usize, seed: u64, tol: f64) -> Result<Vec<SymmetryReport>> {
    let mut out = Vec::with_capacity(12);
    for (a, layers) in TABLE1_ARCHITECTURES.iter().enumerate() {
        let arch = ArchitectureSpec::parse(layers, 1)?;
        for (m, meas) in [Pauli::Z, Pauli::X, Pauli::Y].into_iter().enumerate() {
            out.push(check_cell(
                eval,
                &CellSpec {
                    layers,
                    measurement: meas,
                    quantity: Quantity::Logit,
                    claim: logit_claim(&arch, meas),
                    sizes,
                    trials,
                    seed: cell_seed(seed, (3 * a + m) as u64),
                    tolerance: tol,
                },
            )?);
        }
    }
    Ok(out)
}

/// The 3 representation cells (Z, X, Y).
pub fn check_table2_grid(eval: &dyn Evaluator, sizes: &[usize], trials: usize, seed: u64, tol: f64) -> Result<Vec<SymmetryReport>> {
    [Pauli::Z, Pauli::X, Pauli::Y]
        .into_iter()
        .enumerate()
        .map(|(m, meas)| {
            check_cell(
                eval,
                &CellSpec {
                    layers: TABLE2_ARCHITECTURE,
                    measurement: meas,
                    quantity: Quantity::Features,
                    claim: feature_claim(meas),
                    sizes,
                    trials,
                    seed: cell_seed(seed, 100 + m as u64),
                    tolerance: tol,
                },
            )
        })
        .collect()
}

/// Checks a fixed model on given patterns, for parameter-independence
/// checks on trained models.
pub fn check_model(
    eval: &dyn Evaluator,
    model: &QnnModel,
    patterns: &[BinaryPattern],
    quantity: Quantity,
    tol: f64,
) -> Result<SymmetryReport> {
    if patterns.is_empty() {
        return Err(Error::arg("no patterns to check"));
    }
    let (claim, mut worst) = match quantity {
        Quantity::Logit => (logit_claim(&model.arch, model.measurement), 0.0f64),
        Quantity::Features => (feature_claim(model.measurement), 0.0f64),
        Quantity::Bell => return Err(Error::arg("Bell records are produced by bell_report")),
    };
    for x in patterns {
        let xn = x.negate();
        let dev = match quantity {
            Quantity::Logit => claim.deviation(&[eval.logit(model, x)?], &[eval.logit(model, &xn)?]),
            _ => claim.deviation(&eval.features(model, x)?, &eval.features(model, &xn)?),
        };
        worst = if dev.is_nan() { f64::NAN } else { worst.max(dev) };
    }
    Ok(SymmetryReport::new(
        model.arch.layer_string(),
        model.measurement,
        quantity,
        claim,
        vec![model.arch.n_data_qubits()],
        patterns.len(),
        worst,
        tol,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BellBasis {
    Computational,
    Fourier,
}

/// Joint outcome probabilities of CNOT·(H⊗I)|00⟩ measured in `basis`, in the
/// order (00, 01, 10, 11) or (++, +-, -+, --).
pub fn bell_probabilities(basis: BellBasis) -> [f64; 4] {
    let mut s = StateVector::zero(2).expect("two qubits");
    let h = Gate1Q::hadamard();
    s.apply_1q(&h, 0).expect("valid target");
    s.apply_2q(&Gate2Q::cnot(), 0, 1).expect("valid targets");
    if basis == BellBasis::Fourier {
        s.apply_1q(&h, 0).expect("valid target");
        s.apply_1q(&h, 1).expect("valid target");
    }
    let p = s.probabilities();
    [p[0], p[1], p[2], p[3]]
}

/// One Bell record: worst distance of the distribution from (1/2, 0, 0, 1/2).
/// The measurement field names the basis (Z computational, X Fourier).
pub fn bell_report(basis: BellBasis) -> SymmetryReport {
    let p = bell_probabilities(basis);
    let dev = p
        .iter()
        .zip([0.5, 0.0, 0.0, 0.5])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let meas = match basis {
        BellBasis::Computational => Pauli::Z,
        BellBasis::Fourier => Pauli::X,
    };
    SymmetryReport::new("bell".into(), meas, Quantity::Bell, Claim::Equal, vec![2], 1, dev, BELL_TOLERANCE)
}

/// Table 1 (12), Table 2 (3) and the two Bell records, 17 in total.
pub fn full_verification(eval: &dyn Evaluator, sizes: &[usize], trials: usize, seed: u64, tol: f64) -> Result<Vec<SymmetryReport>> {
    let mut out = check_table1_grid(eval, sizes, trials, seed, tol)?;
    out.extend(check_table2_grid(eval, sizes, trials, seed, tol)?);
    out.push(bell_report(BellBasis::Computational));
    out.push(bell_report(BellBasis::Fourier));
    Ok(out)
}

/// Readout expectation of the circuit with every parity gate
/// `exp(-iθ/2 P⊗P)` replaced by the local pair `R_P(θ) ⊗ R_P(θ)`.
pub fn local_pair_forward(model: &QnnModel, x: &BinaryPattern) -> Result<f64> {
    let mut s = model.build_input(x)?;
    let h = Gate1Q::hadamard();
    s.apply_1q(&h, READOUT)?;
    for (j, layer) in model.arch.layers().iter().enumerate() {
        for (k, &theta) in model.params.row(j).iter().enumerate() {
            let r = Gate1Q::rotation(layer.pauli(), theta);
            s.apply_2q(&Gate2Q::product(&r, &r), READOUT, k + 1)?;
        }
    }
    s.apply_1q(&h, READOUT)?;
    s.expectation(&Observable::single(model.measurement, READOUT))
}

/// Z-measured logit symmetry of the local-pair control circuit. A report
/// with `max_deviation > 0.1` would mean the control breaks the symmetry.
pub fn check_local_pair_ablation(layers: &str, n: usize, trials: usize, seed: u64) -> Result<SymmetryReport> {
    struct LocalPair;
    impl Evaluator for LocalPair {
        fn logit(&self, model: &QnnModel, x: &BinaryPattern) -> Result<f64> {
            local_pair_forward(model, x)
        }
        fn features(&self, _: &QnnModel, _: &BinaryPattern) -> Result<Vec<f64>> {
            Err(Error::arg("the local-pair control has no feature map"))
        }
    }
    let mut r = check_cell(
        &LocalPair,
        &CellSpec {
            layers,
            measurement: Pauli::Z,
            quantity: Quantity::Logit,
            claim: Claim::Equal,
            sizes: &[n],
            trials,
            seed,
            tolerance: DEFAULT_TOLERANCE,
        },
    )?;
    r.architecture = format!("local({})", r.architecture);
    Ok(r)
}

/// Plain-text rendering: one line per record.
pub fn render_table(reports: &[SymmetryReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<14} {:<4} {:<9} {:<28} {:>12} {:>7}  {}",
        "architecture", "M", "quantity", "claim", "max dev", "trials", "result"
    );
    for r in reports {
        let claim = match r.quantity {
            Quantity::Logit => r.claim.describe("f"),
            Quantity::Features => r.claim.describe("g"),
            Quantity::Bell => "P = (1/2, 0, 0, 1/2)".to_string(),
        };
        let quantity = match r.quantity {
            Quantity::Logit => "logit",
            Quantity::Features => "features",
            Quantity::Bell => "bell",
        };
        let _ = writeln!(
            out,
            "{:<14} {:<4} {:<9} {:<28} {:>12.3e} {:>7}  {}",
            r.architecture,
            r.measurement,
            quantity,
            claim,
            r.max_deviation,
            r.trials,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    out
}
