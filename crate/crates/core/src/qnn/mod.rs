//! Parity-gate quantum classifier.
//!
//! Qubit 0 is the readout, prepared in |1⟩; qubits `1..=N` hold the pattern.
//! The circuit is `H(readout)`, then every layer in listed order couples the
//! readout to data qubits `1..=N` in ascending order, then `H(readout)`.

mod arch;
mod branch;

pub use arch::{ArchitectureSpec, Layer, LayerString};

use rand::distributions::{Distribution, Uniform};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::BinaryPattern;
use crate::statevec::{Gate1Q, Observable, Pauli, StateVector};
use crate::{Error, Result};

pub const READOUT: usize = 0;

/// Gate angles, row `j` for layer `j`, column `k` for data qubit `k + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    n_layers: usize,
    n_data_qubits: usize,
    values: Vec<f64>,
}

impl ParameterSet {
    pub fn zeros(n_layers: usize, n_data_qubits: usize) -> Self {
        ParameterSet {
            n_layers,
            n_data_qubits,
            values: vec![0.0; n_layers * n_data_qubits],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_layers = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::arg("parameter rows have unequal lengths"));
        }
        Ok(ParameterSet {
            n_layers,
            n_data_qubits: width,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn uniform<R: Rng + ?Sized>(
        n_layers: usize,
        n_data_qubits: usize,
        low: f64,
        high: f64,
        rng: &mut R,
    ) -> Self {
        let dist = Uniform::new(low, high);
        ParameterSet {
            n_layers,
            n_data_qubits,
            values: (0..n_layers * n_data_qubits).map(|_| dist.sample(rng)).collect(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_layers, self.n_data_qubits)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, layer: usize, qubit: usize) -> f64 {
        self.values[layer * self.n_data_qubits + qubit]
    }

    pub fn set(&mut self, layer: usize, qubit: usize, value: f64) {
        self.values[layer * self.n_data_qubits + qubit] = value;
    }

    pub fn row(&self, layer: usize) -> &[f64] {
        let start = layer * self.n_data_qubits;
        &self.values[start..start + self.n_data_qubits]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_layers).map(|j| self.row(j).to_vec()).collect()
    }

    /// Row-major flat view.
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QnnModel {
    pub arch: ArchitectureSpec,
    pub params: ParameterSet,
    pub measurement: Pauli,
}

/// How circuit expectations are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Full `2^(N+1)` statevector, gate by gate.
    #[default]
    StateVector,
    /// Exact readout-branch decomposition, linear in N (see [`branch`]).
    ProductBranch,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "statevector" | "state-vector" => Ok(Backend::StateVector),
            "branch" | "product-branch" => Ok(Backend::ProductBranch),
            other => Err(Error::arg(format!("unknown backend `{other}`"))),
        }
    }
}

impl Backend {
    pub fn forward(self, model: &QnnModel, pattern: &BinaryPattern) -> Result<f64> {
        match self {
            Backend::StateVector => model.forward(pattern),
            Backend::ProductBranch => branch::readout_expectation(model, pattern, model.params.as_slice()),
        }
    }

    pub fn features(self, model: &QnnModel, pattern: &BinaryPattern) -> Result<Vec<f64>> {
        match self {
            Backend::StateVector => model.features(pattern),
            Backend::ProductBranch => branch::data_expectations(model, pattern),
        }
    }

    /// Readout expectation with angle `index` (row-major) replaced by `value`.
    pub(crate) fn forward_with_angle(
        self,
        model: &QnnModel,
        pattern: &BinaryPattern,
        index: usize,
        value: f64,
    ) -> Result<f64> {
        match self {
            Backend::StateVector => {
                let mut shifted = model.clone();
                shifted.params.as_mut_slice()[index] = value;
                shifted.forward(pattern)
            }
            Backend::ProductBranch => {
                let mut angles = model.params.as_slice().to_vec();
                angles[index] = value;
                branch::readout_expectation(model, pattern, &angles)
            }
        }
    }
}

impl QnnModel {
    pub fn new(arch: ArchitectureSpec, params: ParameterSet, measurement: Pauli) -> Result<Self> {
        if params.shape() != (arch.n_layers(), arch.n_data_qubits()) {
            return Err(Error::arg(format!(
                "parameter shape {:?} does not match architecture {arch} ({} layers)",
                params.shape(),
                arch.n_layers()
            )));
        }
        Ok(QnnModel {
            arch,
            params,
            measurement,
        })
    }

    pub fn zeros(arch: ArchitectureSpec) -> Self {
        let params = ParameterSet::zeros(arch.n_layers(), arch.n_data_qubits());
        QnnModel {
            arch,
            params,
            measurement: Pauli::Z,
        }
    }

    /// Angles drawn from `Uniform(low, high)`.
    pub fn random<R: Rng + ?Sized>(arch: ArchitectureSpec, low: f64, high: f64, rng: &mut R) -> Self {
        let params = ParameterSet::uniform(arch.n_layers(), arch.n_data_qubits(), low, high, rng);
        QnnModel {
            arch,
            params,
            measurement: Pauli::Z,
        }
    }

    pub fn with_measurement(mut self, measurement: Pauli) -> Self {
        self.measurement = measurement;
        self
    }

    fn check_pattern(&self, pattern: &BinaryPattern) -> Result<()> {
        if pattern.len() != self.arch.n_data_qubits() {
            return Err(Error::arg(format!(
                "pattern has {} bits but the model has {} data qubits",
                pattern.len(),
                self.arch.n_data_qubits()
            )));
        }
        Ok(())
    }

    /// |1, x⟩.
    pub fn build_input(&self, pattern: &BinaryPattern) -> Result<StateVector> {
        self.check_pattern(pattern)?;
        build_input(pattern)
    }

    pub fn apply_circuit(&self, state: &mut StateVector) -> Result<()> {
        if state.n_qubits() != self.arch.n_qubits() {
            return Err(Error::arg(format!(
                "state has {} qubits, circuit expects {}",
                state.n_qubits(),
                self.arch.n_qubits()
            )));
        }
        let h = Gate1Q::hadamard();
        state.apply_1q(&h, READOUT)?;
        for (j, layer) in self.arch.layers().iter().enumerate() {
            for (k, &theta) in self.params.row(j).iter().enumerate() {
                state.apply_2q(&layer.gate(theta), READOUT, k + 1)?;
            }
        }
        state.apply_1q(&h, READOUT)?;
        Ok(())
    }

    pub fn output_state(&self, pattern: &BinaryPattern) -> Result<StateVector> {
        let mut state = self.build_input(pattern)?;
        self.apply_circuit(&mut state)?;
        Ok(state)
    }

    /// Exact readout expectation of `self.measurement`, the logit in [-1, 1].
    pub fn forward(&self, pattern: &BinaryPattern) -> Result<f64> {
        self.output_state(pattern)?
            .expectation(&Observable::single(self.measurement, READOUT))
    }

    pub fn forward_sampled(&self, pattern: &BinaryPattern, shots: usize, seed: u64) -> Result<f64> {
        if shots == 0 {
            return Err(Error::arg("shots must be at least 1"));
        }
        self.output_state(pattern)?
            .sample_shots(&Observable::single(self.measurement, READOUT), shots, seed)
    }

    /// Per-data-qubit expectations of `self.measurement`.
    pub fn features(&self, pattern: &BinaryPattern) -> Result<Vec<f64>> {
        let targets: Vec<usize> = (1..=self.arch.n_data_qubits()).collect();
        self.output_state(pattern)?
            .expectation_vector(self.measurement, &targets)
    }

    pub fn predict(&self, pattern: &BinaryPattern) -> Result<i8> {
        Ok(threshold(self.forward(pattern)?))
    }
}

/// |1⟩ ⊗ |x⟩ on `x.len() + 1` qubits.
pub fn build_input(pattern: &BinaryPattern) -> Result<StateVector> {
    let mut bits = Vec::with_capacity(pattern.len() + 1);
    bits.push(1);
    bits.extend_from_slice(pattern.bits());
    StateVector::basis_state(bits.len(), &bits)
}

/// Class decision at τ = 0; a logit of exactly 0 maps to +1.
pub fn threshold(logit: f64) -> i8 {
    if logit >= 0.0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pat(s: &str) -> BinaryPattern {
        s.parse().unwrap()
    }

    fn model(arch: &str, rows: Vec<Vec<f64>>) -> QnnModel {
        let n = rows[0].len();
        QnnModel::new(
            ArchitectureSpec::parse(arch, n).unwrap(),
            ParameterSet::from_rows(rows).unwrap(),
            Pauli::Z,
        )
        .unwrap()
    }

    #[test]
    fn build_input_examples() {
        let s = build_input(&pat("0")).unwrap();
        assert_eq!(s.n_qubits(), 2);
        assert_eq!(s.amplitudes()[2], Complex64::new(1.0, 0.0));
        let s = build_input(&pat("11")).unwrap();
        assert_eq!(s.amplitudes()[7], Complex64::new(1.0, 0.0));
        let s = build_input(&BinaryPattern::zeros(16)).unwrap();
        assert_eq!(s.amplitudes()[1 << 16], Complex64::new(1.0, 0.0));

        let m = QnnModel::zeros(ArchitectureSpec::parse("ZZ", 3).unwrap());
        assert!(m.build_input(&pat("01")).is_err());
    }

    #[test]
    fn zero_angles_give_identity() {
        let m = QnnModel::zeros(ArchitectureSpec::parse("XX-ZZ", 3).unwrap());
        let input = m.build_input(&pat("101")).unwrap();
        let out = m.output_state(&pat("101")).unwrap();
        for (a, b) in input.amplitudes().iter().zip(out.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((m.forward(&pat("101")).unwrap() + 1.0).abs() < 1e-12);
        let g = m.features(&pat("101")).unwrap();
        for (gk, xk) in g.iter().zip([1.0, 0.0, 1.0]) {
            assert!((gk - (1.0 - 2.0 * xk)).abs() < 1e-12);
        }
    }

    #[test]
    fn single_zz_readout_is_minus_cos() {
        for t in [-2.5, -0.3, 0.0, 0.7, 1.9, 3.1] {
            let m = model("ZZ", vec![vec![t]]);
            let f = m.forward(&pat("0")).unwrap();
            assert!((f + t.cos()).abs() < 1e-12, "t={t}: {f}");
        }
    }

    #[test]
    fn zz_xx_amplitudes_closed_form() {
        // Independent 4×4 oracle: H·XX(t1)·ZZ(t2)·H acting on |1,0⟩ in closed form.
        let (t2, t1) = (0.9, -1.7);
        let m = model("ZZ-XX", vec![vec![t2], vec![t1]]);
        let out = m.output_state(&pat("0")).unwrap();
        let (s1, c1) = (t1 / 2.0).sin_cos();
        let (s2, c2) = (t2 / 2.0).sin_cos();
        let want = [
            Complex64::new(0.0, -c1 * s2),
            Complex64::new(-s1 * s2, 0.0),
            Complex64::new(c1 * c2, 0.0),
            Complex64::new(0.0, s1 * c2),
        ];
        for (a, b) in out.amplitudes().iter().zip(&want) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn xx_only_is_constant_minus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = QnnModel::random(ArchitectureSpec::parse("XX", 3).unwrap(), -3.0, 3.0, &mut rng);
        for s in ["000", "011", "110"] {
            assert!((m.forward(&pat(s)).unwrap() + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn predict_threshold_and_tie() {
        assert_eq!(threshold(0.3), 1);
        assert_eq!(threshold(-0.3), -1);
        assert_eq!(threshold(0.0), 1);
        let m = QnnModel::zeros(ArchitectureSpec::parse("ZZ", 2).unwrap());
        assert_eq!(m.predict(&pat("10")).unwrap(), -1);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let arch = ArchitectureSpec::parse("XX-ZZ", 3).unwrap();
        assert!(QnnModel::new(arch.clone(), ParameterSet::zeros(1, 3), Pauli::Z).is_err());
        let m = QnnModel::zeros(arch);
        let mut small = StateVector::zero(2).unwrap();
        assert!(m.apply_circuit(&mut small).is_err());
    }

    #[test]
    fn sampled_forward() {
        let m = QnnModel::zeros(ArchitectureSpec::parse("XX-ZZ", 2).unwrap());
        assert_eq!(m.forward_sampled(&pat("01"), 33, 1).unwrap(), -1.0);
        assert!(m.forward_sampled(&pat("01"), 0, 1).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = QnnModel::random(ArchitectureSpec::parse("XX-ZZ", 3).unwrap(), -3.0, 3.0, &mut rng);
        let x = pat("101");
        let exact = m.forward(&x).unwrap();
        let est = m.forward_sampled(&x, 100_000, 2).unwrap();
        assert!((est - exact).abs() <= 0.02, "{est} vs {exact}");
        assert_eq!(est, m.forward_sampled(&x, 100_000, 2).unwrap());
    }

    #[test]
    fn backend_parse() {
        assert_eq!("branch".parse::<Backend>().unwrap(), Backend::ProductBranch);
        assert_eq!("StateVector".parse::<Backend>().unwrap(), Backend::StateVector);
        assert!("gpu".parse::<Backend>().is_err());
    }
}
