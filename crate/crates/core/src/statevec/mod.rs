//! Dense statevector simulation.
//!
//! Amplitude index bit `n - 1 - q` holds qubit `q`, so qubit 0 is the most
//! significant position: `|q0 q1 … q_{n-1}⟩` sits at index `Σ q_k 2^{n-1-k}`.
//! Gates mutate the state in place and never build the full `2^n × 2^n`
//! operator.

mod gates;

pub use gates::{rotation_matrix, Gate1Q, Gate2Q, Pauli};

use num_complex::Complex64;
use rand::distributions::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Largest register the dense simulator will allocate.
pub const MAX_QUBITS: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

/// A Pauli measured on one or more qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observable {
    pub pauli: Pauli,
    pub targets: Vec<usize>,
}

impl Observable {
    pub fn new(pauli: Pauli, targets: Vec<usize>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::arg("observable needs at least one target"));
        }
        let mut seen = targets.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::arg("observable targets contain duplicates"));
        }
        Ok(Observable { pauli, targets })
    }

    pub fn single(pauli: Pauli, target: usize) -> Self {
        Observable {
            pauli,
            targets: vec![target],
        }
    }
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::arg(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    /// Computational basis state; `bits[0]` is qubit 0.
    pub fn basis_state(n_qubits: usize, bits: &[u8]) -> Result<Self> {
        if bits.len() != n_qubits {
            return Err(Error::arg(format!(
                "basis state expects {n_qubits} bits, got {}",
                bits.len()
            )));
        }
        let mut index = 0usize;
        for &b in bits {
            if b > 1 {
                return Err(Error::arg(format!("bit value {b} is not 0 or 1")));
            }
            index = (index << 1) | b as usize;
        }
        let mut state = Self::zero(n_qubits)?;
        state.amplitudes[0] = Complex64::new(0.0, 0.0);
        state.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    /// Wraps raw amplitudes. The caller is responsible for normalization.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::arg(format!(
                "amplitude count {len} is not a power of two ≥ 2"
            )));
        }
        Ok(StateVector {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    #[inline]
    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::arg(format!(
                "qubit {qubit} out of range for {}-qubit state",
                self.n_qubits
            )));
        }
        Ok(())
    }

    pub fn apply_1q(&mut self, gate: &Gate1Q, target: usize) -> Result<&mut Self> {
        self.check_qubit(target)?;
        let stride = self.mask(target);
        let [[m00, m01], [m10, m11]] = gate.matrix;
        for block in self.amplitudes.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x0, x1) = (*a0, *a1);
                *a0 = m00 * x0 + m01 * x1;
                *a1 = m10 * x0 + m11 * x1;
            }
        }
        Ok(self)
    }

    /// Applies a 4×4 unitary to `(q_a, q_b)`, `q_a` being the high bit of
    /// the gate's local basis. Diagonal gates take the phase-only path.
    pub fn apply_2q(&mut self, gate: &Gate2Q, q_a: usize, q_b: usize) -> Result<&mut Self> {
        self.check_qubit(q_a)?;
        self.check_qubit(q_b)?;
        if q_a == q_b {
            return Err(Error::arg(format!(
                "two-qubit gate needs distinct qubits, got {q_a} twice"
            )));
        }
        if gate.diagonal {
            self.apply_2q_diagonal(gate, q_a, q_b);
        } else {
            self.apply_2q_generic(gate, q_a, q_b);
        }
        Ok(self)
    }

    pub(crate) fn apply_2q_generic(&mut self, gate: &Gate2Q, q_a: usize, q_b: usize) {
        let ma = self.mask(q_a);
        let mb = self.mask(q_b);
        let m = &gate.matrix;
        for i in 0..self.amplitudes.len() {
            if i & (ma | mb) != 0 {
                continue;
            }
            let idx = [i, i | mb, i | ma, i | ma | mb];
            let x = idx.map(|k| self.amplitudes[k]);
            for (r, &k) in idx.iter().enumerate() {
                self.amplitudes[k] = m[r][0] * x[0] + m[r][1] * x[1] + m[r][2] * x[2] + m[r][3] * x[3];
            }
        }
    }

    pub(crate) fn apply_2q_diagonal(&mut self, gate: &Gate2Q, q_a: usize, q_b: usize) {
        let ma = self.mask(q_a);
        let mb = self.mask(q_b);
        let d = [
            gate.matrix[0][0],
            gate.matrix[1][1],
            gate.matrix[2][2],
            gate.matrix[3][3],
        ];
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            let local = (((i & ma) != 0) as usize) << 1 | ((i & mb) != 0) as usize;
            *amp *= d[local];
        }
    }

    /// Probability that `qubit` reads 0.
    fn prob_zero(&self, qubit: usize) -> f64 {
        let m = self.mask(qubit);
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Copy with each target rotated so that measuring Z reads `pauli`.
    fn rotated_for(&self, pauli: Pauli, targets: &[usize]) -> Result<StateVector> {
        let mut scratch = self.clone();
        match pauli {
            Pauli::Z => {}
            Pauli::X => {
                let h = Gate1Q::hadamard();
                for &t in targets {
                    scratch.apply_1q(&h, t)?;
                }
            }
            Pauli::Y => {
                let sdg = Gate1Q::s_dagger();
                let h = Gate1Q::hadamard();
                for &t in targets {
                    scratch.apply_1q(&sdg, t)?.apply_1q(&h, t)?;
                }
            }
        }
        Ok(scratch)
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for &t in targets {
            self.check_qubit(t)?;
        }
        let mut seen = targets.to_vec();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::arg("duplicate measurement targets"));
        }
        Ok(())
    }

    /// ⟨ψ|P_q|ψ⟩ for a single-target observable.
    pub fn expectation(&self, obs: &Observable) -> Result<f64> {
        let [target] = obs.targets[..] else {
            return Err(Error::arg(
                "expectation takes a single-target observable; use expectation_vector",
            ));
        };
        self.check_qubit(target)?;
        if obs.pauli == Pauli::Z {
            return Ok(2.0 * self.prob_zero(target) - 1.0);
        }
        let rotated = self.rotated_for(obs.pauli, &[target])?;
        Ok(2.0 * rotated.prob_zero(target) - 1.0)
    }

    /// Single-qubit expectations of `pauli` on each of `targets`, in order.
    pub fn expectation_vector(&self, pauli: Pauli, targets: &[usize]) -> Result<Vec<f64>> {
        self.check_targets(targets)?;
        // local rotations on other qubits leave each marginal untouched, so one copy serves all targets
        let rotated;
        let source = if pauli == Pauli::Z {
            self
        } else {
            rotated = self.rotated_for(pauli, targets)?;
            &rotated
        };
        let masks: Vec<usize> = targets.iter().map(|&t| source.mask(t)).collect();
        let mut acc = vec![0.0f64; targets.len()];
        for (i, a) in source.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            for (slot, &m) in acc.iter_mut().zip(&masks) {
                if i & m == 0 {
                    *slot += p;
                } else {
                    *slot -= p;
                }
            }
        }
        Ok(acc)
    }

    /// Mean of `shots` ±1 outcomes drawn from the Born distribution.
    pub fn sample_shots(&self, obs: &Observable, shots: usize, seed: u64) -> Result<f64> {
        if shots == 0 {
            return Err(Error::arg("shots must be at least 1"));
        }
        let exact = self.expectation(obs)?;
        let p_plus = ((1.0 + exact) / 2.0).clamp(0.0, 1.0);
        let coin = Bernoulli::new(p_plus).map_err(|e| Error::arg(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let plus = coin.sample_iter(&mut rng).take(shots).filter(|&b| b).count();
        Ok((2 * plus) as f64 / shots as f64 - 1.0)
    }
}
