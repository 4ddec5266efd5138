//! Exact evaluation without the `2^(N+1)` statevector.
//!
//! Every gate in a layer is `exp(-i θ_k/2 P_0 P_k)` with the same readout
//! Pauli `P_0`, so a whole layer equals
//! `Π₊ ⊗ ⊗_k R_P(θ_k) + Π₋ ⊗ ⊗_k R_P(-θ_k)` where `Π±` project the readout
//! onto the ±1 eigenspaces of `P`. Starting from the product input `|1, x⟩`,
//! the state stays a sum of at most `2^L` branches, each a readout vector
//! times a product state of the data register. Expectations then reduce to
//! sums over branch pairs of products of single-qubit overlaps.

use num_complex::Complex64;

use super::QnnModel;
use crate::data::BinaryPattern;
use crate::statevec::{rotation_matrix, Gate1Q, Pauli};
use crate::{Error, Result};

type Spinor = [Complex64; 2];
type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

struct Branch {
    readout: Spinor,
    data: Vec<Spinor>,
}

#[inline]
fn apply(m: &Mat2, v: &Spinor) -> Spinor {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

#[inline]
fn inner(a: &Spinor, b: &Spinor) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// (v + sign·P v) / 2
fn project(pauli: Pauli, sign: f64, v: &Spinor) -> Spinor {
    let pv = apply(&pauli.matrix(), v);
    [(v[0] + pv[0] * sign) * 0.5, (v[1] + pv[1] * sign) * 0.5]
}

fn evolve(model: &QnnModel, pattern: &BinaryPattern, angles: &[f64]) -> Result<Vec<Branch>> {
    let n = model.arch.n_data_qubits();
    if pattern.len() != n {
        return Err(Error::arg(format!(
            "pattern has {} bits but the model has {n} data qubits",
            pattern.len()
        )));
    }
    if angles.len() != model.arch.n_params() {
        return Err(Error::arg("angle count does not match the architecture"));
    }
    let h = Gate1Q::hadamard().matrix;
    let data = pattern
        .bits()
        .iter()
        .map(|&b| if b == 0 { [ONE, ZERO] } else { [ZERO, ONE] })
        .collect();
    let mut branches = vec![Branch {
        readout: apply(&h, &[ZERO, ONE]),
        data,
    }];

    for (j, layer) in model.arch.layers().iter().enumerate() {
        let pauli = layer.pauli();
        let row = &angles[j * n..(j + 1) * n];
        let mut next = Vec::with_capacity(branches.len() * 2);
        for branch in &branches {
            for sign in [1.0, -1.0] {
                let readout = project(pauli, sign, &branch.readout);
                if readout[0] == ZERO && readout[1] == ZERO {
                    continue;
                }
                let data = branch
                    .data
                    .iter()
                    .zip(row)
                    .map(|(v, &theta)| apply(&rotation_matrix(pauli, sign * theta), v))
                    .collect();
                next.push(Branch { readout, data });
            }
        }
        branches = next;
    }

    for b in &mut branches {
        b.readout = apply(&h, &b.readout);
    }
    Ok(branches)
}

pub(super) fn readout_expectation(model: &QnnModel, pattern: &BinaryPattern, angles: &[f64]) -> Result<f64> {
    let branches = evolve(model, pattern, angles)?;
    let m = model.measurement.matrix();
    let mut total = 0.0;
    for (a, ba) in branches.iter().enumerate() {
        for bb in &branches[a..] {
            let readout = inner(&ba.readout, &apply(&m, &bb.readout));
            let overlap = ba
                .data
                .iter()
                .zip(&bb.data)
                .fold(readout, |acc, (u, v)| acc * inner(u, v));
            // off-diagonal pairs appear twice as complex conjugates
            let weight = if std::ptr::eq(ba, bb) { 1.0 } else { 2.0 };
            total += weight * overlap.re;
        }
    }
    Ok(total)
}

pub(super) fn data_expectations(model: &QnnModel, pattern: &BinaryPattern) -> Result<Vec<f64>> {
    let branches = evolve(model, pattern, model.params.as_slice())?;
    let n = model.arch.n_data_qubits();
    let m = model.measurement.matrix();
    let mut out = vec![0.0; n];
    let mut prefix = vec![ONE; n + 1];
    let mut suffix = vec![ONE; n + 1];
    for (a, ba) in branches.iter().enumerate() {
        for bb in &branches[a..] {
            let weight = if std::ptr::eq(ba, bb) { 1.0 } else { 2.0 };
            let readout = inner(&ba.readout, &bb.readout);
            for k in 0..n {
                prefix[k + 1] = prefix[k] * inner(&ba.data[k], &bb.data[k]);
            }
            for k in (0..n).rev() {
                suffix[k] = suffix[k + 1] * inner(&ba.data[k], &bb.data[k]);
            }
            for (k, slot) in out.iter_mut().enumerate() {
                let local = inner(&ba.data[k], &apply(&m, &bb.data[k]));
                *slot += weight * (readout * prefix[k] * local * suffix[k + 1]).re;
            }
        }
    }
    Ok(out)
}
