//! Independent oracles shared by the integration tests: explicit
//! Kronecker-product embeddings and dense matrix algebra, written without
//! touching the simulator kernels.
#![allow(dead_code)]

use std::path::PathBuf;

use negsym::data::{self, BinaryPattern};
use negsym::qnn::QnnModel;
use num_complex::Complex64 as C;
use rand::Rng;

pub type Mat = Vec<Vec<C>>;

pub fn identity(dim: usize) -> Mat {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) }).collect())
        .collect()
}

pub fn from2(m: &[[C; 2]; 2]) -> Mat {
    m.iter().map(|r| r.to_vec()).collect()
}

pub fn from4(m: &[[C; 4]; 4]) -> Mat {
    m.iter().map(|r| r.to_vec()).collect()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![C::new(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = vec![vec![C::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == C::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn matvec(m: &Mat, v: &[C]) -> Vec<C> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn dagger(m: &Mat) -> Mat {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i].conj()).collect()).collect()
}

/// I ⊗ … ⊗ U ⊗ … ⊗ I with qubit 0 leftmost (most significant).
pub fn embed_1q(u: &Mat, target: usize, n: usize) -> Mat {
    let id = identity(2);
    let mut out = vec![vec![C::new(1.0, 0.0)]];
    for q in 0..n {
        out = kron(&out, if q == target { u } else { &id });
    }
    out
}

/// Permutation matrix sending qubit order (0..n) to `order`, i.e. output
/// qubit position p holds input qubit `order[p]`.
fn permutation(order: &[usize]) -> Mat {
    let n = order.len();
    let dim = 1 << n;
    let mut p = vec![vec![C::new(0.0, 0.0); dim]; dim];
    for j in 0..dim {
        let mut i = 0;
        for (pos, &q) in order.iter().enumerate() {
            let bit = (j >> (n - 1 - q)) & 1;
            i |= bit << (n - 1 - pos);
        }
        p[i][j] = C::new(1.0, 0.0);
    }
    p
}

/// Two-qubit gate on (a, b): adjacent pairs use a direct Kronecker product,
/// anything else is moved next to each other by an explicit permutation.
pub fn embed_2q(u: &Mat, a: usize, b: usize, n: usize) -> Mat {
    if b == a + 1 {
        let mut out = vec![vec![C::new(1.0, 0.0)]];
        let mut q = 0;
        while q < n {
            if q == a {
                out = kron(&out, u);
                q += 2;
            } else {
                out = kron(&out, &identity(2));
                q += 1;
            }
        }
        return out;
    }
    let mut order = vec![a, b];
    order.extend((0..n).filter(|q| *q != a && *q != b));
    let p = permutation(&order);
    let core = kron(u, &identity(1 << (n - 2)));
    matmul(&dagger(&p), &matmul(&core, &p))
}

/// Haar-ish random 2×2 unitary: e^{iα} Rz(β) Ry(γ) Rz(δ) from its closed form.
pub fn random_unitary_2<R: Rng>(rng: &mut R) -> Mat {
    let tau = std::f64::consts::TAU;
    let (alpha, beta, gamma, delta): (f64, f64, f64, f64) =
        (rng.gen_range(0.0..tau), rng.gen_range(0.0..tau), rng.gen_range(0.0..tau), rng.gen_range(0.0..tau));
    let e = |phi: f64| C::from_polar(1.0, phi);
    let (c, s) = ((gamma / 2.0).cos(), (gamma / 2.0).sin());
    vec![
        vec![e(alpha - beta / 2.0 - delta / 2.0) * c, -e(alpha - beta / 2.0 + delta / 2.0) * s],
        vec![e(alpha + beta / 2.0 - delta / 2.0) * s, e(alpha + beta / 2.0 + delta / 2.0) * c],
    ]
}

/// Dense entangling 4×4 unitary: (A⊗B) · exp(-iθ/2 X⊗X) · (C⊗D) with the
/// Ising factor written as cos·I - i sin·X⊗X.
pub fn random_unitary_4<R: Rng>(rng: &mut R) -> Mat {
    let theta: f64 = rng.gen_range(-3.0..3.0);
    let x = vec![vec![C::new(0.0, 0.0), C::new(1.0, 0.0)], vec![C::new(1.0, 0.0), C::new(0.0, 0.0)]];
    let xx = kron(&x, &x);
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let ising: Mat = (0..4)
        .map(|i| (0..4).map(|j| identity(4)[i][j] * c - C::new(0.0, s) * xx[i][j]).collect())
        .collect();
    let left = kron(&random_unitary_2(rng), &random_unitary_2(rng));
    let right = kron(&random_unitary_2(rng), &random_unitary_2(rng));
    matmul(&left, &matmul(&ising, &right))
}

pub fn to_arr2(m: &Mat) -> [[C; 2]; 2] {
    [[m[0][0], m[0][1]], [m[1][0], m[1][1]]]
}

pub fn to_arr4(m: &Mat) -> [[C; 4]; 4] {
    let mut out = [[C::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        out[i].copy_from_slice(&m[i]);
    }
    out
}

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> Vec<C> {
    let v: Vec<C> = (0..1 << n).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

/// Hinge loss of the exact statevector logit.
pub fn loss(model: &QnnModel, x: &BinaryPattern, y: i8) -> f64 {
    (1.0 - y as f64 * model.forward(x).unwrap()).max(0.0)
}

/// Central difference of the hinge loss in angle `index`.
pub fn finite_difference(model: &QnnModel, x: &BinaryPattern, y: i8, index: usize, h: f64) -> f64 {
    let mut up = model.clone();
    up.params.as_mut_slice()[index] += h;
    let mut dn = model.clone();
    dn.params.as_mut_slice()[index] -= h;
    (loss(&up, x, y) - loss(&dn, x, y)) / (2.0 * h)
}

/// `$NEGSYM_MNIST_DIR`, else `data/mnist` at the workspace root, if the
/// training images are present.
pub fn mnist_dir() -> Option<PathBuf> {
    let dir = data::mnist_dir(None).unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/mnist"));
    dir.join(data::TRAIN_IMAGES).exists().then_some(dir)
}
