//! Fixed-size gate matrices.
//!
//! Two-qubit matrices are written in the basis |ab⟩ = |00⟩, |01⟩, |10⟩, |11⟩
//! where `a` is the first qubit passed to [`StateVector::apply_2q`].
//!
//! [`StateVector::apply_2q`]: super::StateVector::apply_2q

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Single-qubit Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        match self {
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -I], [I, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        }
    }
}

impl std::fmt::Display for Pauli {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.as_str())
    }
}

impl std::str::FromStr for Pauli {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "X" => Ok(Pauli::X),
            "Y" => Ok(Pauli::Y),
            "Z" => Ok(Pauli::Z),
            other => Err(crate::Error::arg(format!("unknown Pauli `{other}`"))),
        }
    }
}

/// exp(-i θ/2 P) = cos(θ/2) I - i sin(θ/2) P
pub fn rotation_matrix(p: Pauli, theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    let pm = p.matrix();
    let mut m = [[ZERO; 2]; 2];
    for (r, row) in m.iter_mut().enumerate() {
        for (col, v) in row.iter_mut().enumerate() {
            let id = if r == col { c } else { 0.0 };
            *v = Complex64::new(id, 0.0) - I * s * pm[r][col];
        }
    }
    m
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate1Q {
    pub name: String,
    pub matrix: [[Complex64; 2]; 2],
}

impl Gate1Q {
    pub fn new(name: impl Into<String>, matrix: [[Complex64; 2]; 2]) -> Self {
        Gate1Q {
            name: name.into(),
            matrix,
        }
    }

    pub fn identity() -> Self {
        Self::new("I", [[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn pauli(p: Pauli) -> Self {
        Self::new(p.as_str(), p.matrix())
    }

    pub fn x() -> Self {
        Self::pauli(Pauli::X)
    }

    pub fn y() -> Self {
        Self::pauli(Pauli::Y)
    }

    pub fn z() -> Self {
        Self::pauli(Pauli::Z)
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self::new("H", [[h, h], [h, -h]])
    }

    pub fn s() -> Self {
        Self::new("S", [[ONE, ZERO], [ZERO, I]])
    }

    pub fn s_dagger() -> Self {
        Self::new("Sdg", [[ONE, ZERO], [ZERO, -I]])
    }

    pub fn rotation(p: Pauli, theta: f64) -> Self {
        Self::new(
            format!("R{}({theta})", p.as_str().to_ascii_lowercase()),
            rotation_matrix(p, theta),
        )
    }

    pub fn rx(theta: f64) -> Self {
        Self::rotation(Pauli::X, theta)
    }

    pub fn ry(theta: f64) -> Self {
        Self::rotation(Pauli::Y, theta)
    }

    pub fn rz(theta: f64) -> Self {
        Self::rotation(Pauli::Z, theta)
    }

    pub fn dagger(&self) -> Self {
        let m = &self.matrix;
        Self::new(
            format!("{}†", self.name),
            [
                [m[0][0].conj(), m[1][0].conj()],
                [m[0][1].conj(), m[1][1].conj()],
            ],
        )
    }

    /// Max entry of |U†U - I|.
    pub fn unitarity_error(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                let mut acc = ZERO;
                for k in 0..2 {
                    acc += m[k][r].conj() * m[k][c];
                }
                let target = if r == c { ONE } else { ZERO };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate2Q {
    pub name: String,
    pub matrix: [[Complex64; 4]; 4],
    /// Set when every off-diagonal entry is exactly zero; enables the phase-only kernel.
    pub diagonal: bool,
}

impl Gate2Q {
    pub fn new(name: impl Into<String>, matrix: [[Complex64; 4]; 4]) -> Self {
        let diagonal = (0..4).all(|r| (0..4).all(|c| r == c || matrix[r][c] == ZERO));
        Gate2Q {
            name: name.into(),
            matrix,
            diagonal,
        }
    }

    /// exp(-i θ/2 X⊗X)
    pub fn xx(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        let c = Complex64::new(c, 0.0);
        let s = Complex64::new(0.0, -s);
        Self::new(
            format!("XX({theta})"),
            [
                [c, ZERO, ZERO, s],
                [ZERO, c, s, ZERO],
                [ZERO, s, c, ZERO],
                [s, ZERO, ZERO, c],
            ],
        )
    }

    /// exp(-i θ/2 Z⊗Z)
    pub fn zz(theta: f64) -> Self {
        let minus = Complex64::from_polar(1.0, -theta / 2.0);
        let plus = Complex64::from_polar(1.0, theta / 2.0);
        Self::new(
            format!("ZZ({theta})"),
            [
                [minus, ZERO, ZERO, ZERO],
                [ZERO, plus, ZERO, ZERO],
                [ZERO, ZERO, plus, ZERO],
                [ZERO, ZERO, ZERO, minus],
            ],
        )
    }

    pub fn cnot() -> Self {
        Self::new(
            "CNOT",
            [
                [ONE, ZERO, ZERO, ZERO],
                [ZERO, ONE, ZERO, ZERO],
                [ZERO, ZERO, ZERO, ONE],
                [ZERO, ZERO, ONE, ZERO],
            ],
        )
    }

    /// Tensor product `first ⊗ second`; never entangling.
    pub fn product(first: &Gate1Q, second: &Gate1Q) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = first.matrix[r >> 1][c >> 1] * second.matrix[r & 1][c & 1];
            }
        }
        Self::new(format!("{}⊗{}", first.name, second.name), m)
    }

    /// |0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U, control on the first qubit.
    pub fn controlled(target: &Gate1Q) -> Self {
        let mut m = [[ZERO; 4]; 4];
        m[0][0] = ONE;
        m[1][1] = ONE;
        for r in 0..2 {
            for c in 0..2 {
                m[2 + r][2 + c] = target.matrix[r][c];
            }
        }
        Self::new(format!("C{}", target.name), m)
    }

    pub fn unitarity_error(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                let mut acc = ZERO;
                for k in 0..4 {
                    acc += m[k][r].conj() * m[k][c];
                }
                let target = if r == c { ONE } else { ZERO };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn standard_gates_are_unitary() {
        let singles = [
            Gate1Q::identity(),
            Gate1Q::x(),
            Gate1Q::y(),
            Gate1Q::z(),
            Gate1Q::hadamard(),
            Gate1Q::s(),
            Gate1Q::s_dagger(),
            Gate1Q::rx(0.37),
            Gate1Q::ry(-2.1),
            Gate1Q::rz(5.0),
        ];
        for g in &singles {
            assert!(g.unitarity_error() < 1e-12, "{}", g.name);
        }
        for t in [-3.0, -0.4, 0.0, 0.9, PI, 6.0] {
            assert!(Gate2Q::xx(t).unitarity_error() < 1e-12);
            assert!(Gate2Q::zz(t).unitarity_error() < 1e-12);
        }
        assert!(Gate2Q::cnot().unitarity_error() < 1e-12);
    }

    #[test]
    fn xx_matches_cos_minus_i_sin_form() {
        let t = 1.234;
        let g = Gate2Q::xx(t);
        let (s, c) = (t / 2.0).sin_cos();
        // X⊗X is the anti-diagonal permutation
        for r in 0..4 {
            for col in 0..4 {
                let id = if r == col { c } else { 0.0 };
                let xx = if r + col == 3 { 1.0 } else { 0.0 };
                let want = Complex64::new(id, -s * xx);
                assert!(close(g.matrix[r][col], want));
            }
        }
        assert!(!g.diagonal);
    }

    #[test]
    fn zz_is_diagonal_with_half_angle_phases() {
        let t = 0.8;
        let g = Gate2Q::zz(t);
        assert!(g.diagonal);
        let m = Complex64::from_polar(1.0, -t / 2.0);
        let p = Complex64::from_polar(1.0, t / 2.0);
        assert!(close(g.matrix[0][0], m));
        assert!(close(g.matrix[1][1], p));
        assert!(close(g.matrix[2][2], p));
        assert!(close(g.matrix[3][3], m));
    }

    #[test]
    fn rotation_at_pi_is_minus_i_pauli() {
        for p in Pauli::ALL {
            let r = Gate1Q::rotation(p, PI);
            let pm = p.matrix();
            for a in 0..2 {
                for b in 0..2 {
                    assert!(close(r.matrix[a][b], -I * pm[a][b]));
                }
            }
        }
    }

    #[test]
    fn product_and_controlled_layouts() {
        let g = Gate2Q::product(&Gate1Q::x(), &Gate1Q::identity());
        // X on the first qubit maps |00⟩ to |10⟩
        assert!(close(g.matrix[2][0], ONE));
        let c = Gate2Q::controlled(&Gate1Q::x());
        assert_eq!(c.matrix, Gate2Q::cnot().matrix);
    }

    #[test]
    fn pauli_parses_case_insensitively() {
        assert_eq!("z".parse::<Pauli>().unwrap(), Pauli::Z);
        assert_eq!(" Y ".parse::<Pauli>().unwrap(), Pauli::Y);
        assert!("W".parse::<Pauli>().is_err());
    }
}
