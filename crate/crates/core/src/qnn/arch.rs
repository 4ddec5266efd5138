use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::statevec::{Gate2Q, Pauli};
use crate::{Error, Result};

/// One block of parity gates coupling the readout to every data qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Layer {
    XX,
    ZZ,
}

impl Layer {
    pub fn pauli(self) -> Pauli {
        match self {
            Layer::XX => Pauli::X,
            Layer::ZZ => Pauli::Z,
        }
    }

    pub fn gate(self, theta: f64) -> Gate2Q {
        match self {
            Layer::XX => Gate2Q::xx(theta),
            Layer::ZZ => Gate2Q::zz(theta),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Layer::XX => "XX",
            Layer::ZZ => "ZZ",
        }
    }
}

/// Ordered layer list plus the data-register width.
///
/// The canonical string form is `LAYER ("-" LAYER)*`; the first layer listed
/// is the first applied.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArchitectureSpec {
    layers: Vec<Layer>,
    n_data_qubits: usize,
}

/// Layer list without a width, as written on the command line.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LayerString(pub Vec<Layer>);

impl FromStr for LayerString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let layers = s
            .trim()
            .split('-')
            .map(|tok| match tok.trim().to_ascii_uppercase().as_str() {
                "XX" => Ok(Layer::XX),
                "ZZ" => Ok(Layer::ZZ),
                other => Err(Error::arg(format!(
                    "unknown layer `{other}` in architecture `{s}` (expected XX or ZZ)"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LayerString(layers))
    }
}

impl fmt::Display for LayerString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, layer) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            f.write_str(layer.as_str())?;
        }
        Ok(())
    }
}

impl ArchitectureSpec {
    pub fn new(layers: Vec<Layer>, n_data_qubits: usize) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::arg("architecture needs at least one layer"));
        }
        if n_data_qubits == 0 {
            return Err(Error::arg("architecture needs at least one data qubit"));
        }
        Ok(ArchitectureSpec {
            layers,
            n_data_qubits,
        })
    }

    pub fn parse(layers: &str, n_data_qubits: usize) -> Result<Self> {
        Self::new(layers.parse::<LayerString>()?.0, n_data_qubits)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn n_data_qubits(&self) -> usize {
        self.n_data_qubits
    }

    /// Readout plus data qubits.
    pub fn n_qubits(&self) -> usize {
        self.n_data_qubits + 1
    }

    pub fn n_params(&self) -> usize {
        self.layers.len() * self.n_data_qubits
    }

    pub fn has_zz(&self) -> bool {
        self.layers.contains(&Layer::ZZ)
    }

    /// Canonical upper-case layer string, e.g. `XX-ZZ`.
    pub fn layer_string(&self) -> String {
        LayerString(self.layers.clone()).to_string()
    }
}

impl fmt::Display for ArchitectureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (N={})", self.layer_string(), self.n_data_qubits)
    }
}
