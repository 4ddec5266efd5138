use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Fixed-width bit pattern; bit `k` is loaded into data qubit `k + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryPattern {
    bits: Vec<u8>,
}

impl BinaryPattern {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::arg(format!("pattern bit {bad} is not 0 or 1")));
        }
        Ok(BinaryPattern { bits })
    }

    pub fn zeros(len: usize) -> Self {
        BinaryPattern { bits: vec![0; len] }
    }

    pub fn from_index(value: u64, len: usize) -> Self {
        let bits = (0..len)
            .map(|k| ((value >> (len - 1 - k)) & 1) as u8)
            .collect();
        BinaryPattern { bits }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bitwise NOT.
    pub fn negate(&self) -> Self {
        BinaryPattern {
            bits: self.bits.iter().map(|b| b ^ 1).collect(),
        }
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| b as f64).collect()
    }
}

impl fmt::Display for BinaryPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            f.write_str(if *b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BinaryPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::arg(format!("invalid pattern character `{other}`"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(BinaryPattern { bits })
    }
}

/// Patterns with ±1 labels and a uniform width.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    pub name: String,
    patterns: Vec<BinaryPattern>,
    labels: Vec<i8>,
}

pub fn check_label(label: i8) -> Result<()> {
    if label == 1 || label == -1 {
        Ok(())
    } else {
        Err(Error::arg(format!("label must be -1 or +1, got {label}")))
    }
}

impl LabeledDataset {
    pub fn new(name: impl Into<String>, patterns: Vec<BinaryPattern>, labels: Vec<i8>) -> Result<Self> {
        if patterns.len() != labels.len() {
            return Err(Error::Data(format!(
                "{} patterns but {} labels",
                patterns.len(),
                labels.len()
            )));
        }
        if let Some(first) = patterns.first() {
            if let Some(p) = patterns.iter().find(|p| p.len() != first.len()) {
                return Err(Error::Data(format!(
                    "mixed pattern widths {} and {}",
                    first.len(),
                    p.len()
                )));
            }
        }
        for &l in &labels {
            check_label(l)?;
        }
        Ok(LabeledDataset {
            name: name.into(),
            patterns,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Pattern width, 0 for an empty dataset.
    pub fn width(&self) -> usize {
        self.patterns.first().map_or(0, BinaryPattern::len)
    }

    pub fn patterns(&self) -> &[BinaryPattern] {
        &self.patterns
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BinaryPattern, i8)> {
        self.patterns.iter().zip(self.labels.iter().copied())
    }

    pub fn count_label(&self, label: i8) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Same labels, every pattern negated.
    pub fn negated(&self) -> Self {
        LabeledDataset {
            name: format!("{}-negated", self.name),
            patterns: self.patterns.iter().map(BinaryPattern::negate).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn select(&self, indices: &[usize]) -> Self {
        LabeledDataset {
            name: self.name.clone(),
            patterns: indices.iter().map(|&i| self.patterns[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Drops every occurrence of a pattern that carries both labels.
    pub fn without_contradictions(&self) -> Self {
        let mut seen: HashMap<&BinaryPattern, (bool, bool)> = HashMap::new();
        for (p, l) in self.iter() {
            let entry = seen.entry(p).or_default();
            if l > 0 {
                entry.0 = true;
            } else {
                entry.1 = true;
            }
        }
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| {
                let (pos, neg) = seen[&self.patterns[i]];
                !(pos && neg)
            })
            .collect();
        self.select(&keep)
    }

    pub fn has_contradictions(&self) -> bool {
        self.without_contradictions().len() != self.len()
    }
}
