//! Binary-pattern datasets: MNIST ingestion, the two-digit task, negated and
//! label-by-polarity variants, and seeded synthetic tasks.

mod idx;
mod image;
mod pattern;

pub use idx::{encode_images, encode_labels, load_idx, parse_images, parse_labels};
pub use image::{DownsampleKernel, GrayImage};
pub use pattern::{check_label, BinaryPattern, LabeledDataset};

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Environment variable naming the directory with the four MNIST IDX files.
pub const MNIST_DIR_ENV: &str = "NEGSYM_MNIST_DIR";

pub const TRAIN_IMAGES: &str = "train-images-idx3-ubyte";
pub const TRAIN_LABELS: &str = "train-labels-idx1-ubyte";
pub const TEST_IMAGES: &str = "t10k-images-idx3-ubyte";
pub const TEST_LABELS: &str = "t10k-labels-idx1-ubyte";

/// `explicit`, else `$NEGSYM_MNIST_DIR`, else `None`.
pub fn mnist_dir(explicit: Option<&Path>) -> Option<PathBuf> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(MNIST_DIR_ENV).map(PathBuf::from))
}

pub struct MnistSplits {
    pub train: Vec<(GrayImage, u8)>,
    pub test: Vec<(GrayImage, u8)>,
}

pub fn load_mnist(dir: &Path) -> Result<MnistSplits> {
    Ok(MnistSplits {
        train: load_idx(dir.join(TRAIN_IMAGES), dir.join(TRAIN_LABELS))?,
        test: load_idx(dir.join(TEST_IMAGES), dir.join(TEST_LABELS))?,
    })
}

/// Preprocessing for the two-digit task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DigitTaskOptions {
    pub positive_digit: u8,
    pub negative_digit: u8,
    pub side: usize,
    pub threshold: u8,
    pub kernel: DownsampleKernel,
    /// Invert grayscale before downsampling.
    pub invert: bool,
}

impl Default for DigitTaskOptions {
    fn default() -> Self {
        DigitTaskOptions {
            positive_digit: 3,
            negative_digit: 6,
            side: 4,
            threshold: 128,
            kernel: DownsampleKernel::Bilinear,
            invert: false,
        }
    }
}

pub fn preprocess(img: &GrayImage, opts: &DigitTaskOptions) -> Result<BinaryPattern> {
    let img = if opts.invert { img.invert() } else { img.clone() };
    Ok(img
        .downsample_with(opts.side, opts.side, opts.kernel)?
        .binarize(opts.threshold))
}

/// Two-digit binary task: filter, downsample, binarize, label
/// (`positive_digit` → +1), then drop every conflicted bit-string.
pub fn build_digit_task(raw: &[(GrayImage, u8)], name: &str, opts: &DigitTaskOptions) -> Result<LabeledDataset> {
    if opts.positive_digit == opts.negative_digit {
        return Err(Error::arg("the two digits must differ"));
    }
    let mut patterns = Vec::new();
    let mut labels = Vec::new();
    for (img, digit) in raw {
        let label = if *digit == opts.positive_digit {
            1
        } else if *digit == opts.negative_digit {
            -1
        } else {
            continue;
        };
        patterns.push(preprocess(img, opts)?);
        labels.push(label);
    }
    let ds = LabeledDataset::new(name, patterns, labels)?.without_contradictions();
    if ds.is_empty() {
        return Err(Error::Data(format!(
            "no usable examples for digits {} and {}",
            opts.positive_digit, opts.negative_digit
        )));
    }
    Ok(ds)
}

/// Originals labelled +1 and their negations labelled -1, conflicts removed.
pub fn build_drawback_task(base: &LabeledDataset) -> LabeledDataset {
    let mut patterns = Vec::with_capacity(2 * base.len());
    let mut labels = Vec::with_capacity(2 * base.len());
    for p in base.patterns() {
        patterns.push(p.clone());
        labels.push(1);
    }
    for p in base.patterns() {
        patterns.push(p.negate());
        labels.push(-1);
    }
    LabeledDataset::new(format!("{}-drawback", base.name), patterns, labels)
        .expect("widths and labels are valid by construction")
        .without_contradictions()
}

/// Labeling rules for synthetic tasks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticRule {
    /// +1 when two seeded positions hold equal bits (even parity).
    /// Invariant under negation, so parity-gate classifiers can fit it.
    MaskParity,
    /// +1 when the majority of an odd-sized seeded mask is one.
    /// Flips under negation.
    MaskMajority,
}

impl std::str::FromStr for SyntheticRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mask-parity" | "parity" => Ok(SyntheticRule::MaskParity),
            "mask-majority" | "majority" => Ok(SyntheticRule::MaskMajority),
            other => Err(Error::arg(format!("unknown synthetic rule `{other}`"))),
        }
    }
}

impl SyntheticRule {
    pub fn as_str(self) -> &'static str {
        match self {
            SyntheticRule::MaskParity => "mask-parity",
            SyntheticRule::MaskMajority => "mask-majority",
        }
    }

    fn mask_size(self, n: usize) -> usize {
        match self {
            SyntheticRule::MaskParity => 2,
            SyntheticRule::MaskMajority => {
                if n % 2 == 1 {
                    n
                } else {
                    n - 1
                }
            }
        }
    }

    fn label(self, mask: &[usize], p: &BinaryPattern) -> i8 {
        let ones = mask.iter().filter(|&&k| p.bits()[k] == 1).count();
        let positive = match self {
            SyntheticRule::MaskParity => ones % 2 == 0,
            SyntheticRule::MaskMajority => 2 * ones > mask.len(),
        };
        if positive {
            1
        } else {
            -1
        }
    }
}

/// Uniform random patterns labelled by a deterministic rule of the pattern.
pub fn synthetic_dataset(n: usize, size: usize, rule: SyntheticRule, seed: u64) -> Result<LabeledDataset> {
    if n == 0 || n > 20 {
        return Err(Error::arg(format!("synthetic width must be in 1..=20, got {n}")));
    }
    if rule == SyntheticRule::MaskParity && n < 2 {
        return Err(Error::arg("mask-parity needs at least 2 bits"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions: Vec<usize> = (0..n).collect();
    positions.shuffle(&mut rng);
    let mut mask = positions[..rule.mask_size(n)].to_vec();
    mask.sort_unstable();
    let mut patterns = Vec::with_capacity(size);
    let mut labels = Vec::with_capacity(size);
    for _ in 0..size {
        let p = BinaryPattern::from_index(rng.gen_range(0..1u64 << n), n);
        labels.push(rule.label(&mask, &p));
        patterns.push(p);
    }
    LabeledDataset::new(format!("synthetic-{}-n{n}-s{seed}", rule.as_str()), patterns, labels)
}

/// Deterministic subset of `k` examples.
pub fn subsample(ds: &LabeledDataset, k: usize, seed: u64) -> LabeledDataset {
    let mut idx: Vec<usize> = (0..ds.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    idx.truncate(k);
    idx.sort_unstable();
    ds.select(&idx)
}

#[derive(Serialize, Deserialize)]
struct CacheRow {
    bits: String,
    label: i8,
}

/// `bits,label` CSV.
pub fn write_dataset_csv<W: std::io::Write>(ds: &LabeledDataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (p, l) in ds.iter() {
        w.serialize(CacheRow {
            bits: p.to_string(),
            label: l,
        })?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn dataset_to_csv(ds: &LabeledDataset) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    if ds.is_empty() {
        buf.extend_from_slice(b"bits,label\n");
    } else {
        write_dataset_csv(ds, &mut buf)?;
    }
    Ok(buf)
}

pub fn read_dataset_csv(path: &Path) -> Result<LabeledDataset> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let mut patterns = Vec::new();
    let mut labels = Vec::new();
    for row in reader.deserialize() {
        let row: CacheRow = row?;
        patterns.push(row.bits.parse()?);
        labels.push(row.label);
    }
    LabeledDataset::new(name, patterns, labels)
}

/// Counts of positive and negative labels, keyed by dataset name.
pub fn label_counts(datasets: &[&LabeledDataset]) -> HashMap<String, (usize, usize)> {
    datasets
        .iter()
        .map(|d| (d.name.clone(), (d.count_label(1), d.count_label(-1))))
        .collect()
}
