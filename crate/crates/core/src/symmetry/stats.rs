use serde::{Deserialize, Serialize};

use super::Evaluator;
use crate::data::BinaryPattern;
use crate::qnn::QnnModel;
use crate::{Error, Result};

/// Statistics over aligned `(x, x̃)` pairs.
///
/// For logits, `mean_diff`/`std_diff` describe `f(x) - f(x̃)`, `max_pair_norm`
/// is the largest `|f(x) - f(x̃)|`, and Pearson/cosine compare the series
/// `f(x_i)` with `f(x̃_i)` across the dataset.
///
/// For features, `mean_diff`/`std_diff` describe every component of
/// `g(x) + g(x̃)`, `max_pair_norm` is the largest `‖g(x) + g(x̃)‖₂`, and
/// Pearson/cosine are taken per pair across the N components and averaged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairStats {
    pub pairs: usize,
    pub mean_diff: f64,
    pub std_diff: f64,
    pub mean_pearson: f64,
    pub mean_cosine: f64,
    pub max_pair_norm: f64,
    /// Pairs with a zero vector, left out of `mean_cosine`.
    pub skipped_cosine: usize,
    /// Pairs with a constant vector, left out of `mean_pearson`.
    pub skipped_pearson: usize,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// None when either vector is zero.
pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some(a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / (na * nb))
}

/// None when either series is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let (ma, _) = mean_std(a);
    let (mb, _) = mean_std(b);
    let ca: Vec<f64> = a.iter().map(|v| v - ma).collect();
    let cb: Vec<f64> = b.iter().map(|v| v - mb).collect();
    cosine(&ca, &cb)
}

fn check_input(patterns: &[BinaryPattern]) -> Result<()> {
    if patterns.is_empty() {
        return Err(Error::arg("pair statistics need at least one pattern"));
    }
    Ok(())
}

pub fn logit_pair_stats(eval: &dyn Evaluator, model: &QnnModel, patterns: &[BinaryPattern]) -> Result<PairStats> {
    check_input(patterns)?;
    let mut plain = Vec::with_capacity(patterns.len());
    let mut negated = Vec::with_capacity(patterns.len());
    for x in patterns {
        plain.push(eval.logit(model, x)?);
        negated.push(eval.logit(model, &x.negate())?);
    }
    let diffs: Vec<f64> = plain.iter().zip(&negated).map(|(a, b)| a - b).collect();
    let (mean_diff, std_diff) = mean_std(&diffs);
    let pearson = pearson(&plain, &negated);
    let cosine = cosine(&plain, &negated);
    Ok(PairStats {
        pairs: patterns.len(),
        mean_diff,
        std_diff,
        mean_pearson: pearson.unwrap_or(f64::NAN),
        mean_cosine: cosine.unwrap_or(f64::NAN),
        max_pair_norm: diffs.iter().map(|d| d.abs()).fold(0.0, f64::max),
        skipped_cosine: usize::from(cosine.is_none()),
        skipped_pearson: usize::from(pearson.is_none()),
    })
}

pub fn feature_pair_stats(eval: &dyn Evaluator, model: &QnnModel, patterns: &[BinaryPattern]) -> Result<PairStats> {
    check_input(patterns)?;
    let mut sums = Vec::new();
    let mut max_norm = 0.0f64;
    let (mut cos_total, mut cos_count) = (0.0, 0usize);
    let (mut r_total, mut r_count) = (0.0, 0usize);
    for x in patterns {
        let g = eval.features(model, x)?;
        let gn = eval.features(model, &x.negate())?;
        let s: Vec<f64> = g.iter().zip(&gn).map(|(a, b)| a + b).collect();
        max_norm = max_norm.max(norm(&s));
        sums.extend(s);
        if let Some(c) = cosine(&g, &gn) {
            cos_total += c;
            cos_count += 1;
        }
        if let Some(r) = pearson(&g, &gn) {
            r_total += r;
            r_count += 1;
        }
    }
    let (mean_diff, std_diff) = mean_std(&sums);
    let avg = |total: f64, count: usize| if count == 0 { f64::NAN } else { total / count as f64 };
    Ok(PairStats {
        pairs: patterns.len(),
        mean_diff,
        std_diff,
        mean_pearson: avg(r_total, r_count),
        mean_cosine: avg(cos_total, cos_count),
        max_pair_norm: max_norm,
        skipped_cosine: patterns.len() - cos_count,
        skipped_pearson: patterns.len() - r_count,
    })
}
