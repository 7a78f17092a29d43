//! Labeled datasets: synthetic 2-D generators, an IDX reader/writer, a
//! stratified splitter and CSV export.

mod idx;
mod synthetic;

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use idx::{
    decode_idx_images, decode_idx_labels, encode_idx_images, encode_idx_labels, load_idx, load_idx_balanced, parse_idx, parse_idx_balanced,
    IdxImages,
};
pub use synthetic::{
    gen_circle, gen_circle_with, gen_gaussian, gen_gaussian_with, gen_halfplane_region, gen_spiral,
    gen_spiral_with, spiral_arm_distance, BoundingBox, CircleSpec, GaussianSpec, LineSpec,
    RegionSpec, Sense, SpiralSpec,
};

use crate::error::{Error, Result};
use crate::fmtnum;
use crate::nn::Matrix;

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: Option<u64>,
    pub params: serde_json::Value,
}

/// Feature rows with integer class labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    features: Matrix,
    labels: Vec<usize>,
    n_classes: usize,
    provenance: Provenance,
}

impl LabeledDataset {
    pub fn new(features: Matrix, labels: Vec<usize>, n_classes: usize, provenance: Provenance) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(Error::Shape(format!(
                "{} labels for {} feature rows",
                labels.len(),
                features.rows()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(Error::LabelOutOfRange { label: bad, n_classes });
        }
        if !features.all_finite() {
            return Err(Error::InvalidParameter("features must be finite".into()));
        }
        Ok(Self {
            features,
            labels,
            n_classes,
            provenance,
        })
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows `idx`, in the given order.
    pub fn subset(&self, idx: &[usize]) -> LabeledDataset {
        LabeledDataset {
            features: self.features.select_rows(idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            n_classes: self.n_classes,
            provenance: self.provenance.clone(),
        }
    }

    /// Same rows with the class count widened (e.g. to match a test set).
    pub fn with_n_classes(mut self, n_classes: usize) -> Result<Self> {
        if let Some(&bad) = self.labels.iter().find(|&&l| l >= n_classes) {
            return Err(Error::LabelOutOfRange { label: bad, n_classes });
        }
        self.n_classes = n_classes;
        Ok(self)
    }

    /// CSV with header `x1,...,xd,label`; floats carry 9 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header: Vec<String> = (1..=self.n_features())
            .map(|i| format!("x{i}"))
            .chain(std::iter::once("label".to_string()))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for (row, label) in self.features.row_iter().zip(&self.labels) {
            for v in row {
                write!(out, "{},", fmtnum::sig(*v, 9))?;
            }
            writeln!(out, "{label}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }
}

/// Stratified, deterministic train/test split. Within each class the test
/// share is `round(count * test_fraction)`, kept within `1..count`. Both
/// halves keep the original row order.
pub fn split(data: &LabeledDataset, test_fraction: f64, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); data.n_classes()];
    for (i, &l) in data.labels().iter().enumerate() {
        by_class[l].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut is_test = vec![false; data.len()];
    for (class, mut idx) in by_class.into_iter().enumerate() {
        if idx.len() < 2 {
            return Err(Error::ClassTooSmall { class, count: idx.len() });
        }
        let take = ((idx.len() as f64 * test_fraction).round() as usize).clamp(1, idx.len() - 1);
        idx.shuffle(&mut rng);
        for &i in &idx[..take] {
            is_test[i] = true;
        }
    }
    let (test_idx, train_idx): (Vec<usize>, Vec<usize>) = (0..data.len()).partition(|&i| is_test[i]);
    Ok((data.subset(&train_idx), data.subset(&test_idx)))
}
