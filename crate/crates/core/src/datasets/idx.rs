//! IDX containers as used by the MNIST family: a big-endian `u32` magic
//! (`0x00000803` for `u8` image cubes, `0x00000801` for `u8` label vectors),
//! big-endian `u32` dimensions, then raw bytes.

use std::path::Path;

use super::{LabeledDataset, Provenance};
use crate::error::{Error, IdxError, Result};
use crate::nn::Matrix;

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

/// Decoded image cube.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

fn be_u32(bytes: &[u8], at: usize) -> std::result::Result<u32, IdxError> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or(IdxError::Truncated {
            needed: at + 4,
            found: bytes.len(),
        })
}

fn check_magic(bytes: &[u8], expected: u32) -> std::result::Result<(), IdxError> {
    let found = be_u32(bytes, 0)?;
    if found != expected {
        return Err(IdxError::BadMagic { expected, found });
    }
    Ok(())
}

pub fn decode_idx_images(bytes: &[u8]) -> std::result::Result<IdxImages, IdxError> {
    check_magic(bytes, IMAGES_MAGIC)?;
    let count = be_u32(bytes, 4)? as usize;
    let rows = be_u32(bytes, 8)? as usize;
    let cols = be_u32(bytes, 12)? as usize;
    if rows == 0 || cols == 0 {
        return Err(IdxError::Dimensions { rows, cols });
    }
    let needed = 16 + count * rows * cols;
    if bytes.len() < needed {
        return Err(IdxError::Truncated {
            needed,
            found: bytes.len(),
        });
    }
    Ok(IdxImages {
        count,
        rows,
        cols,
        pixels: bytes[16..needed].to_vec(),
    })
}

pub fn decode_idx_labels(bytes: &[u8]) -> std::result::Result<Vec<u8>, IdxError> {
    check_magic(bytes, LABELS_MAGIC)?;
    let count = be_u32(bytes, 4)? as usize;
    let needed = 8 + count;
    if bytes.len() < needed {
        return Err(IdxError::Truncated {
            needed,
            found: bytes.len(),
        });
    }
    Ok(bytes[8..needed].to_vec())
}

/// Builds a dataset from in-memory image and label files. Pixels are scaled
/// to `[0, 1]` and flattened row by row; `limit` keeps the first items.
pub fn parse_idx(images: &[u8], labels: &[u8], limit: Option<usize>) -> Result<LabeledDataset> {
    let img = decode_idx_images(images)?;
    let lab = decode_idx_labels(labels)?;
    if img.count != lab.len() {
        return Err(IdxError::CountMismatch {
            images: img.count,
            labels: lab.len(),
        }
        .into());
    }
    let n = limit.map_or(img.count, |l| l.min(img.count));
    let dim = img.rows * img.cols;
    let features = img.pixels[..n * dim].iter().map(|&p| f64::from(p) / 255.0).collect();
    let labels: Vec<usize> = lab[..n].iter().map(|&l| usize::from(l)).collect();
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let provenance = Provenance {
        generator: "idx".into(),
        seed: None,
        params: serde_json::json!({ "rows": img.rows, "cols": img.cols, "count": n }),
    };
    LabeledDataset::new(Matrix::new(n, dim, features)?, labels, n_classes, provenance)
}

/// Class-balanced subset of at most `n` items: each class contributes its
/// first `n / n_classes` items in file order (the first `n % n_classes`
/// classes one more), and the result keeps file order.
pub fn parse_idx_balanced(images: &[u8], labels: &[u8], n: usize) -> Result<LabeledDataset> {
    let img = decode_idx_images(images)?;
    let lab = decode_idx_labels(labels)?;
    if img.count != lab.len() {
        return Err(IdxError::CountMismatch {
            images: img.count,
            labels: lab.len(),
        }
        .into());
    }
    let n_classes = lab.iter().max().map_or(0, |&m| usize::from(m) + 1);
    let mut quota: Vec<usize> = (0..n_classes)
        .map(|c| n / n_classes.max(1) + usize::from(c < n % n_classes.max(1)))
        .collect();
    let dim = img.rows * img.cols;
    let mut features = Vec::new();
    let mut kept = Vec::new();
    for (i, &l) in lab.iter().enumerate() {
        let q = &mut quota[usize::from(l)];
        if *q > 0 {
            *q -= 1;
            kept.push(usize::from(l));
            features.extend(img.pixels[i * dim..(i + 1) * dim].iter().map(|&p| f64::from(p) / 255.0));
        }
    }
    let provenance = Provenance {
        generator: "idx-balanced".into(),
        seed: None,
        params: serde_json::json!({ "rows": img.rows, "cols": img.cols, "count": kept.len() }),
    };
    LabeledDataset::new(Matrix::new(kept.len(), dim, features)?, kept, n_classes, provenance)
}

pub fn load_idx_balanced(images_path: &Path, labels_path: &Path, n: usize) -> Result<LabeledDataset> {
    let images = std::fs::read(images_path).map_err(|e| Error::io(images_path, e))?;
    let labels = std::fs::read(labels_path).map_err(|e| Error::io(labels_path, e))?;
    parse_idx_balanced(&images, &labels, n)
}

pub fn load_idx(images_path: &Path, labels_path: &Path, limit: Option<usize>) -> Result<LabeledDataset> {
    let images = std::fs::read(images_path).map_err(|e| Error::io(images_path, e))?;
    let labels = std::fs::read(labels_path).map_err(|e| Error::io(labels_path, e))?;
    parse_idx(&images, &labels, limit)
}

pub fn encode_idx_images(rows: usize, cols: usize, pixels: &[u8]) -> Vec<u8> {
    assert!(rows > 0 && cols > 0 && pixels.len() % (rows * cols) == 0);
    let count = pixels.len() / (rows * cols);
    let mut out = Vec::with_capacity(16 + pixels.len());
    for v in [IMAGES_MAGIC, count as u32, rows as u32, cols as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out.extend_from_slice(pixels);
    out
}

pub fn encode_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}
