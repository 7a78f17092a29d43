use super::Matrix;
use crate::error::{Error, Result};

/// Mean softmax cross-entropy over the batch and its gradient
/// `(softmax - onehot) / batch` with respect to the logits.
pub fn softmax_cross_entropy(logits: &Matrix, labels: &[usize]) -> Result<(f64, Matrix)> {
    let (batch, classes) = logits.shape();
    if labels.len() != batch {
        return Err(Error::Shape(format!("{} labels for {batch} rows", labels.len())));
    }
    if batch == 0 {
        return Err(Error::Shape("empty batch".into()));
    }
    let mut grad = Vec::with_capacity(batch * classes);
    let mut total = 0.0;
    for (row, &y) in logits.row_iter().zip(labels) {
        if y >= classes {
            return Err(Error::LabelOutOfRange { label: y, n_classes: classes });
        }
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = row.iter().map(|v| (v - max).exp()).sum();
        let log_z = max + sum.ln();
        total += log_z - row[y];
        let scale = 1.0 / batch as f64;
        grad.extend(row.iter().enumerate().map(|(c, v)| {
            let p = (v - log_z).exp();
            (p - f64::from(u8::from(c == y))) * scale
        }));
    }
    Ok((total / batch as f64, Matrix::from_raw(batch, classes, grad)))
}
