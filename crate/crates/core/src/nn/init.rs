use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitScheme {
    /// Uniform in `+-sqrt(6 / (fan_in + fan_out))`.
    #[default]
    GlorotUniform,
}

impl InitScheme {
    pub fn limit(self, fan_in: usize, fan_out: usize) -> f64 {
        match self {
            InitScheme::GlorotUniform => (6.0 / (fan_in + fan_out).max(1) as f64).sqrt(),
        }
    }

    /// Variance of the distribution a draw comes from.
    pub fn variance(self, fan_in: usize, fan_out: usize) -> f64 {
        let l = self.limit(fan_in, fan_out);
        l * l / 3.0
    }
}

/// `fan_out x fan_in` weight matrix drawn from `scheme`.
pub fn init_params<R: Rng + ?Sized>(
    fan_out: usize,
    fan_in: usize,
    scheme: InitScheme,
    rng: &mut R,
) -> Matrix {
    let limit = scheme.limit(fan_in, fan_out);
    let data = (0..fan_out * fan_in)
        .map(|_| rng.random_range(-limit..=limit))
        .collect();
    Matrix::from_raw(fan_out, fan_in, data)
}
