use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::{logistic, squash, squash_eval, SquashingParams};

/// Element-wise activation of a dense layer.
///
/// `Squashing` carries its center and width plus the initial sharpness; the
/// live `beta` is owned by the layer so it can be trained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActivationKind {
    Identity,
    Relu,
    Sigmoid,
    Tanh,
    Squashing {
        a: f64,
        lambda: f64,
        beta0: f64,
        trainable: bool,
    },
}

impl ActivationKind {
    /// Squashing with `a = 0.5`, `lambda = 1`.
    pub fn squashing(beta0: f64, trainable: bool) -> Self {
        ActivationKind::Squashing {
            a: 0.5,
            lambda: 1.0,
            beta0,
            trainable,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let ActivationKind::Squashing { a, lambda, beta0, .. } = *self {
            SquashingParams::new(a, lambda, beta0)?;
        }
        Ok(())
    }

    pub fn is_squashing(&self) -> bool {
        matches!(self, ActivationKind::Squashing { .. })
    }

    /// Short name used in reports: `relu`, `squashing`, `squashing-nl`, ...
    pub fn label(&self) -> &'static str {
        match self {
            ActivationKind::Identity => "identity",
            ActivationKind::Relu => "relu",
            ActivationKind::Sigmoid => "sigmoid",
            ActivationKind::Tanh => "tanh",
            ActivationKind::Squashing { trainable: true, .. } => "squashing",
            ActivationKind::Squashing { trainable: false, .. } => "squashing-nl",
        }
    }

    pub(crate) fn params(&self, beta: f64) -> Option<SquashingParams> {
        match *self {
            ActivationKind::Squashing { a, lambda, .. } => {
                // beta may cross zero while training; keep it off the singularity
                let beta = if beta.abs() < 1e-12 {
                    1e-12f64.copysign(beta)
                } else {
                    beta
                };
                SquashingParams::new(a, lambda, beta).ok()
            }
            _ => None,
        }
    }

    #[inline]
    pub(crate) fn value(&self, z: f64, sp: Option<&SquashingParams>) -> f64 {
        match self {
            ActivationKind::Identity => z,
            ActivationKind::Relu => z.max(0.0),
            ActivationKind::Sigmoid => logistic(z),
            ActivationKind::Tanh => z.tanh(),
            ActivationKind::Squashing { .. } => squash(z, sp.expect("squashing params")),
        }
    }

    /// `(value, d value / dz, d value / d beta)`.
    #[inline]
    pub(crate) fn value_and_grads(&self, z: f64, sp: Option<&SquashingParams>) -> (f64, f64, f64) {
        match self {
            ActivationKind::Identity => (z, 1.0, 0.0),
            ActivationKind::Relu => {
                if z > 0.0 {
                    (z, 1.0, 0.0)
                } else {
                    (0.0, 0.0, 0.0)
                }
            }
            ActivationKind::Sigmoid => {
                let s = logistic(z);
                (s, s * (1.0 - s), 0.0)
            }
            ActivationKind::Tanh => {
                let t = z.tanh();
                (t, 1.0 - t * t, 0.0)
            }
            ActivationKind::Squashing { .. } => {
                let e = squash_eval(z, sp.expect("squashing params"));
                (e.value, e.d_x, e.d_beta)
            }
        }
    }
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for ActivationKind {
    type Err = Error;

    /// Accepts `identity`, `relu`, `sigmoid`, `tanh`, `squashing` and
    /// `squashing-nl`; squashing variants start at `beta = 0.1`.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "linear" => Ok(ActivationKind::Identity),
            "relu" => Ok(ActivationKind::Relu),
            "sigmoid" => Ok(ActivationKind::Sigmoid),
            "tanh" => Ok(ActivationKind::Tanh),
            "squashing" => Ok(ActivationKind::squashing(0.1, true)),
            "squashing-nl" | "squashing_nl" => Ok(ActivationKind::squashing(0.1, false)),
            other => Err(Error::Config(format!("unknown activation '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_label_round_trip() {
        for s in ["identity", "relu", "sigmoid", "tanh", "squashing", "squashing-nl"] {
            let a: ActivationKind = s.parse().unwrap();
            assert_eq!(a.label(), s);
        }
        assert!("softsign".parse::<ActivationKind>().is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for act in [
            ActivationKind::Sigmoid,
            ActivationKind::Tanh,
            ActivationKind::Relu,
            ActivationKind::squashing(2.0, true),
        ] {
            let sp = act.params(2.0);
            for &z in &[-1.3, -0.2, 0.4, 0.9, 2.2] {
                let (_, d, _) = act.value_and_grads(z, sp.as_ref());
                let fd = (act.value(z + h, sp.as_ref()) - act.value(z - h, sp.as_ref())) / (2.0 * h);
                assert!((d - fd).abs() < 1e-8, "{act} at {z}");
            }
        }
    }

    #[test]
    fn zero_beta_is_nudged() {
        let act = ActivationKind::squashing(1.0, true);
        let sp = act.params(0.0).unwrap();
        assert!(sp.beta() > 0.0);
        assert!((act.value(0.5, Some(&sp)) - 0.5).abs() < 1e-12);
    }
}
