use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::datasets::SpiralSpec;
use crate::error::{Error, Result};
use crate::gates::GateActivation;
use crate::nn::{ActivationKind, AdamConfig, InitScheme, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    Gaussian,
    Circle,
    Spiral,
    TwoLine,
    FourLine,
    Bench,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 6] = [
        Self::Gaussian,
        Self::Circle,
        Self::Spiral,
        Self::TwoLine,
        Self::FourLine,
        Self::Bench,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Circle => "circle",
            Self::Spiral => "spiral",
            Self::TwoLine => "two_line",
            Self::FourLine => "four_line",
            Self::Bench => "bench",
        }
    }

    pub fn is_toy(self) -> bool {
        matches!(self, Self::Gaussian | Self::Circle | Self::Spiral)
    }

    pub fn is_gate(self) -> bool {
        matches!(self, Self::TwoLine | Self::FourLine)
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|id| id.name() == norm)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

/// Flat, fully-defaulted description of one experiment. Every key is
/// optional in JSON; missing keys take the value of the `gaussian` preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub seed: u64,
    /// Points per class for the toy datasets.
    pub n_per_class: usize,
    /// Points drawn in the box for the gate datasets.
    pub n_points: usize,
    pub test_fraction: f64,
    /// `[d_in, hidden..., d_out]`; ignored by the gate experiments.
    pub layers: Vec<usize>,
    /// Hidden activation: relu, sigmoid, tanh, squashing, squashing-nl.
    pub activation: String,
    pub output_activation: String,
    /// Initial `beta` of squashing layers (layer one for gate networks).
    pub beta0: f64,
    pub beta_gate: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    /// 0 means full batch.
    pub batch_size: usize,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub spiral_turns: f64,
    pub spiral_noise: f64,
    pub spiral_max_radius: f64,
    /// Directory with the four IDX files of the benchmark.
    pub idx_dir: Option<PathBuf>,
    pub train_limit: usize,
    pub test_limit: usize,
    /// Benchmark activations, run in this order.
    pub activations: Vec<String>,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::preset(ExperimentId::Gaussian)
    }
}

impl ExperimentConfig {
    pub fn preset(id: ExperimentId) -> Self {
        let spiral = SpiralSpec::default();
        let adam = AdamConfig::default();
        let base = Self {
            experiment: id,
            seed: 0,
            n_per_class: 250,
            n_points: 1000,
            test_fraction: 0.2,
            layers: vec![2, 2],
            activation: "squashing".into(),
            output_activation: "squashing".into(),
            beta0: 0.1,
            beta_gate: 1.0,
            epochs: 10,
            learning_rate: 0.1,
            batch_size: 0,
            adam_beta1: adam.beta1,
            adam_beta2: adam.beta2,
            adam_epsilon: adam.epsilon,
            spiral_turns: spiral.turns,
            spiral_noise: spiral.noise,
            spiral_max_radius: spiral.max_radius,
            idx_dir: None,
            train_limit: 6000,
            test_limit: 1000,
            activations: Vec::new(),
            out_dir: PathBuf::from("out"),
        };
        match id {
            ExperimentId::Gaussian => base,
            ExperimentId::Circle => Self {
                layers: vec![2, 8, 2],
                beta0: 1e-6,
                epochs: 150,
                ..base
            },
            ExperimentId::Spiral => Self {
                layers: vec![2, 64, 128, 2],
                epochs: 2000,
                learning_rate: 0.001,
                ..base
            },
            ExperimentId::TwoLine | ExperimentId::FourLine => Self {
                layers: Vec::new(),
                output_activation: "squashing".into(),
                beta0: 1.0,
                beta_gate: 1.0,
                epochs: if id == ExperimentId::TwoLine { 750 } else { 4000 },
                learning_rate: 0.02,
                batch_size: 32,
                ..base
            },
            ExperimentId::Bench => Self {
                layers: vec![784, 128, 10],
                output_activation: "identity".into(),
                epochs: 10,
                learning_rate: 1e-4,
                batch_size: 32,
                activations: ["relu", "sigmoid", "tanh", "squashing-nl", "squashing"]
                    .map(String::from)
                    .to_vec(),
                ..base
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.train_config().validate()?;
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!(
                "test_fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        if self.experiment.is_gate() {
            self.gate_activation()?;
        } else {
            if self.layers.len() < 2 || self.layers.contains(&0) {
                return Err(Error::Config("layers needs at least two positive sizes".into()));
            }
            self.hidden_activation()?;
            self.output_kind()?;
        }
        if self.experiment == ExperimentId::Bench {
            if self.activations.len() < 2 {
                return Err(Error::Config("a benchmark compares at least two activations".into()));
            }
            self.benchmark_activations()?;
        }
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            adam: AdamConfig {
                beta1: self.adam_beta1,
                beta2: self.adam_beta2,
                epsilon: self.adam_epsilon,
            },
            seed: self.seed,
            init: InitScheme::GlorotUniform,
        }
    }

    pub fn spiral_spec(&self) -> SpiralSpec {
        SpiralSpec {
            turns: self.spiral_turns,
            noise: self.spiral_noise,
            max_radius: self.spiral_max_radius,
            ..SpiralSpec::default()
        }
    }

    fn activation_named(&self, name: &str) -> Result<ActivationKind> {
        let kind: ActivationKind = name.parse()?;
        Ok(match kind {
            ActivationKind::Squashing { a, lambda, trainable, .. } => ActivationKind::Squashing {
                a,
                lambda,
                beta0: self.beta0,
                trainable,
            },
            other => other,
        })
        .and_then(|k| k.validate().map(|_| k).map_err(|e| Error::Config(e.to_string())))
    }

    pub fn hidden_activation(&self) -> Result<ActivationKind> {
        self.activation_named(&self.activation)
    }

    pub fn output_kind(&self) -> Result<ActivationKind> {
        self.activation_named(&self.output_activation)
    }

    pub fn benchmark_activations(&self) -> Result<Vec<ActivationKind>> {
        self.activations.iter().map(|a| self.activation_named(a)).collect()
    }

    pub fn gate_activation(&self) -> Result<GateActivation> {
        match self.activation.to_ascii_lowercase().as_str() {
            "squashing" => Ok(GateActivation::Squashing),
            "relu" => Ok(GateActivation::Relu),
            "sigmoid" => Ok(GateActivation::Sigmoid),
            "tanh" => Ok(GateActivation::Tanh),
            other => Err(Error::Config(format!("unknown gate activation '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_values() {
        let g = ExperimentConfig::preset(ExperimentId::Gaussian);
        assert_eq!((g.layers.as_slice(), g.epochs, g.learning_rate), (&[2, 2][..], 10, 0.1));
        let c = ExperimentConfig::preset(ExperimentId::Circle);
        assert_eq!((c.layers.as_slice(), c.epochs, c.beta0), (&[2, 8, 2][..], 150, 1e-6));
        let s = ExperimentConfig::preset(ExperimentId::Spiral);
        assert_eq!((s.layers.as_slice(), s.epochs, s.learning_rate), (&[2, 64, 128, 2][..], 2000, 0.001));
        let t = ExperimentConfig::preset(ExperimentId::TwoLine);
        assert_eq!((t.epochs, t.learning_rate, t.batch_size), (750, 0.02, 32));
        assert_eq!(ExperimentConfig::preset(ExperimentId::FourLine).epochs, 4000);
        let b = ExperimentConfig::preset(ExperimentId::Bench);
        assert_eq!((b.batch_size, b.learning_rate, b.activations.len()), (32, 1e-4, 5));
        for id in ExperimentId::ALL {
            ExperimentConfig::preset(id).validate().unwrap();
        }
    }

    #[test]
    fn json_round_trip_and_partial_configs() {
        let cfg = ExperimentConfig::preset(ExperimentId::Spiral);
        assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        let partial = ExperimentConfig::from_json(r#"{"experiment": "circle", "epochs": 3}"#).unwrap();
        assert_eq!((partial.experiment, partial.epochs), (ExperimentId::Circle, 3));
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"epochz": 3}"#),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"activation": "swish"}"#),
            Err(Error::Config(_))
        ));
        assert!(ExperimentConfig::from_json(r#"{"learning_rate": -1}"#).is_err());
    }

    #[test]
    fn experiment_names_parse() {
        for id in ExperimentId::ALL {
            assert_eq!(id.name().parse::<ExperimentId>().unwrap(), id);
        }
        assert_eq!("four-line".parse::<ExperimentId>().unwrap(), ExperimentId::FourLine);
        assert!("moons".parse::<ExperimentId>().is_err());
    }

    #[test]
    fn squashing_activations_take_the_configured_beta() {
        let cfg = ExperimentConfig {
            beta0: 0.7,
            ..ExperimentConfig::preset(ExperimentId::Bench)
        };
        let kinds = cfg.benchmark_activations().unwrap();
        assert_eq!(kinds[4], ActivationKind::squashing(0.7, true));
        assert_eq!(kinds[3], ActivationKind::squashing(0.7, false));
        assert_eq!(cfg.output_kind().unwrap(), ActivationKind::Identity);
    }
}
