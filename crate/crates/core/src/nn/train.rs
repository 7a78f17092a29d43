use std::borrow::Cow;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{AdamConfig, AdamState};
use super::init::InitScheme;
use super::network::argmax_rows;
use super::{softmax_cross_entropy, Network};
use crate::datasets::LabeledDataset;
use crate::error::{Error, Result};

/// Optimization settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    /// 0 means full batch.
    pub batch_size: usize,
    pub adam: AdamConfig,
    pub seed: u64,
    pub init: InitScheme,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 10,
            learning_rate: 0.1,
            batch_size: 0,
            adam: AdamConfig::default(),
            seed: 0,
            init: InitScheme::GlorotUniform,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        let a = &self.adam;
        if !(0.0..1.0).contains(&a.beta1) || !(0.0..1.0).contains(&a.beta2) || a.epsilon <= 0.0 {
            return Err(Error::Config("adam moments need beta1, beta2 in [0, 1) and epsilon > 0".into()));
        }
        Ok(())
    }
}

/// Loss and accuracy over a whole dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub loss: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    pub train_loss: f64,
    pub test_loss: Option<f64>,
    pub train_acc: f64,
    pub test_acc: Option<f64>,
    /// Wall-clock seconds spent in this epoch's update loop.
    pub seconds: f64,
    /// `beta` of each squashing layer after the epoch.
    pub betas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingHistory {
    /// Layer indices (0-based) the `betas` columns belong to.
    pub beta_layers: Vec<usize>,
    pub initial_train: Evaluation,
    pub initial_test: Option<Evaluation>,
    pub records: Vec<EpochRecord>,
}

impl TrainingHistory {
    pub fn last(&self) -> &EpochRecord {
        self.records.last().expect("at least one epoch")
    }
}

pub fn evaluate(net: &Network, data: &LabeledDataset) -> Result<Evaluation> {
    let logits = net.predict(data.features())?;
    let (loss, _) = softmax_cross_entropy(&logits, data.labels())?;
    let hits = argmax_rows(&logits)
        .iter()
        .zip(data.labels())
        .filter(|(p, y)| p == y)
        .count();
    Ok(Evaluation {
        loss,
        accuracy: hits as f64 / data.len() as f64,
    })
}

fn check_compatible(net: &Network, data: &LabeledDataset, which: &str) -> Result<()> {
    if data.is_empty() {
        return Err(Error::Shape(format!("{which} set is empty")));
    }
    if data.n_features() != net.input_dim() {
        return Err(Error::Shape(format!(
            "{which} set has {} features, network expects {}",
            data.n_features(),
            net.input_dim()
        )));
    }
    if data.n_classes() > net.n_outputs() {
        return Err(Error::Shape(format!(
            "{which} set has {} classes, network emits {} logits",
            data.n_classes(),
            net.n_outputs()
        )));
    }
    Ok(())
}

/// Adam on softmax cross-entropy. Full batch when `batch_size` is 0 or covers
/// the data; otherwise the sample order is reshuffled each epoch from a stream
/// derived from `seed`. The run is a pure function of its inputs apart from
/// the `seconds` column.
pub fn train<F>(
    net: &mut Network,
    train: &LabeledDataset,
    test: Option<&LabeledDataset>,
    cfg: &TrainConfig,
    mut on_epoch: F,
) -> Result<TrainingHistory>
where
    F: FnMut(&EpochRecord),
{
    cfg.validate()?;
    check_compatible(net, train, "training")?;
    if let Some(t) = test {
        check_compatible(net, t, "test")?;
    }

    let n = train.len();
    let full_batch = cfg.batch_size == 0 || cfg.batch_size >= n;
    let mut order: Vec<usize> = (0..n).collect();
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    shuffle_rng.set_stream(1);
    let mut opt = AdamState::new(net);

    let initial_train = evaluate(net, train)?;
    let initial_test = test.map(|t| evaluate(net, t)).transpose()?;
    let mut records = Vec::with_capacity(cfg.epochs);

    for epoch in 1..=cfg.epochs {
        let started = Instant::now();
        if full_batch {
            step(net, &mut opt, Cow::Borrowed(train.features()), train.labels(), cfg, epoch)?;
        } else {
            order.shuffle(&mut shuffle_rng);
            for chunk in order.chunks(cfg.batch_size) {
                let x = train.features().select_rows(chunk);
                let y: Vec<usize> = chunk.iter().map(|&i| train.labels()[i]).collect();
                step(net, &mut opt, Cow::Owned(x), &y, cfg, epoch)?;
            }
        }
        let seconds = started.elapsed().as_secs_f64();

        let tr = evaluate(net, train)?;
        if !tr.loss.is_finite() {
            return Err(Error::Diverged { epoch, loss: tr.loss });
        }
        let te = test.map(|t| evaluate(net, t)).transpose()?;
        let record = EpochRecord {
            epoch,
            train_loss: tr.loss,
            test_loss: te.map(|e| e.loss),
            train_acc: tr.accuracy,
            test_acc: te.map(|e| e.accuracy),
            seconds,
            betas: net.betas(),
        };
        on_epoch(&record);
        records.push(record);
    }

    Ok(TrainingHistory {
        beta_layers: net.squashing_layers(),
        initial_train,
        initial_test,
        records,
    })
}

fn step(
    net: &mut Network,
    opt: &mut AdamState,
    x: Cow<'_, super::Matrix>,
    y: &[usize],
    cfg: &TrainConfig,
    epoch: usize,
) -> Result<()> {
    let (logits, cache) = net.forward(&x)?;
    let (loss, dlogits) = softmax_cross_entropy(&logits, y)?;
    if !loss.is_finite() {
        return Err(Error::Diverged { epoch, loss });
    }
    let grads = net.backward(&cache, &dlogits)?;
    opt.step(net, &grads, cfg.learning_rate, &cfg.adam)?;
    // a squashing layer is undefined at beta = 0 or a non-finite beta
    if net.betas().iter().any(|b| !b.is_finite() || *b == 0.0) {
        return Err(Error::Diverged { epoch, loss: f64::NAN });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::gen_gaussian;
    use crate::nn::ActivationKind;

    #[test]
    fn runaway_learning_rate_reports_divergence() {
        let data = gen_gaussian(20, 1);
        let act = ActivationKind::squashing(0.1, true);
        let mut net = Network::mlp(&[2, 2], act, act, InitScheme::GlorotUniform, 1).unwrap();
        let cfg = TrainConfig {
            learning_rate: 1e300,
            ..TrainConfig::default()
        };
        let err = train(&mut net, &data, None, &cfg, |_| {}).unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }), "{err:?}");
    }

    #[test]
    fn same_seed_same_history() {
        let data = gen_gaussian(30, 2);
        let act = ActivationKind::squashing(0.1, true);
        let cfg = TrainConfig {
            batch_size: 8,
            seed: 5,
            ..TrainConfig::default()
        };
        let run = || {
            let mut net = Network::mlp(&[2, 3, 2], act, act, InitScheme::GlorotUniform, 5).unwrap();
            let h = train(&mut net, &data, None, &cfg, |_| {}).unwrap();
            h.records
                .iter()
                .map(|r| (r.train_loss.to_bits(), r.betas.clone()))
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}
