use std::path::Path;

use super::config::{ExperimentConfig, ExperimentId};
use super::metrics::ConfusionMatrix;
use super::report::{BenchmarkReport, ExperimentReport, GateSummary};
use crate::datasets::{
    gen_circle, gen_gaussian, gen_halfplane_region, gen_spiral_with, load_idx_balanced, split,
    LabeledDataset, RegionSpec,
};
use crate::error::{Error, Result};
use crate::gates::{build_gate_network, crisp_decision_region, extract_line_explanations, GateActivation, GateNetworkSpec};
use crate::nn::{train, EpochRecord, Network};

/// A finished run and the network it trained.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: ExperimentReport,
    pub network: Network,
}

fn confusion(net: &Network, data: &LabeledDataset) -> Result<ConfusionMatrix> {
    let predicted = net.classify(data.features())?;
    ConfusionMatrix::from_predictions(data.labels(), &predicted, net.n_outputs().max(data.n_classes()))
}

/// Trains `net` with the configuration's optimizer settings and packages the
/// curves and confusion matrices.
pub fn run_network<F>(
    name: &str,
    cfg: &ExperimentConfig,
    mut net: Network,
    train_set: &LabeledDataset,
    test_set: Option<&LabeledDataset>,
    on_epoch: F,
) -> Result<RunOutput>
where
    F: FnMut(&EpochRecord),
{
    let history = train(&mut net, train_set, test_set, &cfg.train_config(), on_epoch)?;
    let activation = net.layers()[0].activation().label().to_string();
    let report = ExperimentReport {
        name: name.to_string(),
        config: cfg.clone(),
        activation,
        beta_layers: history.beta_layers,
        initial_train: history.initial_train,
        initial_test: history.initial_test,
        records: history.records,
        confusion_train: confusion(&net, train_set)?,
        confusion_test: test_set.map(|t| confusion(&net, t)).transpose()?,
        gate: None,
    };
    Ok(RunOutput { report, network: net })
}

/// The unsplit dataset of a toy or gate experiment.
pub fn experiment_dataset(cfg: &ExperimentConfig) -> Result<LabeledDataset> {
    match cfg.experiment {
        ExperimentId::Gaussian => Ok(gen_gaussian(cfg.n_per_class, cfg.seed)),
        ExperimentId::Circle => Ok(gen_circle(cfg.n_per_class, cfg.seed)),
        ExperimentId::Spiral => gen_spiral_with(&cfg.spiral_spec(), cfg.n_per_class, cfg.seed),
        ExperimentId::TwoLine | ExperimentId::FourLine => {
            let region = gate_region(cfg.experiment);
            gen_halfplane_region(&region.lines, cfg.n_points, region.bounds, cfg.seed)
        }
        ExperimentId::Bench => Err(Error::Config("the benchmark reads its data from IDX files".into())),
    }
}

fn gate_region(id: ExperimentId) -> RegionSpec {
    if id == ExperimentId::FourLine {
        RegionSpec::four_line()
    } else {
        RegionSpec::two_line()
    }
}

fn check_kind(cfg: &ExperimentConfig, ok: bool, what: &str) -> Result<()> {
    cfg.validate()?;
    if !ok {
        return Err(Error::Config(format!(
            "experiment '{}' is not a {what} experiment",
            cfg.experiment
        )));
    }
    Ok(())
}

/// Gaussian, circle or spiral: stratified split, multi-layer perceptron with
/// the configured activations, full report.
pub fn run_toy_experiment<F>(cfg: &ExperimentConfig, on_epoch: F) -> Result<RunOutput>
where
    F: FnMut(&EpochRecord),
{
    check_kind(cfg, cfg.experiment.is_toy(), "toy")?;
    let data = experiment_dataset(cfg)?;
    let (train_set, test_set) = split(&data, cfg.test_fraction, cfg.seed)?;
    let net = Network::mlp(
        &cfg.layers,
        cfg.hidden_activation()?,
        cfg.output_kind()?,
        cfg.train_config().init,
        cfg.seed,
    )?;
    run_network(cfg.experiment.name(), cfg, net, &train_set, Some(&test_set), on_epoch)
}

/// Two- or four-line region learned by a line layer feeding a frozen AND
/// gate. Squashing runs also report the crisp network and the extracted
/// inequalities, both scored on the training split.
pub fn run_gate_experiment<F>(cfg: &ExperimentConfig, on_epoch: F) -> Result<RunOutput>
where
    F: FnMut(&EpochRecord),
{
    check_kind(cfg, cfg.experiment.is_gate(), "gate")?;
    let activation = cfg.gate_activation()?;
    let spec = GateNetworkSpec {
        k: gate_region(cfg.experiment).lines.len(),
        beta_layer1: cfg.beta0,
        beta_gate: cfg.beta_gate,
        activation,
    };
    let data = experiment_dataset(cfg)?;
    let (train_set, test_set) = split(&data, cfg.test_fraction, cfg.seed)?;
    let net = build_gate_network(&spec, cfg.seed)?;
    let name = match activation {
        GateActivation::Squashing => cfg.experiment.name().to_string(),
        other => format!("{}_{other}", cfg.experiment.name()),
    };
    let mut out = run_network(&name, cfg, net, &train_set, Some(&test_set), on_epoch)?;
    let explanation = extract_line_explanations(&out.network)?;
    let share = |f: &dyn Fn(f64, f64) -> bool| {
        let hits = train_set
            .features()
            .row_iter()
            .zip(train_set.labels())
            .filter(|(p, &l)| f(p[0], p[1]) == (l == 1))
            .count();
        hits as f64 / train_set.len() as f64
    };
    let crisp_train_accuracy = match crisp_decision_region(&out.network) {
        Ok(region) => Some(share(&|x, y| region.contains(x, y))),
        Err(_) => None,
    };
    let explanation_train_accuracy = share(&|x, y| explanation.contains(x, y));
    out.report.gate = Some(GateSummary {
        explanation,
        crisp_train_accuracy,
        explanation_train_accuracy,
    });
    Ok(out)
}

/// Standard FASHION-MNIST / MNIST file names inside `dir`.
pub fn idx_paths(dir: &Path) -> [std::path::PathBuf; 4] {
    [
        "train-images-idx3-ubyte",
        "train-labels-idx1-ubyte",
        "t10k-images-idx3-ubyte",
        "t10k-labels-idx1-ubyte",
    ]
    .map(|f| dir.join(f))
}

/// Class-balanced train and test subsets of the configured sizes.
pub fn load_benchmark_data(cfg: &ExperimentConfig) -> Result<(LabeledDataset, LabeledDataset)> {
    let dir = cfg
        .idx_dir
        .as_deref()
        .ok_or_else(|| Error::Config("the benchmark needs idx_dir".into()))?;
    let [ti, tl, si, sl] = idx_paths(dir);
    let train_set = load_idx_balanced(&ti, &tl, cfg.train_limit)?;
    let test_set = load_idx_balanced(&si, &sl, cfg.test_limit)?;
    let n = train_set.n_classes().max(test_set.n_classes());
    Ok((train_set.with_n_classes(n)?, test_set.with_n_classes(n)?))
}

/// One run per configured activation. Every run starts from the same seeded
/// initializer (so equal shapes get equal weights) and sees the same
/// mini-batch order.
pub fn run_activation_benchmark<F>(
    cfg: &ExperimentConfig,
    train_set: &LabeledDataset,
    test_set: &LabeledDataset,
    mut on_epoch: F,
) -> Result<BenchmarkReport>
where
    F: FnMut(&str, &EpochRecord),
{
    check_kind(cfg, cfg.experiment == ExperimentId::Bench, "benchmark")?;
    let mut sizes = cfg.layers.clone();
    sizes[0] = train_set.n_features();
    let last = sizes.len() - 1;
    sizes[last] = sizes[last].max(train_set.n_classes());
    let output = cfg.output_kind()?;
    let mut runs = Vec::new();
    for kind in cfg.benchmark_activations()? {
        let net = Network::mlp(&sizes, kind, output, cfg.train_config().init, cfg.seed)?;
        let label = kind.label();
        let out = run_network(&format!("bench_{label}"), cfg, net, train_set, Some(test_set), |r| {
            on_epoch(label, r)
        })?;
        runs.push(out.report);
    }
    Ok(BenchmarkReport {
        config: cfg.clone(),
        runs,
    })
}
