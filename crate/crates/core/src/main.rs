use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use squashlogic::harness::{
    emit_benchmark, emit_report, experiment_dataset, load_benchmark_data, run_activation_benchmark,
    run_gate_experiment, run_toy_experiment, BenchmarkReport, ExperimentConfig, ExperimentId,
    ExperimentReport, ReportFormat,
};
use squashlogic::nn::EpochRecord;
use squashlogic::{Error, Result};

#[derive(Parser)]
#[command(name = "squashlogic", version, about = "Squashing-activation networks and nilpotent logic experiments")]
struct Cli {
    /// Seed for data generation, splitting, initialization and batching.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: the config's out_dir, else "out").
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON experiment configuration; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset as CSV (x0,x1,label).
    GenData {
        /// gaussian, circle, spiral, two-line or four-line.
        dataset: Option<String>,
        /// Points per class (toy sets) or total points (line regions).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Train on a toy dataset: gaussian, circle or spiral.
    Toy {
        which: Option<String>,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Line-region experiment with a frozen AND gate: two-line or four-line.
    Gates {
        which: Option<String>,
        /// squashing, relu, sigmoid or tanh.
        #[arg(long)]
        activation: Option<String>,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Activation comparison on IDX image files.
    Bench {
        /// Directory holding the four IDX files.
        #[arg(long)]
        idx_dir: Option<PathBuf>,
        /// Comma-separated activations, run in this order.
        #[arg(long, value_delimiter = ',')]
        activations: Option<Vec<String>>,
        #[arg(long)]
        train_limit: Option<usize>,
        #[arg(long)]
        test_limit: Option<usize>,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Re-emit CSV / JSON / SVG files from a saved report JSON.
    Report {
        input: PathBuf,
        /// Comma-separated subset of csv, json, svg.
        #[arg(long, value_delimiter = ',', default_value = "csv,json,svg")]
        formats: Vec<String>,
    },
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    /// 0 means full batch.
    #[arg(long)]
    batch_size: Option<usize>,
    /// Print one line per epoch to stderr.
    #[arg(long)]
    progress: bool,
}

impl TrainArgs {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(e) = self.epochs {
            cfg.epochs = e;
        }
        if let Some(lr) = self.learning_rate {
            cfg.learning_rate = lr;
        }
        if let Some(b) = self.batch_size {
            cfg.batch_size = b;
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Diverged { .. } => 3,
        Error::Io { .. } | Error::Idx(_) => 4,
        _ => 2,
    }
}

fn base_config(cli: &Cli, which: Option<&str>, fallback: ExperimentId) -> Result<ExperimentConfig> {
    let named = which.map(str::parse::<ExperimentId>).transpose()?;
    let mut cfg = match &cli.config {
        Some(path) => {
            let cfg = ExperimentConfig::load(path)?;
            if let Some(id) = named {
                if id != cfg.experiment {
                    return Err(Error::Config(format!(
                        "command names '{id}' but {} configures '{}'",
                        path.display(),
                        cfg.experiment
                    )));
                }
            }
            cfg
        }
        None => ExperimentConfig::preset(named.unwrap_or(fallback)),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn progress_line(label: &str, r: &EpochRecord) {
    let test = r.test_acc.map(|a| format!(" test_acc {a:.4}")).unwrap_or_default();
    eprintln!("{label} epoch {} loss {:.6} train_acc {:.4}{test}", r.epoch, r.train_loss, r.train_acc);
}

fn print_written(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn summarize(r: &ExperimentReport) {
    let f = r.final_record();
    let test = f.test_acc.map(|a| format!(", test accuracy {a:.4}")).unwrap_or_default();
    println!("{}: train accuracy {:.4}{test}, final loss {:.6}", r.name, f.train_acc, f.train_loss);
    if let Some(g) = &r.gate {
        print!("{}", g.explanation.to_text());
    }
}

fn parse_formats(names: &[String]) -> Result<Vec<ReportFormat>> {
    names
        .iter()
        .map(|n| match n.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "svg" => Ok(ReportFormat::Svg),
            other => Err(Error::Config(format!("unknown report format '{other}'"))),
        })
        .collect()
}

fn read_report(path: &Path) -> Result<std::result::Result<BenchmarkReport, ExperimentReport>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    if let Ok(bench) = BenchmarkReport::from_json(&text) {
        return Ok(Ok(bench));
    }
    Ok(Err(ExperimentReport::from_json(&text)?))
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::GenData { dataset, n } => {
            let mut cfg = base_config(cli, dataset.as_deref(), ExperimentId::Gaussian)?;
            if let Some(n) = n {
                cfg.n_per_class = *n;
                cfg.n_points = *n;
            }
            let data = experiment_dataset(&cfg)?;
            std::fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::Io {
                path: cfg.out_dir.clone(),
                source: e,
            })?;
            let path = cfg.out_dir.join(format!("{}_data.csv", cfg.experiment));
            std::fs::write(&path, data.to_csv_string()).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            print_written(&[path]);
        }
        Command::Toy { which, train } => {
            let mut cfg = base_config(cli, which.as_deref(), ExperimentId::Gaussian)?;
            train.apply(&mut cfg);
            let out = run_toy_experiment(&cfg, |r| {
                if train.progress {
                    progress_line(cfg.experiment.name(), r)
                }
            })?;
            summarize(&out.report);
            print_written(&emit_report(&out.report, &cfg.out_dir, &ReportFormat::ALL)?);
        }
        Command::Gates { which, activation, train } => {
            let mut cfg = base_config(cli, which.as_deref(), ExperimentId::TwoLine)?;
            if let Some(a) = activation {
                cfg.activation = a.clone();
            }
            train.apply(&mut cfg);
            let out = run_gate_experiment(&cfg, |r| {
                if train.progress {
                    progress_line(cfg.experiment.name(), r)
                }
            })?;
            summarize(&out.report);
            print_written(&emit_report(&out.report, &cfg.out_dir, &ReportFormat::ALL)?);
        }
        Command::Bench {
            idx_dir,
            activations,
            train_limit,
            test_limit,
            train,
        } => {
            let mut cfg = base_config(cli, Some("bench"), ExperimentId::Bench)?;
            if let Some(d) = idx_dir {
                cfg.idx_dir = Some(d.clone());
            }
            if let Some(a) = activations {
                cfg.activations = a.clone();
            }
            if let Some(n) = train_limit {
                cfg.train_limit = *n;
            }
            if let Some(n) = test_limit {
                cfg.test_limit = *n;
            }
            train.apply(&mut cfg);
            cfg.validate()?;
            let (train_set, test_set) = load_benchmark_data(&cfg)?;
            let bench = run_activation_benchmark(&cfg, &train_set, &test_set, |label, r| {
                if train.progress {
                    progress_line(label, r)
                }
            })?;
            for r in &bench.runs {
                summarize(r);
            }
            print_written(&emit_benchmark(&bench, &cfg.out_dir, &ReportFormat::ALL)?);
        }
        Command::Report { input, formats } => {
            let formats = parse_formats(formats)?;
            let out = cli.out.clone().unwrap_or_else(|| {
                input.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf)
            });
            let written = match read_report(input)? {
                Ok(bench) => emit_benchmark(&bench, &out, &formats)?,
                Err(report) => emit_report(&report, &out, &formats)?,
            };
            print_written(&written);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
