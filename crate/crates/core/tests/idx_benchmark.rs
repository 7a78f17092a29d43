use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use squashlogic::datasets::{encode_idx_images, encode_idx_labels, load_idx};
use squashlogic::harness::{idx_paths, load_benchmark_data, run_activation_benchmark, ExperimentConfig, ExperimentId};
use squashlogic::Error;

/// Writes a tiny synthetic image set in which the class shows up as a bright
/// row, so any working classifier separates it.
fn write_fixture(dir: &std::path::Path, n_train: usize, n_test: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let [ti, tl, si, sl] = idx_paths(dir);
    for (images, labels, n) in [(ti, tl, n_train), (si, sl, n_test)] {
        let mut px = Vec::new();
        let mut ys = Vec::new();
        for i in 0..n {
            let y = (i % 4) as u8;
            for r in 0..4 {
                for _ in 0..4 {
                    let base = if r == usize::from(y) { 200 } else { 20 };
                    px.push(base + rng.random_range(0..40u8));
                }
            }
            ys.push(y);
        }
        std::fs::write(images, encode_idx_images(4, 4, &px)).unwrap();
        std::fs::write(labels, encode_idx_labels(&ys)).unwrap();
    }
}

#[test]
fn files_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), 40, 12);
    let [ti, tl, ..] = idx_paths(dir.path());
    let d = load_idx(&ti, &tl, None).unwrap();
    assert_eq!((d.len(), d.n_features(), d.n_classes()), (40, 16, 4));
    assert!(d.features().as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
}

#[test]
fn benchmark_runs_every_activation_on_equal_terms() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), 200, 40);
    let cfg = ExperimentConfig {
        idx_dir: Some(dir.path().to_path_buf()),
        train_limit: 120,
        test_limit: 40,
        epochs: 5,
        learning_rate: 0.01,
        layers: vec![16, 8, 4],
        ..ExperimentConfig::preset(ExperimentId::Bench)
    };
    let (train, test) = load_benchmark_data(&cfg).unwrap();
    assert_eq!(train.class_counts(), vec![30; 4]);
    assert_eq!(test.len(), 40);
    let mut seen = Vec::new();
    let bench = run_activation_benchmark(&cfg, &train, &test, |label, r| seen.push((label.to_string(), r.epoch))).unwrap();
    let labels: Vec<&str> = bench.runs.iter().map(|r| r.activation.as_str()).collect();
    assert_eq!(labels, ["relu", "sigmoid", "tanh", "squashing-nl", "squashing"]);
    assert_eq!(seen.len(), 25);
    for r in &bench.runs {
        assert_eq!(r.records.len(), 5);
        assert_eq!(r.config.learning_rate, 0.01);
    }
    let relu = bench.run("relu").unwrap();
    assert!(relu.final_test_accuracy().unwrap() > 0.9);
    assert_eq!(bench.summary_csv().lines().count(), 6);
}

#[test]
fn missing_files_are_reported_as_io() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        idx_dir: Some(dir.path().to_path_buf()),
        ..ExperimentConfig::preset(ExperimentId::Bench)
    };
    assert!(matches!(load_benchmark_data(&cfg), Err(Error::Io { .. })));
}
