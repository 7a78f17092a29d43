use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squashlogic"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn without_seconds(csv: &str) -> String {
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "seconds").unwrap();
    csv.lines()
        .map(|l| {
            let mut cells: Vec<&str> = l.split(',').collect();
            cells.remove(col);
            cells.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn gen_data_is_byte_identical_for_equal_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    for (d, seed) in [(&a, "7"), (&b, "7"), (&c, "8")] {
        let o = cli(&["--seed", seed, "gen-data", "four-line", "--n", "300"], d);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let read = |d: &Path| std::fs::read(d.join("four_line_data.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    let text = String::from_utf8(read(&a)).unwrap();
    assert_eq!(text.lines().count(), 301);
}

#[test]
fn toy_run_reports_repeat_apart_from_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = cli(&["--seed", "3", "toy", "circle", "--epochs", "20"], d);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let read = |d: &Path| std::fs::read_to_string(d.join("circle.csv")).unwrap();
    assert_eq!(read(&a).lines().count(), 21);
    assert_eq!(without_seconds(&read(&a)), without_seconds(&read(&b)));
    for f in ["circle.json", "circle_accuracy.svg", "circle_loss.svg", "circle_time.svg", "circle_beta.svg"] {
        assert!(a.join(f).is_file(), "missing {f}");
    }
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"experiment": "gaussian", "epochs": 4, "n_per_class": 30}"#).unwrap();
    let o = cli(&["--config", cfg.to_str().unwrap(), "--seed", "1", "toy"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("gaussian.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    let json = std::fs::read_to_string(dir.path().join("gaussian.json")).unwrap();
    assert!(json.contains("\"seed\": 1"));

    let clash = cli(&["--config", cfg.to_str().unwrap(), "toy", "circle"], dir.path());
    assert_eq!(clash.status.code(), Some(2));
}

#[test]
fn gate_run_writes_an_explanation() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["gates", "two-line", "--epochs", "30"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("two_line_explanation.txt")).unwrap();
    assert!(text.starts_with("region = AND(L1, L2)"), "{text}");
    let relu = cli(&["gates", "two-line", "--epochs", "5", "--activation", "relu"], dir.path());
    assert!(relu.status.success());
    assert!(dir.path().join("two_line_relu.csv").is_file());
}

#[test]
fn report_subcommand_re_emits_from_json() {
    let dir = tempfile::tempdir().unwrap();
    assert!(cli(&["toy", "gaussian"], dir.path()).status.success());
    let again = dir.path().join("again");
    let json = dir.path().join("gaussian.json");
    let o = cli(&["report", json.to_str().unwrap(), "--formats", "csv"], &again);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        std::fs::read(again.join("gaussian.csv")).unwrap(),
        std::fs::read(dir.path().join("gaussian.csv")).unwrap()
    );
    assert!(!again.join("gaussian_loss.svg").exists());
}

#[test]
fn exit_codes_follow_the_error_kind() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| cli(args, dir.path()).status.code();
    assert_eq!(code(&["toy", "moons"]), Some(2));
    assert_eq!(code(&["toy", "gaussian", "--learning-rate", "-1"]), Some(2));
    assert_eq!(code(&["--config", "/nonexistent/cfg.json", "toy"]), Some(4));
    assert_eq!(code(&["bench", "--idx-dir", "/nonexistent"]), Some(4));
    assert_eq!(code(&["toy", "gaussian", "--learning-rate", "1e300"]), Some(3));
    assert_eq!(code(&["report", "/nonexistent/report.json"]), Some(4));
}
